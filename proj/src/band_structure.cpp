#include "gapsol/band_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "gapsol/error.hpp"
#include "gapsol/parallel.hpp"

namespace gapsol {

Eigen::MatrixXcd symbol(const CmeParameters& params, const Eigen::VectorXd& k) {
    if (k.size() != params.dim) throw Error(ErrorCode::DimensionMismatch, "wavevector has wrong dimension");
    Eigen::MatrixXcd l = -params.kappa;
    for (int j = 0; j < params.modes; ++j) l(j, j) += params.velocities[j].dot(k);
    return l;
}

namespace {

void require_hermitian(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) throw Error(ErrorCode::DimensionMismatch, "matrix is not square");
    if (h.size() == 0) return;
    const double scale = std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "matrix is not Hermitian");
}

}  // namespace

HermitianEigen eigen_decomposition(const Eigen::MatrixXcd& h) {
    require_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd band_values(const CmeParameters& params, const Eigen::VectorXd& k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(symbol(params, k), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
    return solver.eigenvalues();
}

double default_band_box(const CmeParameters& params) {
    double vmax = 0.0;
    for (const auto& v : params.velocities) vmax = std::max(vmax, v.norm());
    const double kmax = params.kappa.size() ? params.kappa.cwiseAbs().maxCoeff() : 0.0;
    const double scale = std::max(vmax, kmax);
    return 8.0 * (scale > 0.0 ? scale : 1.0);
}

int default_points_per_axis(int dim) {
    switch (dim) {
        case 1: return 4097;
        case 2: return 129;
        default: return 33;
    }
}

BandStructure sample_bands(const CmeParameters& params, double box, int points_per_axis) {
    if (points_per_axis < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 points per axis");
    if (!(box > 0.0)) throw Error(ErrorCode::InvalidArgument, "box half-width must be positive");

    BandStructure bs;
    bs.dim = params.dim;
    bs.modes = params.modes;
    bs.box = box;
    bs.points_per_axis = points_per_axis;

    std::size_t total = 1;
    for (int i = 0; i < params.dim; ++i) total *= static_cast<std::size_t>(points_per_axis);
    bs.k_points.resize(static_cast<Eigen::Index>(total), params.dim);
    bs.values.resize(static_cast<Eigen::Index>(total), params.modes);

    const double h = bs.spacing();
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rem = p;
        for (int i = params.dim - 1; i >= 0; --i) {
            const auto idx = rem % static_cast<std::size_t>(points_per_axis);
            rem /= static_cast<std::size_t>(points_per_axis);
            bs.k_points(static_cast<Eigen::Index>(p), i) = -box + h * static_cast<double>(idx);
        }
    }

    parallel_for(total, [&](std::size_t p) {
        const auto row = static_cast<Eigen::Index>(p);
        const Eigen::VectorXd k = bs.k_points.row(row).transpose();
        bs.values.row(row) = band_values(params, k).transpose();
    });

    bs.band_min = bs.values.colwise().minCoeff().transpose();
    bs.band_max = bs.values.colwise().maxCoeff().transpose();
    return bs;
}

std::optional<SpectralGap> find_gap(const BandStructure& bands) {
    if (bands.values.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty band structure");
    for (int j = 0; j + 1 < bands.modes; ++j) {
        if (bands.band_max(j) < bands.band_min(j + 1)) {
            SpectralGap gap;
            gap.lower_band = j;
            Eigen::Index arg_max = 0;
            Eigen::Index arg_min = 0;
            gap.alpha = bands.values.col(j).maxCoeff(&arg_max);
            gap.beta = bands.values.col(j + 1).minCoeff(&arg_min);
            gap.k_alpha = bands.k_points.row(arg_max).transpose();
            gap.k_beta = bands.k_points.row(arg_min).transpose();
            return gap;
        }
    }
    return std::nullopt;
}

Eigen::VectorXd band_gradient(const CmeParameters& params, int j, const Eigen::VectorXd& k, double step) {
    Eigen::VectorXd g(k.size());
    for (int i = 0; i < k.size(); ++i) {
        Eigen::VectorXd kp = k, km = k;
        kp(i) += step;
        km(i) -= step;
        g(i) = (band_values(params, kp)(j) - band_values(params, km)(j)) / (2.0 * step);
    }
    return g;
}

namespace {

struct ExtremumSearch {
    Eigen::VectorXd k;
    double value = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
};

// Maximises sense * lambda_j by per-axis parabolic line searches with a shrinking stencil.
ExtremumSearch refine_extremum(const CmeParameters& params, int j, const Eigen::VectorXd& start, double sense,
                               double initial_step, double gradient_tol, int max_sweeps) {
    auto f = [&](const Eigen::VectorXd& k) { return sense * band_values(params, k)(j); };
    ExtremumSearch out;
    out.k = start;
    double h = initial_step;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        out.gradient_norm = band_gradient(params, j, out.k).norm();
        if (out.gradient_norm <= gradient_tol) {
            out.converged = true;
            break;
        }
        if (sweep == max_sweeps) break;
        double largest_move = 0.0;
        for (int i = 0; i < out.k.size(); ++i) {
            Eigen::VectorXd kp = out.k, km = out.k;
            kp(i) += h;
            km(i) -= h;
            const double f0 = f(out.k), fp = f(kp), fm = f(km);
            const double curv = fp - 2.0 * f0 + fm;
            double move;
            if (curv < 0.0) {
                move = h * (fm - fp) / (2.0 * curv);
                move = std::clamp(move, -4.0 * h, 4.0 * h);
            } else {
                move = fp >= fm ? h : -h;
            }
            Eigen::VectorXd trial = out.k;
            trial(i) += move;
            if (f(trial) >= f0) {
                out.k = trial;
                largest_move = std::max(largest_move, std::abs(move));
            }
        }
        h = std::clamp(2.0 * largest_move, 1e-6, h);
    }
    out.value = band_values(params, out.k)(j);
    return out;
}

}  // namespace

SpectralGap refine_gap(const CmeParameters& params, const SpectralGap& gap) {
    SpectralGap refined = gap;
    const double h0 = 0.5;
    const auto lower = refine_extremum(params, gap.lower_band, gap.k_alpha, +1.0, h0, 1e-9, 200);
    const auto upper = refine_extremum(params, gap.lower_band + 1, gap.k_beta, -1.0, h0, 1e-9, 200);
    if (lower.value >= gap.alpha) {
        refined.alpha = lower.value;
        refined.k_alpha = lower.k;
    }
    if (upper.value <= gap.beta) {
        refined.beta = upper.value;
        refined.k_beta = upper.k;
    }
    refined.refined = true;
    return refined;
}

std::string to_string(EdgeSide side) { return side == EdgeSide::Lower ? "lower" : "upper"; }

EdgeSide parse_edge_side(const std::string& text) {
    if (text == "lower") return EdgeSide::Lower;
    if (text == "upper") return EdgeSide::Upper;
    throw Error(ErrorCode::InvalidArgument, "edge side must be 'lower' or 'upper', got '" + text + "'");
}

Eigen::VectorXcd fix_phase(const Eigen::VectorXcd& v) {
    const double vmax = v.cwiseAbs().maxCoeff();
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= vmax * (1.0 - 1e-10)) {
            pick = i;
            break;
        }
    }
    const cplx phase = std::abs(v(pick)) > 0.0 ? std::conj(v(pick)) / std::abs(v(pick)) : cplx{1.0, 0.0};
    return v * phase;
}

namespace {

double min_separation(const Eigen::VectorXd& values, int j) {
    double sep = std::numeric_limits<double>::infinity();
    for (int r = 0; r < values.size(); ++r)
        if (r != j) sep = std::min(sep, std::abs(values(r) - values(j)));
    return sep;
}

}  // namespace

Eigen::MatrixXd hessian(const CmeParameters& params, int j0, const Eigen::VectorXd& k0) {
    const int d = static_cast<int>(k0.size());
    auto lambda = [&](const Eigen::VectorXd& k) {
        const Eigen::VectorXd vals = band_values(params, k);
        if (min_separation(vals, j0) < 1e-8)
            throw Error(ErrorCode::DegenerateEigenvalue, "band crossing inside the Hessian stencil");
        return vals(j0);
    };
    auto second_derivatives = [&](double h) {
        Eigen::MatrixXd hess(d, d);
        const double f0 = lambda(k0);
        for (int a = 0; a < d; ++a) {
            Eigen::VectorXd kp = k0, km = k0;
            kp(a) += h;
            km(a) -= h;
            hess(a, a) = (lambda(kp) - 2.0 * f0 + lambda(km)) / (h * h);
            for (int b = a + 1; b < d; ++b) {
                Eigen::VectorXd kpp = k0, kpm = k0, kmp = k0, kmm = k0;
                kpp(a) += h; kpp(b) += h;
                kpm(a) += h; kpm(b) -= h;
                kmp(a) -= h; kmp(b) += h;
                kmm(a) -= h; kmm(b) -= h;
                hess(a, b) = (lambda(kpp) - lambda(kpm) - lambda(kmp) + lambda(kmm)) / (4.0 * h * h);
                hess(b, a) = hess(a, b);
            }
        }
        return hess;
    };
    const double h = std::max(1e-4, 1e-4 * k0.norm());
    const Eigen::MatrixXd coarse = second_derivatives(h);
    const Eigen::MatrixXd fine = second_derivatives(0.5 * h);
    const Eigen::MatrixXd extrapolated = (4.0 * fine - coarse) / 3.0;
    return 0.25 * (extrapolated + extrapolated.transpose());
}

SpectralEdge locate_edge(const CmeParameters& params, const BandStructure& bands, const SpectralGap& gap,
                         EdgeSide side, const EdgeOptions& options) {
    const bool lower = side == EdgeSide::Lower;
    const int j0 = lower ? gap.lower_band : gap.lower_band + 1;
    const double sense = lower ? +1.0 : -1.0;
    const double spacing = bands.spacing();

    Eigen::Index start_row = 0;
    if (lower)
        bands.values.col(j0).maxCoeff(&start_row);
    else
        bands.values.col(j0).minCoeff(&start_row);
    const Eigen::VectorXd start = bands.k_points.row(start_row).transpose();

    const auto found = refine_extremum(params, j0, start, sense, spacing, options.gradient_tol, options.max_sweeps);
    if (!found.converged)
        throw Error(ErrorCode::ConvergenceFailure, "band extremum refinement stalled with |grad| = " +
                                                       std::to_string(found.gradient_norm));

    SpectralEdge edge;
    edge.j0 = j0;
    edge.k0 = found.k;
    edge.omega0 = found.value;
    edge.side = side;
    edge.gradient_norm = found.gradient_norm;

    const auto eig = eigen_decomposition(symbol(params, edge.k0));
    edge.separation = min_separation(eig.values, j0);
    if (edge.separation < options.degeneracy_tol)
        throw Error(ErrorCode::DegenerateEigenvalue,
                    "eigenvalue at the edge is not simple (separation " + std::to_string(edge.separation) + ")");
    edge.eta = fix_phase(eig.vectors.col(j0).normalized());
    edge.eigen_residual = (symbol(params, edge.k0) * edge.eta - edge.omega0 * edge.eta).norm();

    // Isolation: every other candidate extremum on the grid must end strictly below (above) omega0.
    const double scale = std::max({1.0, std::abs(edge.omega0), bands.values.cwiseAbs().maxCoeff()});
    const double tie_tol = 1e-6 * scale;
    double lipschitz = 0.0;
    for (const auto& v : params.velocities) lipschitz = std::max(lipschitz, v.norm());
    const double reach = lipschitz * spacing * std::sqrt(static_cast<double>(params.dim)) + tie_tol;
    const double exclusion = 2.0 * spacing;
    const int n = bands.points_per_axis;
    const auto rows = bands.values.rows();

    for (Eigen::Index p = 0; p < rows; ++p) {
        for (int j = 0; j < params.modes; ++j) {
            const double value = bands.values(p, j);
            const Eigen::VectorXd kp = bands.k_points.row(p).transpose();
            if (j != j0) {
                if (std::abs(value - edge.omega0) <= tie_tol)
                    throw Error(ErrorCode::NonIsolatedExtremum,
                                "band " + std::to_string(j + 1) + " reaches the edge frequency");
                continue;
            }
            if (sense * (value - edge.omega0) < -reach) continue;
            if ((kp - edge.k0).norm() <= exclusion) continue;
            // Grid-local extremum test against axis neighbours.
            bool local = true;
            Eigen::Index stride = 1;
            for (int axis = params.dim - 1; axis >= 0 && local; --axis) {
                const auto idx = (p / stride) % n;
                if (idx > 0 && sense * (bands.values(p - stride, j) - value) > 0.0) local = false;
                if (idx + 1 < n && sense * (bands.values(p + stride, j) - value) > 0.0) local = false;
                stride *= n;
            }
            if (!local) continue;
            const auto other = refine_extremum(params, j0, kp, sense, spacing, options.gradient_tol, 60);
            if (std::abs(other.value - edge.omega0) <= tie_tol && (other.k - edge.k0).norm() > exclusion)
                throw Error(ErrorCode::NonIsolatedExtremum,
                            "band " + std::to_string(j0 + 1) + " attains the edge frequency away from k0");
        }
    }

    const SpectralGap tightened = refine_gap(params, gap);
    edge.alpha = lower ? edge.omega0 : tightened.alpha;
    edge.beta = lower ? tightened.beta : edge.omega0;
    edge.G0 = hessian(params, j0, edge.k0);
    return edge;
}

}  // namespace gapsol
