#include "gapsol/gap_soliton_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "gapsol/parallel.hpp"

namespace gapsol {

double Grid::cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= spacing(i);
    return v;
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int n : points) s *= static_cast<std::size_t>(n);
    return s;
}

std::vector<double> Grid::wavenumbers(int axis) const { return fft_wavenumbers(points[axis], 2.0 * half_extent[axis]); }

std::vector<int> Grid::axis_indices(std::size_t p) const {
    std::vector<int> idx(static_cast<std::size_t>(dim));
    for (int i = dim - 1; i >= 0; --i) {
        idx[static_cast<std::size_t>(i)] = static_cast<int>(p % static_cast<std::size_t>(points[i]));
        p /= static_cast<std::size_t>(points[i]);
    }
    return idx;
}

Eigen::VectorXd Grid::coordinate(std::size_t p) const {
    Eigen::VectorXd x(dim);
    const auto idx = axis_indices(p);
    for (int i = 0; i < dim; ++i) x(i) = -half_extent[i] + spacing(i) * idx[static_cast<std::size_t>(i)];
    return x;
}

Eigen::VectorXd Grid::wavevector(std::size_t p) const {
    Eigen::VectorXd k(dim);
    const auto idx = axis_indices(p);
    for (int i = 0; i < dim; ++i) {
        const int m = idx[static_cast<std::size_t>(i)];
        const int n = points[i];
        k(i) = std::numbers::pi / half_extent[i] * (m < (n + 1) / 2 ? m : m - n);
    }
    return k;
}

bool Grid::is_nyquist(std::size_t p) const {
    const auto idx = axis_indices(p);
    for (int i = 0; i < dim; ++i)
        if (points[i] % 2 == 0 && idx[static_cast<std::size_t>(i)] == points[i] / 2) return true;
    return false;
}

Grid make_grid(std::vector<double> half_extent, std::vector<int> points) {
    if (half_extent.size() != points.size() || points.empty())
        throw Error(ErrorCode::DimensionMismatch, "grid extents and point counts differ in length");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i] < 8 || points[i] % 2 != 0)
            throw Error(ErrorCode::InvalidArgument, "grid points per axis must be even and >= 8");
        if (!(half_extent[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid extent must be positive");
    }
    Grid g;
    g.dim = static_cast<int>(points.size());
    g.half_extent = std::move(half_extent);
    g.points = std::move(points);
    return g;
}

Grid make_grid(double eps, double box_mult, int n, int dim) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (!(box_mult > 0.0)) throw Error(ErrorCode::InvalidArgument, "box multiplier must be positive");
    if (dim < 1) throw Error(ErrorCode::InvalidArgument, "grid dimension must be positive");
    return make_grid(std::vector<double>(static_cast<std::size_t>(dim), box_mult / eps),
                     std::vector<int>(static_cast<std::size_t>(dim), n));
}

ComplexField::ComplexField(Grid g, int modes) : grid(std::move(g)) {
    components.assign(static_cast<std::size_t>(modes), std::vector<cplx>(grid.size()));
}

double ComplexField::sup_norm() const {
    double m = 0.0;
    for (const auto& c : components)
        for (const auto& z : c) m = std::max(m, std::abs(z));
    return m;
}

double ComplexField::sup_imag() const {
    double m = 0.0;
    for (const auto& c : components)
        for (const auto& z : c) m = std::max(m, std::abs(z.imag()));
    return m;
}

FieldTransform::FieldTransform(const Grid& grid)
    : plan_(std::make_shared<FftPlan>(grid.points)), scale_(1.0 / std::sqrt(static_cast<double>(grid.size()))) {}

void FieldTransform::forward_in_place(std::vector<cplx>& data) const {
    plan_->forward(data);
    for (auto& z : data) z *= scale_;
}

void FieldTransform::inverse_in_place(std::vector<cplx>& data) const {
    plan_->backward(data);
    for (auto& z : data) z *= scale_;
}

ComplexField FieldTransform::forward(const ComplexField& field) const {
    ComplexField out = field;
    for (auto& c : out.components) forward_in_place(c);
    return out;
}

ComplexField FieldTransform::inverse(const ComplexField& spectral) const {
    ComplexField out = spectral;
    for (auto& c : out.components) inverse_in_place(c);
    return out;
}

ComplexField transform(const ComplexField& field) { return FieldTransform(field.grid).forward(field); }
ComplexField inverse_transform(const ComplexField& spectral) { return FieldTransform(spectral.grid).inverse(spectral); }

Ansatz build_ansatz(double eps, const SpectralEdge& edge, const RadialProfile& envelope, const Grid& grid) {
    if (edge.k0.size() != grid.dim) throw Error(ErrorCode::DimensionMismatch, "edge and grid dimensions differ");
    const int modes = static_cast<int>(edge.eta.size());
    Ansatz a;
    a.field = ComplexField(grid, modes);
    const double c0 = evaluate_envelope(envelope, Eigen::VectorXd::Zero(grid.dim));
    double boundary = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const Eigen::VectorXd x = grid.coordinate(p);
        const double c = evaluate_envelope(envelope, eps * x);
        const cplx phase = std::polar(1.0, edge.k0.dot(x));
        for (int j = 0; j < modes; ++j) a.field.components[j][p] = eps * c * phase * edge.eta(j);
        const auto idx = grid.axis_indices(p);
        for (int i = 0; i < grid.dim; ++i) {
            const int m = idx[static_cast<std::size_t>(i)];
            if (m == 0 || m == grid.points[i] - 1) boundary = std::max(boundary, std::abs(c));
        }
    }
    a.boundary_ratio = c0 != 0.0 ? boundary / std::abs(c0) : 0.0;
    a.domain_too_small = a.boundary_ratio > 1e-6;
    return a;
}

namespace {

constexpr std::size_t kBlock = 1024;

// N(B) at every grid point, component-major like the field itself.
std::vector<std::vector<cplx>> pointwise_nonlinearity(const ComplexField& b, const CmeParameters& params) {
    const int modes = b.modes();
    const std::size_t size = b.grid.size();
    std::vector<std::vector<cplx>> out(static_cast<std::size_t>(modes), std::vector<cplx>(size));
    parallel_blocks(size, kBlock, [&](std::size_t begin, std::size_t end) {
        std::vector<cplx> a(static_cast<std::size_t>(modes)), n(static_cast<std::size_t>(modes));
        for (std::size_t p = begin; p < end; ++p) {
            for (int j = 0; j < modes; ++j) a[j] = b.components[j][p];
            nonlinearity(params.gamma, a, n);
            for (int j = 0; j < modes; ++j) out[j][p] = n[j];
        }
    });
    return out;
}

Eigen::MatrixXcd shifted_symbol(const CmeParameters& params, const Eigen::VectorXd& k, double omega) {
    Eigen::MatrixXcd m = symbol(params, k);
    m.diagonal().array() -= omega;
    return m;
}

void check_field(const ComplexField& field, const CmeParameters& params) {
    if (field.modes() != params.modes) throw Error(ErrorCode::DimensionMismatch, "field has wrong number of modes");
    if (field.grid.dim != params.dim) throw Error(ErrorCode::DimensionMismatch, "grid dimension differs from model");
}

struct ResidualField {
    ComplexField physical;
    double l2 = 0.0;
};

// r^ = omega B^ - L(ik) B^ + N^  for a spectral B^ and N^.
ResidualField residual_from_spectra(const ComplexField& b_hat, const std::vector<std::vector<cplx>>& n_hat,
                                    double omega, const CmeParameters& params, const FieldTransform& ft) {
    const Grid& grid = b_hat.grid;
    const int modes = params.modes;
    ResidualField r{ComplexField(grid, modes), 0.0};
    parallel_blocks(grid.size(), kBlock, [&](std::size_t begin, std::size_t end) {
        Eigen::VectorXcd bv(modes), lb(modes);
        for (std::size_t p = begin; p < end; ++p) {
            for (int j = 0; j < modes; ++j) bv(j) = b_hat.components[j][p];
            lb.noalias() = symbol(params, grid.wavevector(p)) * bv;
            for (int j = 0; j < modes; ++j) r.physical.components[j][p] = omega * bv(j) - lb(j) + n_hat[j][p];
        }
    });
    double sum = 0.0;
    for (const auto& c : r.physical.components)
        for (const auto& z : c) sum += std::norm(z);
    r.l2 = std::sqrt(sum * grid.cell_volume());
    for (auto& c : r.physical.components) ft.inverse_in_place(c);
    return r;
}

}  // namespace

ResidualNorms stationary_residual(const ComplexField& field, double omega, const CmeParameters& params) {
    check_field(field, params);
    const FieldTransform ft(field.grid);
    auto n_hat = pointwise_nonlinearity(field, params);
    for (auto& c : n_hat) ft.forward_in_place(c);
    const auto r = residual_from_spectra(ft.forward(field), n_hat, omega, params, ft);
    return {r.physical.sup_norm(), r.l2};
}

double projected_residual_sup(const ComplexField& field, double omega, const CmeParameters& params,
                              const Eigen::VectorXcd& eta) {
    check_field(field, params);
    const FieldTransform ft(field.grid);
    auto n_hat = pointwise_nonlinearity(field, params);
    for (auto& c : n_hat) ft.forward_in_place(c);
    const auto r = residual_from_spectra(ft.forward(field), n_hat, omega, params, ft);
    double worst = 0.0;
    for (std::size_t p = 0; p < field.grid.size(); ++p) {
        cplx s{};
        for (int j = 0; j < params.modes; ++j) s += std::conj(eta(j)) * r.physical.components[j][p];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

SolveResult petviashvili_solve(const ComplexField& initial, double omega, const CmeParameters& params,
                               const PetviashviliOptions& options) {
    check_field(initial, params);
    const Grid& grid = initial.grid;
    const int modes = params.modes;
    const std::size_t size = grid.size();
    const FieldTransform ft(grid);
    SolveDiagnostics diag;

    // Per-slot operator M(k) = L(ik) - omega, its LU factors and spectral distance to zero.
    std::vector<Eigen::MatrixXcd> m_op(size);
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> m_lu(size);
    std::vector<double> m_gap(size);
    std::vector<char> keep(size, 1);
    parallel_for(size, [&](std::size_t p) {
        m_op[p] = shifted_symbol(params, grid.wavevector(p), omega);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m_op[p], Eigen::EigenvaluesOnly);
        m_gap[p] = eig.eigenvalues().cwiseAbs().minCoeff();
        m_lu[p].compute(m_op[p]);
        if (grid.is_nyquist(p)) keep[p] = 0;
        if (options.dealias_two_thirds) {
            const auto idx = grid.axis_indices(p);
            for (int i = 0; i < grid.dim; ++i) {
                const int n = grid.points[i];
                const int m = idx[static_cast<std::size_t>(i)];
                const int mm = m < (n + 1) / 2 ? m : n - m;
                if (3 * mm > n) keep[p] = 0;
            }
        }
    });
    diag.min_symbol_gap = *std::min_element(m_gap.begin(), m_gap.end());
    if (diag.min_symbol_gap < 1e-8)
        throw SolveError(ErrorCode::NotInGap,
                         "L(ik) - omega is (nearly) singular on the lattice: min |eigenvalue| = " +
                             std::to_string(diag.min_symbol_gap),
                         diag);

    ComplexField b = initial;
    ComplexField b_hat = ft.forward(b);
    double first_residual = -1.0;
    std::vector<double> num_slot(size), den_slot(size);

    for (int it = 0; it <= options.max_iter; ++it) {
        auto n_hat = pointwise_nonlinearity(b, params);
        for (auto& c : n_hat) ft.forward_in_place(c);
        for (std::size_t p = 0; p < size; ++p)
            if (!keep[p])
                for (int j = 0; j < modes; ++j) n_hat[j][p] = 0.0;

        parallel_blocks(size, kBlock, [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXcd bv(modes), mb(modes);
            for (std::size_t p = begin; p < end; ++p) {
                cplx den{};
                for (int j = 0; j < modes; ++j) {
                    bv(j) = b_hat.components[j][p];
                    den += std::conj(bv(j)) * n_hat[j][p];
                }
                mb.noalias() = m_op[p] * bv;
                num_slot[p] = bv.dot(mb).real();
                den_slot[p] = den.real();
            }
        });
        const double num = std::accumulate(num_slot.begin(), num_slot.end(), 0.0);
        const double den = std::accumulate(den_slot.begin(), den_slot.end(), 0.0);

        const auto res = residual_from_spectra(b_hat, n_hat, omega, params, ft);
        const double res_sup = res.physical.sup_norm();
        diag.residual_sup_history.push_back(res_sup);
        diag.residual_l2_history.push_back(res.l2);
        diag.iterations = it;
        diag.final_residual = res_sup;

        double n_norm = 0.0, b_norm = 0.0;
        for (int j = 0; j < modes; ++j)
            for (std::size_t p = 0; p < size; ++p) {
                n_norm += std::norm(n_hat[j][p]);
                b_norm += std::norm(b_hat.components[j][p]);
            }
        if (std::abs(den) <= 1e-14 * std::sqrt(n_norm * b_norm) || den == 0.0)
            throw SolveError(ErrorCode::ZeroDenominator, "<N(B)^, B^> vanishes; stabilisation factor undefined",
                             diag);
        const double s = num / den;
        diag.stabilization = s;
        diag.stabilization_history.push_back(s);

        if (!std::isfinite(s) || !std::isfinite(res_sup))
            throw SolveError(ErrorCode::Diverged, "non-finite iterate", diag);
        if (first_residual < 0.0) first_residual = res_sup;
        if (res_sup > 1e6 * first_residual)
            throw SolveError(ErrorCode::Diverged, "residual grew by more than 1e6", diag);
        if (std::abs(s - 1.0) <= options.stabilization_tol && res_sup <= options.tol * b.sup_norm()) {
            diag.converged = true;
            return {std::move(b), std::move(diag)};
        }
        if (it == options.max_iter) break;
        if (s <= 0.0)
            throw SolveError(ErrorCode::Diverged,
                             "stabilisation factor " + std::to_string(s) + " <= 0: no focusing fixed point", diag);

        const double factor = std::pow(s, 1.5);
        const double theta = options.relax;
        parallel_blocks(size, kBlock, [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXcd nv(modes), next(modes);
            for (std::size_t p = begin; p < end; ++p) {
                for (int j = 0; j < modes; ++j) nv(j) = n_hat[j][p];
                next = m_lu[p].solve(nv);
                for (int j = 0; j < modes; ++j) {
                    cplx& slot = b_hat.components[j][p];
                    slot = (1.0 - theta) * slot + theta * factor * next(j);
                }
            }
        });
        b = ft.inverse(b_hat);
    }
    throw SolveError(ErrorCode::Diverged,
                     "no convergence within " + std::to_string(options.max_iter) + " iterations (|S-1| = " +
                         std::to_string(std::abs(diag.stabilization - 1.0)) +
                         ", residual = " + std::to_string(diag.final_residual) + ")",
                     diag);
}

ComplexField shift_cells(const ComplexField& field, const std::vector<int>& cells) {
    const Grid& g = field.grid;
    if (static_cast<int>(cells.size()) != g.dim) throw Error(ErrorCode::DimensionMismatch, "shift has wrong rank");
    ComplexField out(g, field.modes());
    for (std::size_t p = 0; p < g.size(); ++p) {
        auto idx = g.axis_indices(p);
        std::size_t q = 0;
        for (int i = 0; i < g.dim; ++i) {
            const int n = g.points[i];
            const int m = ((idx[static_cast<std::size_t>(i)] + cells[static_cast<std::size_t>(i)]) % n + n) % n;
            q = q * static_cast<std::size_t>(n) + static_cast<std::size_t>(m);
        }
        for (int j = 0; j < field.modes(); ++j) out.components[j][q] = field.components[j][p];
    }
    return out;
}

}  // namespace gapsol
