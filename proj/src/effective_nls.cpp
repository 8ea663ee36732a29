#include "gapsol/effective_nls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gapsol/error.hpp"
#include "gapsol/fft.hpp"

namespace gapsol {

EffectiveNls effective_coefficients(const SpectralEdge& edge, const CmeParameters& params, double omega1_magnitude,
                                    bool flip_nonlinearity) {
    if (edge.eta.size() != params.modes)
        throw Error(ErrorCode::DimensionMismatch, "edge eigenvector does not match the model");
    if (edge.k0.size() != params.dim) throw Error(ErrorCode::DimensionMismatch, "edge wavevector does not match the model");
    const Eigen::VectorXcd eta = edge.eta.normalized();
    return effective_coefficients(edge, eta.dot(nonlinearity(params, eta)), omega1_magnitude, flip_nonlinearity);
}

EffectiveNls effective_coefficients(const SpectralEdge& edge, cplx gamma, double omega1_magnitude,
                                    bool flip_nonlinearity) {
    EffectiveNls nls;
    nls.dim = static_cast<int>(edge.k0.size());
    nls.side = edge.side;
    nls.G0 = edge.G0;
    const double magnitude = std::abs(omega1_magnitude);
    nls.omega1 = edge.side == EdgeSide::Lower ? magnitude : -magnitude;
    nls.gamma = gamma;
    if (flip_nonlinearity) {
        nls.gamma = -nls.gamma;
        nls.sign_flip_applied = true;
    }
    return nls;
}

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct Definiteness {
    int sign = 0;  // 0 when indefinite or singular
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Definiteness classify(const Eigen::MatrixXd& g0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g0 + g0.transpose()));
    Definiteness out{0, eig.eigenvalues(), eig.eigenvectors()};
    const double scale = out.values.cwiseAbs().maxCoeff();
    if (scale == 0.0) return out;
    const bool positive = (out.values.array() > 1e-12 * scale).all();
    const bool negative = (out.values.array() < -1e-12 * scale).all();
    out.sign = positive ? 1 : (negative ? -1 : 0);
    return out;
}

}  // namespace

std::array<int, 3> integral_identity_signs(const EffectiveNls& nls) {
    const Definiteness def = classify(nls.G0);
    return {sign_of(nls.omega1), -def.sign, sign_of(nls.gamma.real())};
}

Canonicalization canonicalize(const EffectiveNls& nls) {
    if (nls.G0.rows() != nls.dim || nls.G0.cols() != nls.dim)
        throw Error(ErrorCode::DimensionMismatch, "G0 must be d x d");
    const Definiteness def = classify(nls.G0);
    if (def.sign == 0) throw Error(ErrorCode::AnisotropicIndefinite, "G0 is not definite");
    const double gamma = nls.gamma.real();
    if (std::abs(nls.gamma.imag()) > 1e-10 * std::abs(nls.gamma))
        throw Error(ErrorCode::InvalidArgument, "Gamma has a non-negligible imaginary part");
    if (gamma == 0.0) throw Error(ErrorCode::NoRealGroundState, "Gamma = 0: the envelope equation is linear");
    if (nls.omega1 == 0.0) throw Error(ErrorCode::NoRealGroundState, "omega1 = 0 admits no decaying solution");

    const auto signs = integral_identity_signs(nls);
    if (signs[0] == signs[1] && signs[1] == signs[2])
        throw Error(ErrorCode::NoRealGroundState,
                    "omega1 |C|^2 - <grad C, G0 grad C> + Gamma |C|^4 has terms of one sign; "
                    "no nonzero real decaying solution (omega1 = " + std::to_string(nls.omega1) +
                        ", Gamma = " + std::to_string(gamma) + ")");
    if (def.sign != -sign_of(nls.omega1))
        throw Error(ErrorCode::NoRealGroundState,
                    "sign(G0) = sign(omega1): the linear part does not produce exponential decay");

    // y = S x with S G0 S^T = -omega1 I, and C = a u(|y|).
    Canonicalization c;
    const double w = std::abs(nls.omega1);
    const Eigen::VectorXd inv_sqrt = def.values.cwiseAbs().cwiseSqrt().cwiseInverse();
    c.coordinate_map = std::sqrt(w) * inv_sqrt.asDiagonal() * def.vectors.transpose();
    c.amplitude = std::sqrt(-nls.omega1 / gamma);
    c.length = std::pow(std::abs(c.coordinate_map.determinant()), 1.0 / nls.dim);
    const double gmax = def.values.cwiseAbs().maxCoeff();
    const double gmin = def.values.cwiseAbs().minCoeff();
    c.isotropic = gmax - gmin <= 1e-6 * gmax;  // finite-difference Hessians carry ~1e-8 noise
    if (c.isotropic) c.coordinate_map = c.length * Eigen::MatrixXd::Identity(nls.dim, nls.dim);
    c.focusing = true;
    return c;
}

RadialProfile with_scaling(RadialProfile profile, const Canonicalization& canon) {
    profile.scale_amp = canon.amplitude;
    profile.scale_len = canon.length;
    profile.coordinate_map = canon.coordinate_map;
    return profile;
}

double canonical_value(const RadialProfile& profile, double s) {
    s = std::abs(s);
    const double rmax = profile.r_max();
    if (s >= rmax) return profile.u.back() * std::exp(-profile.decay_rate * (s - rmax));
    const double h = rmax / static_cast<double>(profile.r.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(s / h), profile.r.size() - 2);
    const double t = (s - profile.r[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * profile.u[i] + h10 * h * profile.du[i] + h01 * profile.u[i + 1] + h11 * h * profile.du[i + 1];
}

double evaluate_envelope(const RadialProfile& profile, const Eigen::VectorXd& x) {
    const double s = profile.coordinate_map.size() ? (profile.coordinate_map * x).norm() : profile.scale_len * x.norm();
    return profile.scale_amp * canonical_value(profile, s);
}

std::vector<double> evaluate_envelope(const RadialProfile& profile, const std::vector<Eigen::VectorXd>& points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(evaluate_envelope(profile, x));
    return out;
}

double fourier_moment(const PointFunction& f, int dim, double half_extent, int n, int s) {
    if (dim < 1 || n < 2 || !(half_extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad moment grid");
    if (s < 0 || s > 4) throw Error(ErrorCode::InvalidArgument, "moment order must be in 0..4");
    FftPlan plan(std::vector<int>(static_cast<std::size_t>(dim), n));
    const double dx = 2.0 * half_extent / n;
    std::vector<std::complex<double>> data(plan.size());
    Eigen::VectorXd x(dim);
    for (std::size_t p = 0; p < data.size(); ++p) {
        std::size_t rem = p;
        for (int i = dim - 1; i >= 0; --i) {
            x(i) = -half_extent + dx * static_cast<double>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        data[p] = f(x);
    }
    plan.forward(data);
    const auto k = fft_wavenumbers(n, 2.0 * half_extent);
    const double transform_scale = std::pow(dx / std::sqrt(2.0 * std::numbers::pi), dim);
    const double dk = std::pow(std::numbers::pi / half_extent, dim);
    double total = 0.0;
    for (std::size_t p = 0; p < data.size(); ++p) {
        std::size_t rem = p;
        double k2 = 0.0;
        for (int i = dim - 1; i >= 0; --i) {
            const double ki = k[rem % static_cast<std::size_t>(n)];
            rem /= static_cast<std::size_t>(n);
            k2 += ki * ki;
        }
        total += std::pow(1.0 + std::sqrt(k2), s) * std::abs(data[p]) * transform_scale;
    }
    return total * dk;
}

int default_moment_points(int dim) {
    switch (dim) {
        case 1: return 1024;
        case 2: return 128;
        default: return 48;
    }
}

MomentEstimate decay_moments(const PointFunction& f, int dim, double half_extent, int s) {
    const int n = default_moment_points(dim);
    MomentEstimate m;
    m.order = s;
    m.coarse_value = fourier_moment(f, dim, half_extent, n, s);
    m.value = fourier_moment(f, dim, half_extent, 2 * n, s);
    const double denom = std::max(std::abs(m.value), std::abs(m.coarse_value));
    m.relative_change = denom > 0.0 ? std::abs(m.value - m.coarse_value) / denom : 0.0;
    if (m.relative_change > 0.1)
        throw Error(ErrorCode::NonConvergentMoment, "moment s=" + std::to_string(s) + " changed by " +
                                                        std::to_string(100.0 * m.relative_change) +
                                                        "% under refinement");
    m.certified = m.relative_change <= 0.01;
    return m;
}

MomentEstimate decay_moments(const RadialProfile& profile, int s) {
    // The box must contain the whole sampled profile along the least stretched direction.
    double stretch = profile.scale_len;
    if (profile.coordinate_map.size()) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(profile.coordinate_map);
        stretch = svd.singularValues().minCoeff();
    }
    const double half_extent = profile.r_max() / stretch;
    return decay_moments([&](const Eigen::VectorXd& x) { return evaluate_envelope(profile, x); }, profile.dim,
                         half_extent, s);
}

}  // namespace gapsol
