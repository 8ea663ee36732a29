#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gapsol {

using cplx = std::complex<double>;

/// One nonzero cubic coefficient gamma_j^{(m,n,o)}, stored with 0-based indices.
/// The term contributes value * A_m * conj(A_n) * A_o to component j.
struct GammaEntry {
    int j = 0;
    int m = 0;
    int n = 0;
    int o = 0;
    cplx value{};

    bool operator==(const GammaEntry&) const = default;
};

/// Data of a first-order coupled-mode system
///   i (dA_j/dt + v_j . grad A_j) + sum_r kappa_jr A_r + N_j(A) = 0,  j = 1..N.
/// Treat as immutable once it has passed validate().
struct CmeParameters {
    int dim = 0;
    int modes = 0;
    std::vector<Eigen::VectorXd> velocities;
    Eigen::MatrixXcd kappa;
    std::vector<GammaEntry> gamma;

    bool operator==(const CmeParameters& other) const;
};

/// Checks the standing assumptions (Hermitian kappa, consistent shapes, gamma
/// indices in range) and returns the parameters unchanged. Throws gapsol::Error.
CmeParameters validate(CmeParameters raw);

/// Largest entry of |kappa - kappa^*|, relative to max |kappa_jr| (0 for kappa = 0).
double hermiticity_defect(const Eigen::MatrixXcd& kappa);

/// Cubic nonlinearity N(A) evaluated pointwise.
Eigen::VectorXcd nonlinearity(const CmeParameters& params, const Eigen::VectorXcd& a);

/// Allocation-free variant used by the field solvers; `out` is overwritten.
void nonlinearity(std::span<const GammaEntry> gamma, std::span<const cplx> a, std::span<cplx> out);

/// Copy of `params` with every gamma coefficient negated (N -> -N).
CmeParameters negate_nonlinearity(const CmeParameters& params);

/// Four-mode, two-dimensional system with the symmetric coupling pattern
///   v_1 = -v_2 = v, v_3 = -v_4 = w,
///   kappa_12 = kappa_34 = a1, kappa_14 = kappa_32 = a2, kappa_13 = kappa_42 = a3,
/// Hermitian completion, and the symmetric cubic coefficients (all listed slots = 1).
CmeParameters build_symmetric_example(const Eigen::VectorXd& v, const Eigen::VectorXd& w, cplx a1, cplx a2,
                                      cplx a3);

/// Two-mode one-dimensional system v = (+s, -s), kappa_12 = kappa, no nonlinearity unless given.
CmeParameters build_two_mode_1d(cplx kappa, double speed = 1.0, double cubic = 0.0);

/// Configuration file (TOML subset). Indices in the file are 1-based.
CmeParameters load_config(const std::filesystem::path& path);
CmeParameters parse_config(const std::string& text);
void save_config(const CmeParameters& params, const std::filesystem::path& path);
std::string format_config(const CmeParameters& params);

}  // namespace gapsol
