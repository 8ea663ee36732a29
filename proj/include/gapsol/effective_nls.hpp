#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gapsol/band_structure.hpp"
#include "gapsol/cme_model.hpp"

namespace gapsol {

/// Coefficients of the envelope equation  omega1 C + div(G0 grad C) + Gamma |C|^2 C = 0.
struct EffectiveNls {
    int dim = 0;
    double omega1 = 1.0;
    Eigen::MatrixXd G0;
    cplx gamma{};
    EdgeSide side = EdgeSide::Lower;
    bool sign_flip_applied = false;
};

/// Gamma = eta^* N(eta). The sign of omega1 is forced by the edge side (+ at the lower
/// edge, - at the upper edge); only its magnitude is taken from the caller.
/// With `flip_nonlinearity` Gamma is negated and the flag recorded.
EffectiveNls effective_coefficients(const SpectralEdge& edge, const CmeParameters& params,
                                    double omega1_magnitude = 1.0, bool flip_nonlinearity = false);
/// Same, from a precomputed (unflipped) Gamma.
EffectiveNls effective_coefficients(const SpectralEdge& edge, cplx gamma, double omega1_magnitude = 1.0,
                                    bool flip_nonlinearity = false);

/// Map from the envelope equation to  Delta u - u + u^3 = 0:
///   C(x) = amplitude * u(|coordinate_map * x|).
struct Canonicalization {
    double amplitude = 1.0;
    double length = 1.0;               // |det coordinate_map|^(1/d); the factor b when isotropic
    Eigen::MatrixXd coordinate_map;    // d x d
    bool isotropic = true;
    bool focusing = true;
};

/// Signs of the three terms of  omega1 |C|_2^2 - <grad C, G0 grad C> + Gamma |C|_4^4 = 0
/// for a nonzero real C (G0 must be definite). If all three agree there is no real solution.
std::array<int, 3> integral_identity_signs(const EffectiveNls& nls);

/// Throws AnisotropicIndefinite or NoRealGroundState.
Canonicalization canonicalize(const EffectiveNls& nls);

struct RadialOptions {
    double r_max = 20.0;
    int samples = 4000;
    int max_bisection = 200;
};

/// Radial envelope C(x) = scale_amp * u(|map * x|) built from the canonical ground state u.
struct RadialProfile {
    int dim = 0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    double u0 = 0.0;
    double decay_rate = 0.0;
    double match_radius = 0.0;  // beyond this the tail is the linearised (Bessel-type) solution
    int bisection_steps = 0;
    double scale_amp = 1.0;
    double scale_len = 1.0;
    Eigen::MatrixXd coordinate_map;

    double r_max() const { return r.back(); }
};

/// Ground state of  u'' + (d-1)/r u' - u + u^3 = 0,  u'(0) = 0,  u -> 0,  by shooting on u(0).
/// Throws BracketingFailure or ToleranceNotMet.
RadialProfile solve_ground_state_radial(int dim, double tol = 1e-10, const RadialOptions& options = {});

/// Max |u'' + (d-1)/r u' - u + u^3| at interior samples, using fourth-order differences of u.
double radial_ode_residual(const RadialProfile& profile);

/// Attaches the amplitude/length map from canonicalize().
RadialProfile with_scaling(RadialProfile profile, const Canonicalization& canon);

/// Canonical u at radius s >= 0 (cubic Hermite inside, fitted exponential tail outside).
double canonical_value(const RadialProfile& profile, double s);

double evaluate_envelope(const RadialProfile& profile, const Eigen::VectorXd& x);
std::vector<double> evaluate_envelope(const RadialProfile& profile, const std::vector<Eigen::VectorXd>& points);

using PointFunction = std::function<double(const Eigen::VectorXd&)>;

/// Discrete estimate of  int (1+|k|)^s |C^(k)| dk  with C^ = (2 pi)^(-d/2) int C(x) e^{-ik.x} dx,
/// from an n^d sampling of f on [-half_extent, half_extent)^d.
double fourier_moment(const PointFunction& f, int dim, double half_extent, int n, int s);

struct MomentEstimate {
    int order = 0;
    double value = 0.0;
    double coarse_value = 0.0;
    double relative_change = 0.0;
    bool certified = false;  // relative change <= 1% under resolution doubling
};

/// Moment of the scaled envelope; grid doubles once. Throws NonConvergentMoment above 10% change.
MomentEstimate decay_moments(const RadialProfile& profile, int s);
MomentEstimate decay_moments(const PointFunction& f, int dim, double half_extent, int s);

/// Default resolution per axis for moment estimates (doubled once for the refinement check).
int default_moment_points(int dim);

}  // namespace gapsol
