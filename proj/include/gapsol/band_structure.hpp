#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "gapsol/cme_model.hpp"

namespace gapsol {

/// Symbol L(ik) = diag(v_j . k) - kappa of the linear CME operator.
Eigen::MatrixXcd symbol(const CmeParameters& params, const Eigen::VectorXd& k);

struct HermitianEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // orthonormal columns
};

/// Dense Hermitian eigenproblem; throws ConvergenceFailure if the solver does not converge.
HermitianEigen eigen_decomposition(const Eigen::MatrixXcd& h);

/// Eigenvalues of L(ik), ascending.
Eigen::VectorXd band_values(const CmeParameters& params, const Eigen::VectorXd& k);

/// Bands sampled on the tensor grid [-box, box]^d, row-major (last axis fastest).
struct BandStructure {
    int dim = 0;
    int modes = 0;
    double box = 0.0;
    int points_per_axis = 0;
    Eigen::MatrixXd k_points;  // P x d
    Eigen::MatrixXd values;    // P x N, each row ascending
    Eigen::VectorXd band_min;
    Eigen::VectorXd band_max;

    double spacing() const { return 2.0 * box / (points_per_axis - 1); }
};

BandStructure sample_bands(const CmeParameters& params, double box, int points_per_axis);

/// Default sampling box 8 * max(max |v_j|, max |kappa_jr|) and resolution per dimension.
double default_band_box(const CmeParameters& params);
int default_points_per_axis(int dim);

/// Gap between sorted bands `lower_band` and `lower_band + 1` (0-based).
struct SpectralGap {
    int lower_band = 0;
    double alpha = 0.0;
    double beta = 0.0;
    Eigen::VectorXd k_alpha;  // where band lower_band attains alpha
    Eigen::VectorXd k_beta;   // where band lower_band + 1 attains beta
    bool refined = false;     // false: edges are grid maxima/minima only
};

/// First adjacent pair with max(lambda_j) < min(lambda_{j+1}) on the sampled grid.
std::optional<SpectralGap> find_gap(const BandStructure& bands);

/// Tightens both gap edges by local optimisation started from the grid extrema.
SpectralGap refine_gap(const CmeParameters& params, const SpectralGap& gap);

enum class EdgeSide { Lower, Upper };

std::string to_string(EdgeSide side);
EdgeSide parse_edge_side(const std::string& text);

struct SpectralEdge {
    int j0 = 0;  // 0-based band index
    Eigen::VectorXd k0;
    double omega0 = 0.0;
    Eigen::VectorXcd eta;  // unit norm, largest component real positive
    Eigen::MatrixXd G0;    // half Hessian of lambda_{j0} at k0
    double alpha = 0.0;
    double beta = 0.0;
    EdgeSide side = EdgeSide::Lower;
    double separation = 0.0;
    double gradient_norm = 0.0;
    double eigen_residual = 0.0;
};

struct EdgeOptions {
    double gradient_tol = 1e-9;
    int max_sweeps = 200;
    double degeneracy_tol = 1e-8;
};

/// Locates the isolated band extremum defining the chosen gap edge.
/// Throws NonIsolatedExtremum, DegenerateEigenvalue or ConvergenceFailure.
SpectralEdge locate_edge(const CmeParameters& params, const BandStructure& bands, const SpectralGap& gap,
                         EdgeSide side, const EdgeOptions& options = {});

/// Half of the Hessian of lambda_j at k (central differences, one Richardson step), symmetrised.
Eigen::MatrixXd hessian(const CmeParameters& params, int j0, const Eigen::VectorXd& k0);

/// Central-difference gradient of lambda_j.
Eigen::VectorXd band_gradient(const CmeParameters& params, int j, const Eigen::VectorXd& k, double step = 1e-6);

/// Fixes the global phase so that the first component of maximal modulus is real and positive.
Eigen::VectorXcd fix_phase(const Eigen::VectorXcd& v);

}  // namespace gapsol
