#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gapsol/band_structure.hpp"
#include "gapsol/cme_model.hpp"
#include "gapsol/effective_nls.hpp"
#include "gapsol/error.hpp"
#include "gapsol/fft.hpp"

namespace gapsol {

/// Uniform periodic grid on prod_i [-L_i, L_i), n_i points per axis, row-major (last axis fastest).
struct Grid {
    int dim = 0;
    std::vector<double> half_extent;
    std::vector<int> points;

    double spacing(int axis) const { return 2.0 * half_extent[axis] / points[axis]; }
    double cell_volume() const;
    std::size_t size() const;
    std::vector<double> wavenumbers(int axis) const;
    /// Physical coordinates of flat index p.
    Eigen::VectorXd coordinate(std::size_t p) const;
    /// Wavevector of flat spectral index p (FFT ordering).
    Eigen::VectorXd wavevector(std::size_t p) const;
    /// True if any axis index of p is the Nyquist index n_i / 2.
    bool is_nyquist(std::size_t p) const;
    std::vector<int> axis_indices(std::size_t p) const;
};

/// Grid on [-box_mult/eps, box_mult/eps)^dim with n points per axis. n must be even and >= 8.
Grid make_grid(double eps, double box_mult = 3.0, int n = 160, int dim = 2);
Grid make_grid(std::vector<double> half_extent, std::vector<int> points);

/// N complex components sampled on a grid (physical space or spectral space, see FieldTransform).
struct ComplexField {
    Grid grid;
    std::vector<std::vector<cplx>> components;

    ComplexField() = default;
    ComplexField(Grid g, int modes);

    int modes() const { return static_cast<int>(components.size()); }
    double sup_norm() const;
    double sup_imag() const;
};

/// Unitary discrete Fourier transform on a grid: forward = n^{-1/2} sum_x f(x) e^{-ik.(x - x_0)}.
class FieldTransform {
public:
    explicit FieldTransform(const Grid& grid);

    ComplexField forward(const ComplexField& field) const;
    ComplexField inverse(const ComplexField& spectral) const;
    void forward_in_place(std::vector<cplx>& data) const;
    void inverse_in_place(std::vector<cplx>& data) const;

private:
    std::shared_ptr<const FftPlan> plan_;
    double scale_;
};

ComplexField transform(const ComplexField& field);
ComplexField inverse_transform(const ComplexField& spectral);

/// Samples eps C(eps x) e^{i k0.x} eta.
struct Ansatz {
    ComplexField field;
    double boundary_ratio = 0.0;      // max |C| on the box boundary / C(0)
    bool domain_too_small = false;    // warning: boundary_ratio > 1e-6
};

Ansatz build_ansatz(double eps, const SpectralEdge& edge, const RadialProfile& envelope, const Grid& grid);

struct ResidualNorms {
    double sup = 0.0;
    double l2 = 0.0;  // continuous L2 norm approximated on the grid
};

/// Norms of  omega B - L(grad) B + N(B)  evaluated pseudospectrally.
ResidualNorms stationary_residual(const ComplexField& field, double omega, const CmeParameters& params);

/// Sup norm of the component of the residual along eta (eta^* r), a diagnostic.
double projected_residual_sup(const ComplexField& field, double omega, const CmeParameters& params,
                              const Eigen::VectorXcd& eta);

struct PetviashviliOptions {
    double tol = 1e-10;  // on sup residual, relative to sup |B|
    double stabilization_tol = 1e-10;
    int max_iter = 500;
    double relax = 1.0;
    bool dealias_two_thirds = false;
};

struct SolveDiagnostics {
    int iterations = 0;
    double stabilization = 0.0;
    std::vector<double> stabilization_history;
    std::vector<double> residual_sup_history;
    std::vector<double> residual_l2_history;
    double final_residual = 0.0;
    double min_symbol_gap = 0.0;  // min over lattice of the smallest |eigenvalue| of L(ik) - omega
    bool converged = false;
};

struct SolveResult {
    ComplexField solution;
    SolveDiagnostics diagnostics;
};

/// Error raised by the iteration itself; carries the diagnostics gathered so far.
class SolveError : public Error {
public:
    SolveError(ErrorCode code, const std::string& what, SolveDiagnostics diag)
        : Error(code, what), diagnostics_(std::move(diag)) {}
    const SolveDiagnostics& diagnostics() const { return diagnostics_; }

private:
    SolveDiagnostics diagnostics_;
};

/// Fixed-point iteration  B_{n+1}^ = S_n^{3/2} M(k)^{-1} N(B_n)^,  M(k) = L(ik) - omega,
/// S_n = Re<M B_n^, B_n^> / Re<N(B_n)^, B_n^>. Throws SolveError (NotInGap, ZeroDenominator, Diverged).
SolveResult petviashvili_solve(const ComplexField& initial, double omega, const CmeParameters& params,
                               const PetviashviliOptions& options = {});

/// Shift a field by whole grid cells along each axis (periodic).
ComplexField shift_cells(const ComplexField& field, const std::vector<int>& cells);

}  // namespace gapsol
