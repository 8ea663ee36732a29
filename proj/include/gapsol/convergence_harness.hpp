#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapsol/band_structure.hpp"
#include "gapsol/cme_model.hpp"
#include "gapsol/effective_nls.hpp"
#include "gapsol/gap_soliton_solver.hpp"

namespace gapsol {

struct SlopeFit {
    double slope = 0.0;
    double log_c = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares for log E = slope * log eps + log_c. Throws InsufficientData.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points);

struct StudyOptions {
    double omega1 = 1.0;
    bool flip_nonlinearity = false;
    EdgeSide side = EdgeSide::Lower;
    int grid_points = 160;
    double box_mult = 3.0;
    PetviashviliOptions solver;
    double ground_state_tol = 1e-10;
    std::optional<double> band_box;   // default: default_band_box(params)
    std::optional<int> band_points;   // default: default_points_per_axis(d)
    std::vector<double> keep_fields;  // eps values whose B and B_app are kept for export
    bool concurrent = true;
};

/// The study sweep used when nothing else is requested, and the extended one.
std::vector<double> default_eps_list();
std::vector<double> full_eps_list();

struct EpsRecord {
    double eps = 0.0;
    double omega = 0.0;
    double error_sup = 0.0;        // max over grid and components of |B - B_app|
    double residual_final = 0.0;   // stationary residual sup norm of B
    double ansatz_residual = 0.0;  // stationary residual sup norm of B_app
    int iterations = 0;
    double im_part_sup = 0.0;
    double stabilization = 0.0;
    bool converged = false;
    bool domain_too_small = false;
    std::string failure;  // empty when the run succeeded
};

struct FieldSnapshot {
    double eps = 0.0;
    ComplexField solution;
    ComplexField ansatz;
};

struct ConvergenceReport {
    std::vector<EpsRecord> records;
    std::optional<SlopeFit> fit;  // absent with < 2 converged records or any failure
    bool partial = false;         // some eps failed; see records[i].failure
    std::string fit_note;

    // Metadata.
    std::uint64_t model_hash = 0;
    bool sign_flip_applied = false;
    double omega1 = 0.0;
    int grid_points = 0;
    double box_mult = 0.0;
    PetviashviliOptions solver;
    SpectralEdge edge;
    EffectiveNls nls;
    Canonicalization canonical;
    double u0 = 0.0;

    std::vector<FieldSnapshot> fields;
};

/// FNV-1a hash of the canonical config text.
std::uint64_t model_hash(const CmeParameters& params);

/// End-to-end pipeline for each eps: grid, ansatz, Petviashvili solve, error E(eps), then the fit.
/// With flip_nonlinearity the CME nonlinearity is negated (so Gamma -> -Gamma) for every stage.
ConvergenceReport run_convergence_study(const CmeParameters& params, const std::vector<double>& eps_list,
                                        const StudyOptions& options = {});

/// Writes convergence.csv, convergence.json, loglog.dat and field_eps<val>.csv for kept fields.
void export_report(const ConvergenceReport& report, const std::filesystem::path& directory);

std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);
std::string loglog_data(const ConvergenceReport& report);
std::string field_slice_csv(const FieldSnapshot& snapshot, int component = 0);

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_exact(double x);

}  // namespace gapsol
