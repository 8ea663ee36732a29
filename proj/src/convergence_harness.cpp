#include "gapsol/convergence_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "gapsol/error.hpp"
#include "gapsol/json_io.hpp"

namespace gapsol {

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two points for a slope");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::InsufficientData, "all abscissae coincide");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.log_c = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double e = y - (fit.slope * x + fit.log_c);
        ss_res += e * e;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::vector<double> default_eps_list() { return {0.2, 0.1, 0.05, 0.025}; }
std::vector<double> full_eps_list() { return {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625}; }

std::uint64_t model_hash(const CmeParameters& params) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : format_config(params)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

struct EpsOutcome {
    EpsRecord record;
    std::optional<FieldSnapshot> snapshot;
};

EpsOutcome run_one(double eps, const CmeParameters& solve_params, const SpectralEdge& edge, const EffectiveNls& nls,
                   const RadialProfile& profile, const StudyOptions& options) {
    EpsOutcome out;
    EpsRecord& rec = out.record;
    rec.eps = eps;
    rec.omega = edge.omega0 + eps * eps * nls.omega1;
    try {
        const Grid grid = make_grid(eps, options.box_mult, options.grid_points, solve_params.dim);
        const Ansatz ansatz = build_ansatz(eps, edge, profile, grid);
        rec.domain_too_small = ansatz.domain_too_small;
        rec.ansatz_residual = stationary_residual(ansatz.field, rec.omega, solve_params).sup;
        SolveResult solved = petviashvili_solve(ansatz.field, rec.omega, solve_params, options.solver);
        rec.iterations = solved.diagnostics.iterations;
        rec.stabilization = solved.diagnostics.stabilization;
        rec.converged = solved.diagnostics.converged;
        rec.residual_final = stationary_residual(solved.solution, rec.omega, solve_params).sup;
        rec.im_part_sup = solved.solution.sup_imag();
        double err = 0.0;
        for (int j = 0; j < solved.solution.modes(); ++j)
            for (std::size_t p = 0; p < grid.size(); ++p)
                err = std::max(err, std::abs(solved.solution.components[j][p] - ansatz.field.components[j][p]));
        rec.error_sup = err;
        const bool keep = std::any_of(options.keep_fields.begin(), options.keep_fields.end(),
                                      [&](double e) { return std::abs(e - eps) <= 1e-12 * eps; });
        if (keep) out.snapshot = FieldSnapshot{eps, std::move(solved.solution), ansatz.field};
    } catch (const SolveError& e) {
        rec.iterations = e.diagnostics().iterations;
        rec.stabilization = e.diagnostics().stabilization;
        rec.failure = e.what();
    } catch (const Error& e) {
        rec.failure = e.what();
    }
    return out;
}

}  // namespace

ConvergenceReport run_convergence_study(const CmeParameters& params, const std::vector<double>& eps_list,
                                        const StudyOptions& options) {
    if (eps_list.empty()) throw Error(ErrorCode::InvalidArgument, "empty eps list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "eps values must be strictly decreasing");
    }

    ConvergenceReport report;
    report.model_hash = model_hash(params);
    report.sign_flip_applied = options.flip_nonlinearity;
    report.grid_points = options.grid_points;
    report.box_mult = options.box_mult;
    report.solver = options.solver;

    const CmeParameters solve_params = options.flip_nonlinearity ? negate_nonlinearity(params) : params;
    const BandStructure bands =
        sample_bands(params, options.band_box.value_or(default_band_box(params)),
                     options.band_points.value_or(default_points_per_axis(params.dim)));
    const auto gap = find_gap(bands);
    if (!gap) throw Error(ErrorCode::NoGap, "no spectral gap found on the sampled box");
    report.edge = locate_edge(params, bands, *gap, options.side);
    report.nls = effective_coefficients(report.edge, params, options.omega1, options.flip_nonlinearity);
    report.omega1 = report.nls.omega1;
    report.canonical = canonicalize(report.nls);
    const RadialProfile profile =
        with_scaling(solve_ground_state_radial(params.dim, options.ground_state_tol), report.canonical);
    report.u0 = profile.u0;

    std::vector<EpsOutcome> outcomes(eps_list.size());
    if (options.concurrent) {
        std::vector<std::future<EpsOutcome>> jobs;
        for (double eps : eps_list)
            jobs.push_back(std::async(std::launch::async, run_one, eps, std::cref(solve_params),
                                      std::cref(report.edge), std::cref(report.nls), std::cref(profile),
                                      std::cref(options)));
        for (std::size_t i = 0; i < jobs.size(); ++i) outcomes[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < eps_list.size(); ++i)
            outcomes[i] = run_one(eps_list[i], solve_params, report.edge, report.nls, profile, options);
    }

    std::vector<std::pair<double, double>> points;
    for (auto& o : outcomes) {
        if (!o.record.failure.empty() || !o.record.converged) report.partial = true;
        else points.emplace_back(std::log(o.record.eps), std::log(o.record.error_sup));
        report.records.push_back(o.record);
        if (o.snapshot) report.fields.push_back(std::move(*o.snapshot));
    }
    if (report.partial)
        report.fit_note = "fit skipped: at least one eps run failed";
    else if (points.size() < 2)
        report.fit_note = "fit undefined: fewer than two eps values";
    else
        report.fit = fit_slope(points);
    return report;
}

std::string report_csv(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "eps,E,residual,iterations,im_sup,omega,ansatz_residual,converged\n";
    for (const auto& r : report.records) {
        out << format_exact(r.eps) << ',' << format_exact(r.error_sup) << ',' << format_exact(r.residual_final) << ','
            << r.iterations << ',' << format_exact(r.im_part_sup) << ',' << format_exact(r.omega) << ','
            << format_exact(r.ansatz_residual) << ',' << (r.converged ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string report_json(const ConvergenceReport& report) {
    using nlohmann::json;
    json records = json::array();
    for (const auto& r : report.records) {
        json jr{
            {"eps", r.eps},
            {"omega", r.omega},
            {"E_sup", r.error_sup},
            {"residual_final", r.residual_final},
            {"ansatz_residual", r.ansatz_residual},
            {"iterations", r.iterations},
            {"im_part_sup", r.im_part_sup},
            {"stabilization", r.stabilization},
            {"converged", r.converged},
            {"domain_too_small", r.domain_too_small},
        };
        if (!r.failure.empty()) jr["failure"] = r.failure;
        records.push_back(jr);
    }
    json fit = nullptr;
    if (report.fit) fit = json{{"slope", report.fit->slope}, {"log_c", report.fit->log_c}, {"r_squared", report.fit->r_squared}};
    json j{
        {"records", records},
        {"fit", fit},
        {"partial", report.partial},
        {"metadata",
         {
             {"model_hash", report.model_hash},
             {"sign_flip_applied", report.sign_flip_applied},
             {"omega1", report.omega1},
             {"grid_points", report.grid_points},
             {"box_mult", report.box_mult},
             {"solver",
              {{"tol", report.solver.tol},
               {"stabilization_tol", report.solver.stabilization_tol},
               {"max_iter", report.solver.max_iter},
               {"relax", report.solver.relax},
               {"dealias_two_thirds", report.solver.dealias_two_thirds}}},
             {"edge", edge_to_json(report.edge)},
             {"nls", nls_to_json(report.nls)},
             {"canonical", canonical_to_json(report.canonical)},
             {"u0", report.u0},
         }},
    };
    if (!report.fit_note.empty()) j["fit_note"] = report.fit_note;
    return j.dump(2);
}

std::string loglog_data(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "# eps E fit   (plot with: set logscale xy; plot 'loglog.dat' u 1:2 w lp, '' u 1:3 w l)\n";
    if (report.fit)
        out << "# slope " << format_exact(report.fit->slope) << " log_c " << format_exact(report.fit->log_c) << " r2 "
            << format_exact(report.fit->r_squared) << '\n';
    for (const auto& r : report.records) {
        if (!r.failure.empty()) continue;
        const double fitted = report.fit ? std::exp(report.fit->log_c + report.fit->slope * std::log(r.eps)) : NAN;
        out << format_exact(r.eps) << ' ' << format_exact(r.error_sup) << ' ' << format_exact(fitted) << '\n';
    }
    return out.str();
}

std::string field_slice_csv(const FieldSnapshot& snap, int component) {
    const Grid& g = snap.solution.grid;
    std::ostringstream out;
    out << "# eps " << format_exact(snap.eps) << " component " << component + 1 << " dim " << g.dim;
    for (int i = 0; i < g.dim; ++i) out << " n" << i + 1 << ' ' << g.points[i] << " L" << i + 1 << ' ' << format_exact(g.half_extent[i]);
    out << '\n';
    for (int i = 0; i < g.dim; ++i) out << 'x' << i + 1 << ',';
    out << "re_B,im_B,re_Bapp,im_Bapp\n";
    const auto& b = snap.solution.components[component];
    const auto& a = snap.ansatz.components[component];
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Eigen::VectorXd x = g.coordinate(p);
        for (int i = 0; i < g.dim; ++i) out << format_exact(x(i)) << ',';
        out << format_exact(b[p].real()) << ',' << format_exact(b[p].imag()) << ',' << format_exact(a[p].real()) << ','
            << format_exact(a[p].imag()) << '\n';
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace

void export_report(const ConvergenceReport& report, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + directory.string() + "': " + ec.message());
    write_file(directory / "convergence.csv", report_csv(report));
    write_file(directory / "convergence.json", report_json(report));
    write_file(directory / "loglog.dat", loglog_data(report));
    for (const auto& snap : report.fields) {
        char name[64];
        std::snprintf(name, sizeof name, "field_eps%g.csv", snap.eps);
        write_file(directory / name, field_slice_csv(snap));
    }
}

}  // namespace gapsol
