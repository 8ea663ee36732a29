// gapsol: command-line front end for the gap soliton toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapsol/band_structure.hpp"
#include "gapsol/cme_model.hpp"
#include "gapsol/convergence_harness.hpp"
#include "gapsol/effective_nls.hpp"
#include "gapsol/error.hpp"
#include "gapsol/gap_soliton_solver.hpp"
#include "gapsol/json_io.hpp"

using namespace gapsol;
using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

Eigen::VectorXd parse_vector(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

struct EdgeRequest {
    std::string side = "lower";
    double box = 0.0;
    int n = 0;
};

SpectralEdge compute_edge(const CmeParameters& params, const EdgeRequest& req) {
    const double box = req.box > 0.0 ? req.box : default_band_box(params);
    const int n = req.n > 0 ? req.n : default_points_per_axis(params.dim);
    const auto bands = sample_bands(params, box, n);
    const auto gap = find_gap(bands);
    if (!gap) throw Error(ErrorCode::NoGap, "no spectral gap on the sampled box");
    return locate_edge(params, bands, *gap, parse_edge_side(req.side));
}

std::string bands_csv(const BandStructure& bands) {
    std::ostringstream out;
    for (int i = 0; i < bands.dim; ++i) out << 'k' << i + 1 << ',';
    for (int j = 0; j < bands.modes; ++j) out << "lambda" << j + 1 << (j + 1 < bands.modes ? ',' : '\n');
    for (Eigen::Index p = 0; p < bands.k_points.rows(); ++p) {
        for (int i = 0; i < bands.dim; ++i) out << format_exact(bands.k_points(p, i)) << ',';
        for (int j = 0; j < bands.modes; ++j)
            out << format_exact(bands.values(p, j)) << (j + 1 < bands.modes ? ',' : '\n');
    }
    return out.str();
}

std::string field_csv(const ComplexField& b, double eps, double omega) {
    const Grid& g = b.grid;
    std::ostringstream out;
    out << "# eps " << format_exact(eps) << " omega " << format_exact(omega) << " dim " << g.dim << " modes "
        << b.modes();
    for (int i = 0; i < g.dim; ++i)
        out << " n" << i + 1 << ' ' << g.points[i] << " L" << i + 1 << ' ' << format_exact(g.half_extent[i]);
    out << '\n';
    for (int i = 0; i < g.dim; ++i) out << 'x' << i + 1 << ',';
    for (int j = 0; j < b.modes(); ++j)
        out << "re_B" << j + 1 << ",im_B" << j + 1 << (j + 1 < b.modes() ? ',' : '\n');
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto x = g.coordinate(p);
        for (int i = 0; i < g.dim; ++i) out << format_exact(x(i)) << ',';
        for (int j = 0; j < b.modes(); ++j)
            out << format_exact(b.components[j][p].real()) << ',' << format_exact(b.components[j][p].imag())
                << (j + 1 < b.modes() ? ',' : '\n');
    }
    return out.str();
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "bad eps value '" + item + "'");
        }
    }
    return out;
}

std::string swap_extension(const std::string& path, const std::string& ext) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ext;
    return path.substr(0, dot) + ext;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gap solitons of coupled-mode equations near a band edge"};
    app.require_subcommand(1);

    // model
    auto* model = app.add_subcommand("model", "Model files");
    model->require_subcommand(1);
    std::string validate_path;
    auto* validate = model->add_subcommand("validate", "Parse and check a model file");
    validate->add_option("file", validate_path)->required();

    double alpha1 = 2, alpha2 = 1, alpha3 = 1;
    std::string v_text = "0,1", w_text = "1,0", example_out;
    auto* example = model->add_subcommand("example", "Write the symmetric four-mode example");
    example->add_option("--alpha1", alpha1);
    example->add_option("--alpha2", alpha2);
    example->add_option("--alpha3", alpha3);
    example->add_option("--v", v_text, "velocity of modes 1,2 (comma separated)");
    example->add_option("--w", w_text, "velocity of modes 3,4 (comma separated)");
    example->add_option("-o,--output", example_out);

    // bands
    std::string bands_model, bands_out;
    double bands_box = 0;
    int bands_n = 0;
    auto* bands = app.add_subcommand("bands", "Sample the band structure");
    bands->add_option("model", bands_model)->required();
    bands->add_option("--box", bands_box, "half width of the k box (default from the model)");
    bands->add_option("--n", bands_n, "points per axis");
    bands->add_option("-o,--output", bands_out);

    // edge
    std::string edge_model, edge_out;
    EdgeRequest edge_req;
    auto* edge = app.add_subcommand("edge", "Locate the band edge of the first gap");
    edge->add_option("model", edge_model)->required();
    edge->add_option("--side", edge_req.side)->check(CLI::IsMember({"lower", "upper"}));
    edge->add_option("--box", edge_req.box);
    edge->add_option("--n", edge_req.n);
    edge->add_option("-o,--output", edge_out);

    // nls
    std::string nls_in, nls_out;
    double nls_omega1 = 1.0;
    bool nls_flip = false;
    double nls_tol = 1e-10;
    auto* nls = app.add_subcommand("nls", "Effective envelope equation and its ground state");
    nls->add_option("edge", nls_in, "edge JSON written by 'gapsol edge'")->required();
    nls->add_option("--omega1", nls_omega1);
    nls->add_flag("--flip-nonlinearity", nls_flip);
    nls->add_option("--tol", nls_tol, "shooting tolerance on u(0)");
    nls->add_option("-o,--output", nls_out);

    // solve
    std::string solve_model, solve_out;
    double solve_eps = 0.05, solve_omega1 = 1.0, solve_box_mult = 3.0;
    int solve_n = 160;
    bool solve_flip = false;
    PetviashviliOptions solve_opts;
    std::string solve_side = "lower";
    auto* solve = app.add_subcommand("solve", "Compute one gap soliton by Petviashvili iteration");
    solve->add_option("model", solve_model)->required();
    solve->add_option("--eps", solve_eps);
    solve->add_option("--omega1", solve_omega1);
    solve->add_flag("--flip-nonlinearity", solve_flip);
    solve->add_option("--n", solve_n);
    solve->add_option("--box-mult", solve_box_mult);
    solve->add_option("--relax", solve_opts.relax);
    solve->add_option("--tol", solve_opts.tol);
    solve->add_option("--max-iter", solve_opts.max_iter);
    solve->add_flag("--dealias", solve_opts.dealias_two_thirds, "apply the 2/3 rule to the nonlinear term");
    solve->add_option("--side", solve_side)->check(CLI::IsMember({"lower", "upper"}));
    solve->add_option("-o,--output", solve_out, "field CSV; diagnostics go next to it as .json")->required();

    // sweep
    std::string sweep_model, sweep_out = "report", sweep_eps = "0.2,0.1,0.05,0.025", sweep_fields = "0.05";
    StudyOptions sweep_opts;
    bool sweep_full = false, sweep_serial = false;
    std::string sweep_side = "lower";
    auto* sweep = app.add_subcommand("sweep", "Convergence study over a list of eps");
    sweep->add_option("model", sweep_model)->required();
    sweep->add_option("--eps", sweep_eps, "comma separated, strictly decreasing");
    sweep->add_option("--omega1", sweep_opts.omega1);
    sweep->add_flag("--flip-nonlinearity", sweep_opts.flip_nonlinearity);
    sweep->add_flag("--full-sweep", sweep_full, "use 0.2 ... 0.00625 (six values)");
    sweep->add_option("--n", sweep_opts.grid_points);
    sweep->add_option("--box-mult", sweep_opts.box_mult);
    sweep->add_option("--relax", sweep_opts.solver.relax);
    sweep->add_option("--fields", sweep_fields, "eps values whose fields are exported");
    sweep->add_flag("--serial", sweep_serial, "run the eps values one after another");
    sweep->add_option("--side", sweep_side)->check(CLI::IsMember({"lower", "upper"}));
    sweep->add_option("-o,--output", sweep_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const auto p = load_config(validate_path);
            std::cout << "ok: d=" << p.dim << " N=" << p.modes << " gamma entries=" << p.gamma.size()
                      << " hermiticity defect=" << hermiticity_defect(p.kappa) << '\n';
        } else if (example->parsed()) {
            const auto p = build_symmetric_example(parse_vector(v_text), parse_vector(w_text), alpha1, alpha2, alpha3);
            write_text(example_out, format_config(p));
        } else if (bands->parsed()) {
            const auto p = load_config(bands_model);
            const double box = bands_box > 0 ? bands_box : default_band_box(p);
            const int n = bands_n > 0 ? bands_n : default_points_per_axis(p.dim);
            const auto b = sample_bands(p, box, n);
            write_text(bands_out, bands_csv(b));
            if (const auto gap = find_gap(b))
                std::cerr << "gap between bands " << gap->lower_band + 1 << " and " << gap->lower_band + 2 << ": ("
                          << gap->alpha << ", " << gap->beta << ")\n";
            else
                std::cerr << "no gap on the sampled box\n";
        } else if (edge->parsed()) {
            const auto p = load_config(edge_model);
            const auto e = compute_edge(p, edge_req);
            json j = edge_to_json(e);
            const Eigen::VectorXcd eta = e.eta.normalized();
            j["Gamma"] = complex_to_json(eta.dot(nonlinearity(p, eta)));
            write_text(edge_out, j.dump(2) + "\n");
        } else if (nls->parsed()) {
            const json in = read_json(nls_in);
            SpectralEdge e;
            cplx gamma;
            try {
                e = edge_from_json(in);
                gamma = complex_from_json(in.at("Gamma"));
            } catch (const json::exception& ex) {
                throw Error(ErrorCode::ParseError, nls_in + ": " + ex.what());
            }
            const auto coeff = effective_coefficients(e, gamma, nls_omega1, nls_flip);
            json out{{"nls", nls_to_json(coeff)}};
            const auto canon = canonicalize(coeff);
            const auto profile = with_scaling(solve_ground_state_radial(coeff.dim, nls_tol), canon);
            out["canonical"] = canonical_to_json(canon);
            out["u0"] = profile.u0;
            out["C0"] = profile.scale_amp * profile.u0;
            out["decay_rate"] = profile.decay_rate;
            out["match_radius"] = profile.match_radius;
            out["ode_residual"] = radial_ode_residual(profile);
            json moments = json::array();
            for (int s = 0; s <= 4; ++s) {
                try {
                    const auto m = decay_moments(profile, s);
                    moments.push_back({{"s", s},
                                       {"value", m.value},
                                       {"relative_change", m.relative_change},
                                       {"certified", m.certified}});
                } catch (const Error& ex) {
                    moments.push_back({{"s", s}, {"error", ex.what()}});
                }
            }
            out["moments"] = moments;
            std::vector<double> r, u;
            for (std::size_t i = 0; i < profile.r.size(); i += 4) {
                r.push_back(profile.r[i]);
                u.push_back(profile.u[i]);
            }
            out["profile"] = {{"s", r}, {"u", u}, {"note", "C(x) = amplitude * u(|coordinate_map x|)"}};
            write_text(nls_out, out.dump(2) + "\n");
        } else if (solve->parsed()) {
            const auto p = load_config(solve_model);
            EdgeRequest req;
            req.side = solve_side;
            const auto e = compute_edge(p, req);
            const auto coeff = effective_coefficients(e, p, solve_omega1, solve_flip);
            const auto canon = canonicalize(coeff);
            const auto profile = with_scaling(solve_ground_state_radial(p.dim), canon);
            const CmeParameters sp = solve_flip ? negate_nonlinearity(p) : p;
            const double omega = e.omega0 + solve_eps * solve_eps * coeff.omega1;
            const Grid grid = make_grid(solve_eps, solve_box_mult, solve_n, p.dim);
            const Ansatz ansatz = build_ansatz(solve_eps, e, profile, grid);
            if (ansatz.domain_too_small)
                std::cerr << "warning: envelope is " << ansatz.boundary_ratio << " of its peak on the box boundary\n";
            json diag{{"eps", solve_eps},
                      {"omega", omega},
                      {"sign_flip_applied", solve_flip},
                      {"grid", {{"n", solve_n}, {"box_mult", solve_box_mult}, {"half_extent", grid.half_extent}}},
                      {"ansatz_boundary_ratio", ansatz.boundary_ratio},
                      {"ansatz_residual", stationary_residual(ansatz.field, omega, sp).sup}};
            try {
                const auto res = petviashvili_solve(ansatz.field, omega, sp, solve_opts);
                double err = 0.0;
                for (int j = 0; j < res.solution.modes(); ++j)
                    for (std::size_t q = 0; q < grid.size(); ++q)
                        err = std::max(err, std::abs(res.solution.components[j][q] - ansatz.field.components[j][q]));
                diag["diagnostics"] = diagnostics_to_json(res.diagnostics);
                diag["E_sup"] = err;
                diag["im_part_sup"] = res.solution.sup_imag();
                diag["sup_norm"] = res.solution.sup_norm();
                write_text(solve_out, field_csv(res.solution, solve_eps, omega));
                write_text(swap_extension(solve_out, ".json"), diag.dump(2) + "\n");
                std::cout << "converged in " << res.diagnostics.iterations << " iterations, E = " << err << '\n';
            } catch (const SolveError& ex) {
                diag["diagnostics"] = diagnostics_to_json(ex.diagnostics());
                diag["failure"] = ex.what();
                write_text(swap_extension(solve_out, ".json"), diag.dump(2) + "\n");
                throw;
            }
        } else if (sweep->parsed()) {
            const auto p = load_config(sweep_model);
            const auto eps = sweep_full ? full_eps_list() : parse_list(sweep_eps);
            sweep_opts.side = parse_edge_side(sweep_side);
            sweep_opts.keep_fields = parse_list(sweep_fields);
            sweep_opts.concurrent = !sweep_serial;
            const auto report = run_convergence_study(p, eps, sweep_opts);
            export_report(report, sweep_out);
            std::cout << report_csv(report);
            if (report.fit)
                std::cout << "slope " << report.fit->slope << "  r^2 " << report.fit->r_squared << '\n';
            else
                std::cout << report.fit_note << '\n';
            if (report.partial) {
                for (const auto& r : report.records)
                    if (!r.failure.empty()) std::cerr << "eps " << r.eps << ": " << r.failure << '\n';
                return 3;
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
