// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gapsol/band_structure.hpp"
#include "gapsol/convergence_harness.hpp"
#include "gapsol/effective_nls.hpp"
#include "gapsol/error.hpp"
#include "gapsol/gap_soliton_solver.hpp"
#include "oracles.hpp"

#ifndef GAPSOL_PROPERTIES_EXE
#define GAPSOL_PROPERTIES_EXE "gapsol_properties"
#endif

using namespace gapsol;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CmeParameters reference_model() {
    Eigen::VectorXd v(2), w(2);
    v << 0, 1;
    w << 1, 0;
    return build_symmetric_example(v, w, 2.0, 1.0, 1.0);
}

template <class F>
void guarded(int id, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    const auto model = reference_model();
    SpectralEdge edge;
    bool have_edge = false;

    guarded(1, [&] {
        const auto t0 = Clock::now();
        const auto bands = sample_bands(model, default_band_box(model), default_points_per_axis(2));
        const auto gap = find_gap(bands);
        if (!gap) throw Error(ErrorCode::NoGap, "no gap");
        edge = locate_edge(model, bands, *gap, EdgeSide::Lower);
        const double elapsed = seconds_since(t0);
        have_edge = true;
        Eigen::VectorXcd expected(4);
        expected << 0.5, 0.5, -0.5, -0.5;
        const double eta_err = std::min((edge.eta - expected).cwiseAbs().maxCoeff(),
                                        (edge.eta + expected).cwiseAbs().maxCoeff());
        const bool ok = edge.j0 == 1 && edge.k0.norm() <= 1e-6 && std::abs(edge.omega0) <= 1e-8 && eta_err <= 1e-8 &&
                        elapsed < 10.0;
        report(1, ok, fmt("j0=%d |k0|=%.2e omega0=%.2e eta err=%.2e time=%.2fs", edge.j0 + 1, edge.k0.norm(),
                          edge.omega0, eta_err, elapsed));
    });

    guarded(2, [&] {
        if (!have_edge) throw Error(ErrorCode::InvalidArgument, "edge unavailable");
        const auto nls = effective_coefficients(edge, model);
        const double g0_err = (edge.G0 + 0.25 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
        const auto brute = oracle::quadruple_sum(oracle::symmetric_gamma_tensor(), edge.eta.normalized());
        const double gamma_err = std::abs(nls.gamma - 2.25);
        const double oracle_err = std::abs(nls.gamma - brute);
        report(2, g0_err <= 1e-6 && gamma_err <= 1e-12 && oracle_err <= 1e-14,
               fmt("G0 err=%.2e Gamma=%.15g (err %.1e, oracle diff %.1e)", g0_err, nls.gamma.real(), gamma_err,
                   oracle_err));
    });

    guarded(3, [&] {
        const cplx kappa(1.2, 0.5);
        const double m = std::abs(kappa);
        const auto p = build_two_mode_1d(kappa);
        double band_err = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            Eigen::VectorXd k(1);
            k << -10.0 + 0.02 * i;
            const auto vals = band_values(p, k);
            const double exact = std::sqrt(k(0) * k(0) + m * m);
            band_err = std::max({band_err, std::abs(vals(0) + exact), std::abs(vals(1) - exact)});
        }
        const auto bands = sample_bands(p, default_band_box(p), default_points_per_axis(1));
        const auto gap = find_gap(bands);
        if (!gap) throw Error(ErrorCode::NoGap, "no gap");
        const double gap_err = std::max(std::abs(gap->alpha + m), std::abs(gap->beta - m));
        const auto upper = locate_edge(p, bands, *gap, EdgeSide::Upper);
        const double g0_err = std::abs(upper.G0(0, 0) - 1.0 / (2.0 * m));
        report(3, band_err <= 1e-10 && gap_err <= bands.spacing() && g0_err <= 1e-6,
               fmt("band err=%.2e gap err=%.2e (dk=%.2e) G0 err=%.2e", band_err, gap_err, bands.spacing(), g0_err));
    });

    guarded(4, [&] {
        const auto p1 = solve_ground_state_radial(1);
        const double u0_err = std::abs(p1.u0 - std::sqrt(2.0));
        const auto p2 = solve_ground_state_radial(2);
        const auto col = oracle::collocation_ground_state(2);
        double diff = 0.0;
        for (Eigen::Index j = 0; j < col.x.size(); ++j)
            if (col.x(j) >= 0.0) diff = std::max(diff, std::abs(canonical_value(p2, col.x(j)) - col.u(j)));
        bool rejected = false;
        EffectiveNls bad;
        bad.dim = 2;
        bad.omega1 = 1.0;
        bad.G0 = -0.25 * Eigen::MatrixXd::Identity(2, 2);
        bad.gamma = 2.25;
        try {
            canonicalize(bad);
        } catch (const Error& e) {
            rejected = e.code() == ErrorCode::NoRealGroundState;
        }
        report(4, u0_err <= 1e-8 && diff <= 1e-7 && col.residual < 1e-9 && rejected,
               fmt("1D u0 err=%.2e, 2D shooting vs collocation=%.2e (u0=%.12f), unflipped reference %s", u0_err,
                   diff, p2.u0, rejected ? "rejected" : "NOT rejected"));
    });

    ConvergenceReport sweep;
    bool have_sweep = false;
    guarded(5, [&] {
        StudyOptions o;
        o.flip_nonlinearity = true;
        const auto t0 = Clock::now();
        sweep = run_convergence_study(model, default_eps_list(), o);
        const double elapsed = seconds_since(t0);
        have_sweep = true;
        bool ratios_ok = !sweep.partial;
        std::string ratios;
        for (std::size_t i = 0; i + 1 < sweep.records.size(); ++i) {
            const double r = sweep.records[i].error_sup / sweep.records[i + 1].error_sup;
            ratios += fmt("%s%.3f", i ? "," : "", r);
            ratios_ok = ratios_ok && r >= 3.2 && r <= 4.8;
        }
        const bool fit_ok = sweep.fit && sweep.fit->slope >= 1.7 && sweep.fit->slope <= 2.3 && sweep.fit->r_squared >= 0.99;
        report(5, fit_ok && ratios_ok && elapsed < 300.0,
               fmt("slope=%.4f r2=%.6f ratios=[%s] time=%.1fs", sweep.fit ? sweep.fit->slope : NAN,
                   sweep.fit ? sweep.fit->r_squared : NAN, ratios.c_str(), elapsed));
    });

    guarded(6, [&] {
        if (!have_sweep) throw Error(ErrorCode::InvalidArgument, "sweep unavailable");
        double lo = INFINITY, hi = 0.0;
        std::string vals;
        for (const auto& r : sweep.records) {
            const double q = r.im_part_sup / (r.eps * r.eps);
            lo = std::min(lo, q);
            hi = std::max(hi, q);
            vals += fmt("%s%.4f", vals.empty() ? "" : ",", q);
        }
        report(6, !sweep.partial && lo > 0.0 && hi / lo < 2.0, fmt("sup|Im B|/eps^2=[%s] max/min=%.3f", vals.c_str(), hi / lo));
    });

    guarded(7, [&] {
        const std::string cmd = std::string("\"") + GAPSOL_PROPERTIES_EXE + "\" --minimal";
        const int rc = std::system(cmd.c_str());
        report(7, rc == 0, fmt("standalone property suite exit status %d", rc));
    });

    guarded(8, [&] {
        if (!have_sweep) throw Error(ErrorCode::InvalidArgument, "sweep unavailable");
        const auto flipped = negate_nonlinearity(model);
        const auto canon = canonicalize(sweep.nls);
        const auto profile = with_scaling(solve_ground_state_radial(2), canon);
        std::vector<std::pair<double, double>> full, proj;
        std::string vals;
        for (double eps : {0.2, 0.1, 0.05}) {
            const auto grid = make_grid(eps, 3.0, 160, 2);
            const auto a = build_ansatz(eps, sweep.edge, profile, grid);
            const double omega = sweep.edge.omega0 + eps * eps * sweep.nls.omega1;
            const double r = stationary_residual(a.field, omega, flipped).sup;
            const double rp = projected_residual_sup(a.field, omega, flipped, sweep.edge.eta);
            full.emplace_back(std::log(eps), std::log(r));
            proj.emplace_back(std::log(eps), std::log(rp));
            vals += fmt("%s%.4e", vals.empty() ? "" : ",", r);
        }
        const double order = fit_slope(full).slope;
        const double proj_order = fit_slope(proj).slope;
        report(8, order >= 2.5,
               fmt("sup residual of B_app=[%s] order=%.3f (required >= 2.5); eta-projected order=%.3f", vals.c_str(),
                   order, proj_order));
    });

    std::printf("%d criterion/criteria failed\n", failures);
    return failures ? 1 : 0;
}
