// Shooting solver for the radial ground state of  u'' + (d-1)/r u' - u + u^3 = 0.
//
// u(0) is bisected between undershooting trajectories (u' turns positive while u > 0) and
// overshooting ones (u crosses zero). Once the bracket is exhausted the trajectory is kept up
// to the radius where u has dropped to kMatchLevel * u(0); beyond it the cubic term is below
// working precision and the profile continues as the decaying solution r^-nu K_nu(r),
// nu = (d-2)/2, of the linearised equation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gapsol/effective_nls.hpp"
#include "gapsol/error.hpp"

namespace gapsol {

namespace {

using State = std::array<double, 2>;  // (u, u')

constexpr double kStartRadius = 1e-3;
constexpr double kMatchLevel = 1e-4;
constexpr double kClassifyExtra = 20.0;

struct RadialOde {
    int dim;
    State operator()(double r, const State& y) const {
        return {y[1], -(dim - 1) / r * y[1] + y[0] - y[0] * y[0] * y[0]};
    }
};

// Taylor start u = u0 + c2 r^2 + c4 r^4 avoids the removable singularity at r = 0.
State series_start(int dim, double u0, double r) {
    const double c2 = (u0 - u0 * u0 * u0) / (2.0 * dim);
    const double c4 = (1.0 - 3.0 * u0 * u0) * c2 / (4.0 * (dim + 2));
    return {u0 + c2 * r * r + c4 * r * r * r * r, 2.0 * c2 * r + 4.0 * c4 * r * r * r};
}

// Dormand-Prince 5(4) with standard step-size control.
class DormandPrince {
public:
    DormandPrince(RadialOde f, double rtol, double atol) : f_(f), rtol_(rtol), atol_(atol) {}

    // Advances (r, y) to r_end. `watch` is called after every accepted step and may stop
    // the integration by returning true.
    template <class Watch>
    bool advance(double& r, State& y, double r_end, double& h, Watch&& watch) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;

        int steps = 0;
        while (r < r_end) {
            if (++steps > 10'000'000) throw Error(ErrorCode::ToleranceNotMet, "radial integrator step limit");
            const bool last = r + h >= r_end;
            const double step = last ? r_end - r : h;
            const State k1 = f_(r, y);
            const State k2 = f_(r + step / 5, combine(y, step, {a21}, {k1}));
            const State k3 = f_(r + 3 * step / 10, combine(y, step, {a31, a32}, {k1, k2}));
            const State k4 = f_(r + 4 * step / 5, combine(y, step, {a41, a42, a43}, {k1, k2, k3}));
            const State k5 = f_(r + 8 * step / 9, combine(y, step, {a51, a52, a53, a54}, {k1, k2, k3, k4}));
            const State k6 = f_(r + step, combine(y, step, {a61, a62, a63, a64, a65}, {k1, k2, k3, k4, k5}));
            State y_new;
            for (int i = 0; i < 2; ++i)
                y_new[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            const State k7 = f_(r + step, y_new);
            double err = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double e =
                    step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double scale = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err = std::max(err, std::abs(e) / scale);
            }
            if (err <= 1.0) {
                r = last ? r_end : r + step;
                y = y_new;
                if (watch(r, y)) return true;
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (!last || err > 1.0) h = step * factor;
            if (h < 1e-14) throw Error(ErrorCode::ToleranceNotMet, "radial integrator step size underflow");
        }
        return false;
    }

private:
    template <std::size_t M>
    static State combine(const State& y, double h, const double (&coef)[M], const State (&ks)[M]) {
        State out = y;
        for (std::size_t s = 0; s < M; ++s)
            for (int i = 0; i < 2; ++i) out[i] += h * coef[s] * ks[s][i];
        return out;
    }

    RadialOde f_;
    double rtol_;
    double atol_;
};

enum class Shot { Undershoot, Overshoot, Undecided };

Shot classify(const DormandPrince& rk, int dim, double u0, double r_end) {
    double r = kStartRadius;
    State y = series_start(dim, u0, r);
    double h = 1e-3;
    Shot result = Shot::Undecided;
    rk.advance(r, y, r_end, h, [&](double, const State& s) {
        if (s[0] < 0.0) {
            result = Shot::Overshoot;
            return true;
        }
        if (s[1] > 0.0) {
            result = Shot::Undershoot;
            return true;
        }
        return false;
    });
    return result;
}

// Decaying solution of u'' + (d-1)/r u' - u = 0 and its derivative.
State linear_tail(int dim, double r) {
    const double nu = 0.5 * (dim - 2);
    const double scale = std::pow(r, -nu);
    return {scale * std::cyl_bessel_k(std::abs(nu), r), -scale * std::cyl_bessel_k(std::abs(nu + 1.0), r)};
}

}  // namespace

RadialProfile solve_ground_state_radial(int dim, double tol, const RadialOptions& options) {
    if (dim < 1 || dim > 3) throw Error(ErrorCode::InvalidArgument, "radial ground state needs d in {1,2,3}");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    if (options.samples < 16 || !(options.r_max > 1.0))
        throw Error(ErrorCode::InvalidArgument, "radial grid too small");

    const double rtol = std::clamp(1e-3 * tol, 1e-14, 1e-6);
    const DormandPrince rk(RadialOde{dim}, rtol, 1e-3 * rtol);
    const double r_classify = options.r_max + kClassifyExtra;

    double lo = tol;
    double hi = 10.0;
    if (classify(rk, dim, lo, r_classify) != Shot::Undershoot || classify(rk, dim, hi, r_classify) != Shot::Overshoot)
        throw Error(ErrorCode::BracketingFailure, "no undershoot/overshoot bracket for u(0) in [tol, 10]");

    int steps = 0;
    for (; steps < options.max_bisection; ++steps) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Shot shot = classify(rk, dim, mid, r_classify);
        if (shot == Shot::Overshoot)
            hi = mid;
        else if (shot == Shot::Undershoot)
            lo = mid;
        else {
            lo = hi = mid;
            break;
        }
    }
    if (hi - lo > std::max(tol, 8.0 * std::numeric_limits<double>::epsilon()) * hi)
        throw Error(ErrorCode::ToleranceNotMet, "bisection depth exhausted before the bracket closed");

    RadialProfile prof;
    prof.dim = dim;
    prof.u0 = 0.5 * (lo + hi);
    prof.bisection_steps = steps;
    const int n = options.samples;
    const double h = options.r_max / n;
    prof.r.resize(static_cast<std::size_t>(n) + 1);
    prof.u.resize(prof.r.size());
    prof.du.resize(prof.r.size());
    for (int i = 0; i <= n; ++i) prof.r[static_cast<std::size_t>(i)] = h * i;

    prof.u[0] = prof.u0;
    prof.du[0] = 0.0;
    double r = kStartRadius;
    State y = series_start(dim, prof.u0, r);
    double step = 1e-3;
    const double match_level = kMatchLevel * prof.u0;
    std::size_t match = prof.r.size();
    for (std::size_t i = 1; i < prof.r.size(); ++i) {
        rk.advance(r, y, prof.r[i], step, [](double, const State&) { return false; });
        prof.u[i] = y[0];
        prof.du[i] = y[1];
        if (y[0] <= match_level || y[1] > 0.0) {
            match = i;
            break;
        }
    }
    if (match == prof.r.size())
        throw Error(ErrorCode::ToleranceNotMet, "profile did not decay to the matching level before r_max");
    if (prof.u[match] <= 0.0 || prof.du[match] > 0.0)
        throw Error(ErrorCode::ToleranceNotMet, "shooting trajectory left the separatrix before matching");

    prof.match_radius = prof.r[match];
    const State anchor = linear_tail(dim, prof.match_radius);
    const double amplitude = prof.u[match] / anchor[0];
    for (std::size_t i = match + 1; i < prof.r.size(); ++i) {
        const State t = linear_tail(dim, prof.r[i]);
        prof.u[i] = amplitude * t[0];
        prof.du[i] = amplitude * t[1];
    }

    if (std::abs(prof.u.back()) > 1e-8 * prof.u0)
        throw Error(ErrorCode::ToleranceNotMet, "u(r_max) = " + std::to_string(prof.u.back()) +
                                                    " exceeds 1e-8 u(0); increase r_max");

    // Exponential rate over the last decade of u.
    const double floor_value = prof.u.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t i = prof.r.size(); i-- > 0;) {
        if (prof.u[i] > 10.0 * floor_value) break;
        const double ly = std::log(prof.u[i]);
        sx += prof.r[i];
        sy += ly;
        sxx += prof.r[i] * prof.r[i];
        sxy += prof.r[i] * ly;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    prof.decay_rate = count >= 2 && denom > 0.0 ? -(count * sxy - sx * sy) / denom : 1.0;
    return prof;
}

double radial_ode_residual(const RadialProfile& profile) {
    const auto& u = profile.u;
    const auto& r = profile.r;
    if (u.size() < 5) return 0.0;
    const double h = r[1] - r[0];
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < u.size(); ++i) {
        const double d1 = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
        const double d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h);
        const double res = d2 + (profile.dim - 1) / r[i] * d1 - u[i] + u[i] * u[i] * u[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace gapsol
