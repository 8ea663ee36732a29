#pragma once
// Independent reference computations used by the tests. Nothing here calls into the
// library's solvers; only plain Eigen.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

// Dense gamma_j^{(m,n,o)} of the symmetric four-mode example, written out entry by entry
// (0-based). Repeated assignments of the same slot are harmless: every listed value is 1.
inline std::vector<double> symmetric_gamma_tensor() {
    std::vector<double> g(256, 0.0);
    auto set = [&](int j, int m, int n, int o) { g[((j * 4 + m) * 4 + n) * 4 + o] = 1.0; };
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            set(j, j, j, j);
            set(j, j, i, i);
            set(j, i, i, j);
        }
    set(0, 2, 1, 3), set(0, 3, 1, 2), set(1, 2, 0, 3), set(1, 3, 0, 2);
    set(2, 0, 3, 1), set(2, 1, 3, 0), set(3, 0, 2, 1), set(3, 1, 2, 0);
    return g;
}

// sum_{j,m,n,o} conj(eta_j) gamma_j^{(m,n,o)} eta_m conj(eta_n) eta_o
inline cplx quadruple_sum(const std::vector<double>& g, const Eigen::VectorXcd& eta) {
    cplx total = 0.0;
    for (int j = 0; j < 4; ++j)
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n)
                for (int o = 0; o < 4; ++o)
                    total += std::conj(eta(j)) * g[((j * 4 + m) * 4 + n) * 4 + o] * eta(m) * std::conj(eta(n)) * eta(o);
    return total;
}

// N_j(A) = sum gamma_j^{(m,n,o)} A_m conj(A_n) A_o from the dense tensor.
inline Eigen::VectorXcd dense_nonlinearity(const std::vector<double>& g, const Eigen::VectorXcd& a) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(4);
    for (int j = 0; j < 4; ++j)
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n)
                for (int o = 0; o < 4; ++o) out(j) += g[((j * 4 + m) * 4 + n) * 4 + o] * a(m) * std::conj(a(n)) * a(o);
    return out;
}

// Chebyshev collocation for the even ground state of  u'' + (d-1)/r u' - u + u^3 = 0 on
// [-R, R] with u(+-R) = 0, solved by damped Newton from 2.2 sech(x).
struct Collocation {
    int dim = 2;
    double R = 20.0;
    Eigen::VectorXd x;  // Chebyshev points, descending from R to -R
    Eigen::VectorXd u;
    double residual = 0.0;
    int newton_steps = 0;

    // Barycentric interpolation on the Chebyshev points of the second kind.
    double operator()(double r) const {
        const Eigen::Index n = x.size();
        double num = 0.0, den = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double diff = r - x(j);
            if (diff == 0.0) return u(j);
            double w = (j % 2 ? -1.0 : 1.0);
            if (j == 0 || j == n - 1) w *= 0.5;
            num += w / diff * u(j);
            den += w / diff;
        }
        return num / den;
    }
};

inline Eigen::MatrixXd cheb_matrix(int n, Eigen::VectorXd& x) {
    x.resize(n + 1);
    for (int j = 0; j <= n; ++j) x(j) = std::cos(std::numbers::pi * j / n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto c = [n](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 ? -1.0 : 1.0); };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (i != j) d(i, j) = c(i) / c(j) / (x(i) - x(j));
    for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
    return d;
}

inline Collocation collocation_ground_state(int dim, int points = 601, double R = 20.0) {
    Collocation sol;
    sol.dim = dim;
    sol.R = R;
    const int n = points - 1;
    Eigen::MatrixXd d = cheb_matrix(n, sol.x);
    sol.x *= R;
    d /= R;
    const Eigen::MatrixXd d2 = d * d;
    const int mid = n / 2;  // x = 0 when the point count is odd
    Eigen::MatrixXd lin = d2 - Eigen::MatrixXd::Identity(n + 1, n + 1);
    for (int i = 1; i < n; ++i) {
        if (i == mid && points % 2 == 1) lin.row(i) = dim * d2.row(i) - Eigen::MatrixXd::Identity(n + 1, n + 1).row(i);
        else lin.row(i) += (dim - 1) / sol.x(i) * d.row(i);
    }
    sol.u = (2.2 / sol.x.array().cosh()).matrix();
    auto residual = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd f = lin * u + u.array().cube().matrix();
        f(0) = u(0);
        f(n) = u(n);
        return f;
    };
    Eigen::VectorXd f = residual(sol.u);
    for (int it = 0; it < 60 && f.cwiseAbs().maxCoeff() > 1e-13; ++it) {
        Eigen::MatrixXd jac = lin;
        jac.diagonal() += (3.0 * sol.u.array().square()).matrix();
        jac.row(0).setZero();
        jac.row(n).setZero();
        jac(0, 0) = 1.0;
        jac(n, n) = 1.0;
        const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
        double t = 1.0;
        Eigen::VectorXd trial = sol.u + step;
        Eigen::VectorXd ft = residual(trial);
        while (ft.norm() > f.norm() && t > 1e-3) {
            t *= 0.5;
            trial = sol.u + t * step;
            ft = residual(trial);
        }
        sol.u = trial;
        f = ft;
        sol.newton_steps = it + 1;
    }
    sol.residual = f.cwiseAbs().maxCoeff();
    return sol;
}

}  // namespace oracle
