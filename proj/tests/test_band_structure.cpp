#include <doctest.h>

#include <cmath>

#include "gapsol/band_structure.hpp"
#include "gapsol/error.hpp"

using namespace gapsol;

namespace {

CmeParameters reference_model() {
    Eigen::VectorXd v(2), w(2);
    v << 0, 1;
    w << 1, 0;
    return build_symmetric_example(v, w, 2.0, 1.0, 1.0);
}

SpectralEdge edge_of(const CmeParameters& p, EdgeSide side) {
    const auto bands = sample_bands(p, default_band_box(p), default_points_per_axis(p.dim));
    const auto gap = find_gap(bands);
    REQUIRE(gap.has_value());
    return locate_edge(p, bands, *gap, side);
}

}  // namespace

TEST_CASE("spectrum of the reference symbol at k = 0") {
    const auto vals = band_values(reference_model(), Eigen::VectorXd::Zero(2));
    CHECK(vals(0) == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(std::abs(vals(1)) < 1e-14);
    CHECK(vals(2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(vals(3) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("two-mode system matches the closed-form bands") {
    const cplx kappa(1.2, 0.5);
    const double m = std::abs(kappa);
    const auto p = build_two_mode_1d(kappa);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        Eigen::VectorXd k(1);
        k << -10.0 + 0.02 * i;
        const auto vals = band_values(p, k);
        const double exact = std::sqrt(k(0) * k(0) + m * m);
        worst = std::max({worst, std::abs(vals(0) + exact), std::abs(vals(1) - exact)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("two-mode system: gap and curvature at both edges") {
    const cplx kappa(1.2, 0.5);
    const double m = std::abs(kappa);
    const auto p = build_two_mode_1d(kappa);
    const auto bands = sample_bands(p, default_band_box(p), default_points_per_axis(1));
    const auto gap = find_gap(bands);
    REQUIRE(gap.has_value());
    CHECK(gap->lower_band == 0);
    CHECK(std::abs(gap->alpha + m) <= bands.spacing());
    CHECK(std::abs(gap->beta - m) <= bands.spacing());

    const auto upper = locate_edge(p, bands, *gap, EdgeSide::Upper);
    CHECK(upper.j0 == 1);
    CHECK(std::abs(upper.G0(0, 0) - 1.0 / (2.0 * m)) < 1e-6);
    CHECK(std::abs(upper.omega0 - m) < 1e-10);
    const auto lower = locate_edge(p, bands, *gap, EdgeSide::Lower);
    CHECK(lower.j0 == 0);
    CHECK(std::abs(lower.G0(0, 0) + 1.0 / (2.0 * m)) < 1e-6);
}

TEST_CASE("reference edge data") {
    const auto e = edge_of(reference_model(), EdgeSide::Lower);
    CHECK(e.j0 == 1);
    CHECK(e.k0.norm() <= 1e-6);
    CHECK(std::abs(e.omega0) <= 1e-8);
    Eigen::VectorXcd expected(4);
    expected << 0.5, 0.5, -0.5, -0.5;
    const double sign = e.eta(0).real() > 0 ? 1.0 : -1.0;
    CHECK((e.eta - sign * expected).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((e.G0 + 0.25 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(e.alpha == doctest::Approx(0.0));
    CHECK(e.beta == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("a band maximum along a line is not isolated") {
    CmeParameters p;
    p.dim = 2;
    p.modes = 2;
    Eigen::VectorXd a(2), b(2);
    a << 1, 0;
    b << -1, 0;
    p.velocities = {a, b};
    p.kappa = Eigen::MatrixXcd::Zero(2, 2);
    p.kappa(0, 1) = 1.0;
    p.kappa(1, 0) = 1.0;
    p = validate(p);
    const auto bands = sample_bands(p, 4.0, 41);
    const auto gap = find_gap(bands);
    REQUIRE(gap.has_value());
    CHECK_THROWS_WITH_AS(locate_edge(p, bands, *gap, EdgeSide::Lower), doctest::Contains("NonIsolatedExtremum"),
                         Error);
}

TEST_CASE("no gap when couplings vanish") {
    const auto p = build_two_mode_1d(0.0);
    const auto bands = sample_bands(p, 5.0, 201);
    CHECK_FALSE(find_gap(bands).has_value());
}

TEST_CASE("hessian of a quadratic-like band is symmetric") {
    const auto p = reference_model();
    Eigen::VectorXd k(2);
    k << 0.3, -0.2;
    const auto h = hessian(p, 0, k);
    CHECK((h - h.transpose()).norm() == 0.0);
}

TEST_CASE("fix_phase makes the largest component real and positive") {
    Eigen::VectorXcd v(3);
    v << cplx(0.1, 0.2), cplx(0.0, -2.0), cplx(0.5, 0.5);
    const auto f = fix_phase(v);
    CHECK(f(1).real() == doctest::Approx(2.0));
    CHECK(std::abs(f(1).imag()) < 1e-15);
    CHECK(std::abs(std::abs(f(0)) - std::abs(v(0))) < 1e-15);
}

TEST_CASE("edge side names") {
    CHECK(parse_edge_side("lower") == EdgeSide::Lower);
    CHECK(parse_edge_side("upper") == EdgeSide::Upper);
    CHECK_THROWS_AS(parse_edge_side("middle"), Error);
}

TEST_CASE("shifting kappa by a real multiple of the identity shifts the edge frequency") {
    const auto p = reference_model();
    auto q = p;
    const double c = 0.75;
    q.kappa += c * Eigen::MatrixXcd::Identity(4, 4);
    q = validate(q);
    const auto e = edge_of(p, EdgeSide::Lower);
    const auto f = edge_of(q, EdgeSide::Lower);
    CHECK(f.j0 == e.j0);
    CHECK((f.k0 - e.k0).norm() <= 1e-9);
    CHECK((f.eta - e.eta).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(f.omega0 == doctest::Approx(e.omega0 - c).epsilon(1e-10));
    CHECK(f.alpha == doctest::Approx(e.alpha - c).epsilon(1e-10));
    CHECK(f.beta == doctest::Approx(e.beta - c).epsilon(1e-10));
}
