#include <doctest.h>

#include <filesystem>

#include "gapsol/cme_model.hpp"
#include "gapsol/error.hpp"
#include "oracles.hpp"

using namespace gapsol;

namespace {

CmeParameters reference_model() {
    Eigen::VectorXd v(2), w(2);
    v << 0, 1;
    w << 1, 0;
    return build_symmetric_example(v, w, 2.0, 1.0, 1.0);
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("symmetric example: coupling matrix and velocities") {
    const auto p = reference_model();
    CHECK(p.dim == 2);
    CHECK(p.modes == 4);
    Eigen::MatrixXcd expected(4, 4);
    expected << 0, 2, 1, 1, 2, 0, 1, 1, 1, 1, 0, 2, 1, 1, 2, 0;
    CHECK((p.kappa - expected).norm() == 0.0);
    CHECK(p.velocities[1](1) == -1.0);
    CHECK(p.velocities[3](0) == -1.0);
    CHECK(hermiticity_defect(p.kappa) == 0.0);
}

TEST_CASE("symmetric example: nonlinearity equals the dense tensor") {
    const auto p = reference_model();
    const auto g = oracle::symmetric_gamma_tensor();
    Eigen::VectorXcd a(4);
    a << oracle::cplx(0.3, -0.2), oracle::cplx(-1.1, 0.4), oracle::cplx(0.7, 0.9), oracle::cplx(0.05, -0.6);
    CHECK((nonlinearity(p, a) - oracle::dense_nonlinearity(g, a)).cwiseAbs().maxCoeff() < 1e-14);
    int nonzero = 0;
    for (double x : g) nonzero += x != 0.0;
    CHECK(static_cast<int>(p.gamma.size()) == nonzero);
}

TEST_CASE("validate rejects a non-Hermitian coupling") {
    auto p = reference_model();
    p.kappa(0, 1) = 2.5;
    CHECK(code_of([&] { validate(p); }) == ErrorCode::NonHermitianCoupling);
}

TEST_CASE("validate rejects shape and index errors") {
    auto p = reference_model();
    p.velocities.pop_back();
    CHECK(code_of([&] { validate(p); }) == ErrorCode::DimensionMismatch);
    auto q = reference_model();
    q.gamma.push_back({0, 4, 0, 0, 1.0});
    CHECK(code_of([&] { validate(q); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("config text round-trips exactly") {
    auto p = build_two_mode_1d({1.25, -0.3}, 0.7, 0.1);
    CHECK(parse_config(format_config(p)) == p);
    const auto q = reference_model();
    CHECK(parse_config(format_config(q)) == q);
    const auto path = std::filesystem::temp_directory_path() / "gapsol_model_roundtrip.toml";
    save_config(q, path);
    CHECK(load_config(path) == q);
    std::filesystem::remove(path);
}

TEST_CASE("config parser reports the missing section") {
    const std::string text = "[model]\nd = 1\nN = 2\n[velocities]\nv1 = [1.0]\nv2 = [-1.0]\n";
    try {
        parse_config(text);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("kappa") != std::string::npos);
    }
}

TEST_CASE("config parser reports bad numbers with the line") {
    const std::string text = "[model]\nd = 1\nN = two\n";
    try {
        parse_config(text);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("load_config on a missing file is an I/O error") {
    CHECK(code_of([] { load_config("/nonexistent/model.toml"); }) == ErrorCode::IoError);
}

TEST_CASE("negating the nonlinearity flips N") {
    const auto p = reference_model();
    const auto q = negate_nonlinearity(p);
    Eigen::VectorXcd a = Eigen::VectorXcd::Constant(4, oracle::cplx(0.4, 0.1));
    CHECK((nonlinearity(q, a) + nonlinearity(p, a)).norm() < 1e-15);
}
