#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gapsol/convergence_harness.hpp"
#include "gapsol/error.hpp"

using namespace gapsol;

namespace {

CmeParameters reference_model() {
    Eigen::VectorXd v(2), w(2);
    v << 0, 1;
    w << 1, 0;
    return build_symmetric_example(v, w, 2.0, 1.0, 1.0);
}

StudyOptions small_options() {
    StudyOptions o;
    o.flip_nonlinearity = true;
    o.grid_points = 48;
    return o;
}

}  // namespace

TEST_CASE("slope of exact power-law data") {
    std::vector<std::pair<double, double>> pts;
    for (double e : {0.2, 0.1, 0.05}) pts.emplace_back(std::log(e), 2.0 * std::log(e) + 1.0);
    const auto fit = fit_slope(pts);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.log_c == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two points interpolate exactly") {
    const auto fit = fit_slope({{0.0, 1.0}, {1.0, 4.0}});
    CHECK(fit.slope == doctest::Approx(3.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("slope needs two distinct abscissae") {
    CHECK_THROWS_WITH_AS(fit_slope({{0.0, 1.0}}), doctest::Contains("InsufficientData"), Error);
    CHECK_THROWS_WITH_AS(fit_slope({{1.0, 1.0}, {1.0, 2.0}}), doctest::Contains("InsufficientData"), Error);
}

TEST_CASE("eps list must be strictly decreasing") {
    CHECK_THROWS_AS(run_convergence_study(reference_model(), {0.1, 0.2}, small_options()), Error);
    CHECK_THROWS_AS(run_convergence_study(reference_model(), {}, small_options()), Error);
}

TEST_CASE("single eps gives a report without a fit") {
    const auto rep = run_convergence_study(reference_model(), {0.2}, small_options());
    REQUIRE(rep.records.size() == 1);
    CHECK(rep.records[0].converged);
    CHECK(rep.records[0].error_sup > 0.0);
    CHECK_FALSE(rep.fit.has_value());
    CHECK_FALSE(rep.fit_note.empty());
    CHECK_FALSE(rep.partial);
}

TEST_CASE("unflipped reference sweep cannot build an envelope") {
    auto o = small_options();
    o.flip_nonlinearity = false;
    CHECK_THROWS_WITH_AS(run_convergence_study(reference_model(), {0.2, 0.1}, o),
                         doctest::Contains("NoRealGroundState"), Error);
}

TEST_CASE("failed eps values make the report partial") {
    auto o = small_options();
    o.solver.max_iter = 3;
    const auto rep = run_convergence_study(reference_model(), {0.2, 0.1}, o);
    CHECK(rep.partial);
    CHECK_FALSE(rep.fit.has_value());
    for (const auto& r : rep.records) CHECK_FALSE(r.failure.empty());
}

TEST_CASE("reports are deterministic and exports round-trip") {
    auto o = small_options();
    o.keep_fields = {0.1};
    const auto a = run_convergence_study(reference_model(), {0.2, 0.1}, o);
    o.concurrent = false;
    const auto b = run_convergence_study(reference_model(), {0.2, 0.1}, o);
    CHECK(report_csv(a) == report_csv(b));
    CHECK(report_json(a) == report_json(b));
    REQUIRE(a.fit.has_value());

    // CSV values read back bit-for-bit.
    std::istringstream csv(report_csv(a));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("eps,E,residual,iterations,im_sup", 0) == 0);
    for (const auto& rec : a.records) {
        std::getline(csv, line);
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        CHECK(std::stod(cell) == rec.eps);
        std::getline(row, cell, ',');
        CHECK(std::stod(cell) == rec.error_sup);
        std::getline(row, cell, ',');
        CHECK(std::stod(cell) == rec.residual_final);
        std::getline(row, cell, ',');
        CHECK(std::stoi(cell) == rec.iterations);
        std::getline(row, cell, ',');
        CHECK(std::stod(cell) == rec.im_part_sup);
    }

    const auto j = nlohmann::json::parse(report_json(a));
    CHECK(j["metadata"]["sign_flip_applied"].get<bool>());
    CHECK(j["metadata"]["model_hash"].get<std::uint64_t>() == model_hash(reference_model()));
    CHECK(j["records"].size() == 2);

    const auto dir = std::filesystem::temp_directory_path() / "gapsol_report_test";
    std::filesystem::remove_all(dir);
    export_report(a, dir);
    for (const char* f : {"convergence.csv", "convergence.json", "loglog.dat", "field_eps0.1.csv"})
        CHECK(std::filesystem::exists(dir / f));
    std::ifstream field(dir / "field_eps0.1.csv");
    std::getline(field, line);
    CHECK(line.rfind("# eps", 0) == 0);
    std::getline(field, line);
    CHECK(line == "x1,x2,re_B,im_B,re_Bapp,im_Bapp");
    std::filesystem::remove_all(dir);
}

TEST_CASE("model hash depends on the model") {
    auto p = reference_model();
    const auto h = model_hash(p);
    p.kappa(0, 1) = p.kappa(1, 0) = 2.5;
    CHECK(model_hash(p) != h);
}
