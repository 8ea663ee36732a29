#include "gapsol/json_io.hpp"

#include "gapsol/error.hpp"

namespace gapsol {

using nlohmann::json;

json complex_to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j.at(r).size()) != cols)
            throw Error(ErrorCode::ParseError, "ragged matrix in JSON");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

}  // namespace

json edge_to_json(const SpectralEdge& edge) {
    json eta = json::array();
    for (int i = 0; i < edge.eta.size(); ++i) eta.push_back(complex_to_json(edge.eta(i)));
    return json{
        {"dim", edge.k0.size()},
        {"j0", edge.j0 + 1},
        {"k0", std::vector<double>(edge.k0.data(), edge.k0.data() + edge.k0.size())},
        {"omega0", edge.omega0},
        {"eta", eta},
        {"G0", matrix_to_json(edge.G0)},
        {"gap", {{"alpha", edge.alpha}, {"beta", edge.beta}}},
        {"side", to_string(edge.side)},
        {"separation", edge.separation},
        {"gradient_norm", edge.gradient_norm},
        {"eigen_residual", edge.eigen_residual},
    };
}

SpectralEdge edge_from_json(const json& j) {
    try {
        SpectralEdge e;
        e.j0 = j.at("j0").get<int>() - 1;
        const auto k0 = j.at("k0").get<std::vector<double>>();
        e.k0 = Eigen::Map<const Eigen::VectorXd>(k0.data(), static_cast<Eigen::Index>(k0.size()));
        e.omega0 = j.at("omega0").get<double>();
        const auto& eta = j.at("eta");
        e.eta.resize(static_cast<Eigen::Index>(eta.size()));
        for (std::size_t i = 0; i < eta.size(); ++i) e.eta(static_cast<Eigen::Index>(i)) = complex_from_json(eta[i]);
        e.G0 = matrix_from_json(j.at("G0"));
        e.alpha = j.at("gap").at("alpha").get<double>();
        e.beta = j.at("gap").at("beta").get<double>();
        e.side = parse_edge_side(j.at("side").get<std::string>());
        e.separation = j.value("separation", 0.0);
        e.gradient_norm = j.value("gradient_norm", 0.0);
        e.eigen_residual = j.value("eigen_residual", 0.0);
        if (e.G0.rows() != e.k0.size() || e.G0.cols() != e.k0.size())
            throw Error(ErrorCode::ParseError, "edge JSON: G0 must be d x d");
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::ParseError, std::string("edge JSON: ") + ex.what());
    }
}

json nls_to_json(const EffectiveNls& nls) {
    return json{
        {"dim", nls.dim},
        {"omega1", nls.omega1},
        {"G0", matrix_to_json(nls.G0)},
        {"Gamma", complex_to_json(nls.gamma)},
        {"side", to_string(nls.side)},
        {"sign_flip_applied", nls.sign_flip_applied},
    };
}

json canonical_to_json(const Canonicalization& c) {
    return json{
        {"amplitude", c.amplitude},
        {"length", c.length},
        {"coordinate_map", matrix_to_json(c.coordinate_map)},
        {"isotropic", c.isotropic},
        {"focusing", c.focusing},
    };
}

json diagnostics_to_json(const SolveDiagnostics& d) {
    return json{
        {"iterations", d.iterations},
        {"stabilization", d.stabilization},
        {"converged", d.converged},
        {"final_residual", d.final_residual},
        {"min_symbol_gap", d.min_symbol_gap},
        {"stabilization_history", d.stabilization_history},
        {"residual_sup_history", d.residual_sup_history},
        {"residual_l2_history", d.residual_l2_history},
    };
}

}  // namespace gapsol
