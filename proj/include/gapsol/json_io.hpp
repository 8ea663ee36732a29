#pragma once

#include <json.hpp>

#include "gapsol/band_structure.hpp"
#include "gapsol/effective_nls.hpp"
#include "gapsol/gap_soliton_solver.hpp"

namespace gapsol {

// Band indices are written 1-based, matching the config files.
nlohmann::json edge_to_json(const SpectralEdge& edge);
SpectralEdge edge_from_json(const nlohmann::json& j);

nlohmann::json nls_to_json(const EffectiveNls& nls);
nlohmann::json canonical_to_json(const Canonicalization& c);
nlohmann::json diagnostics_to_json(const SolveDiagnostics& d);
nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);

}  // namespace gapsol
