#pragma once

#include <json.hpp>

#include "forl/numkit/adam.hpp"
#include "forl/numkit/mlp.hpp"
#include "forl/numkit/rng.hpp"

namespace forl::num {

/// JSON container for network parameters:
///   {"widths": [...], "activations": [...], "params": [...flat doubles...]}
/// Doubles are written in shortest round-trip form, so save/load is exact.
nlohmann::json to_json(const MlpParams& p);
MlpParams mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AdamState& s);
AdamState adam_from_json(const nlohmann::json& j);

/// 64-bit words are stored as decimal strings (JSON numbers lose precision).
nlohmann::json to_json(const Rng::State& s);
Rng::State rng_state_from_json(const nlohmann::json& j);

}  // namespace forl::num
