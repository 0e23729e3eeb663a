#pragma once

// nlohmann/json conversions for the on-disk formats. Doubles are written
// with round-trip precision so load(save(x)) is bit-exact.

#include "iertc/cspace.hpp"

#include <json.hpp>

namespace iertc {

using Json = nlohmann::json;

Json config_to_json(const Config& q);
Config config_from_json(const Json& j);

Json scene_to_json_value(const Scene& scene);
Scene scene_from_json_value(const Json& j);

} // namespace iertc
