#pragma once

#include <string>

#include <json.hpp>

#include "stentsim/vec3.hpp"

namespace stentsim {

using Json = nlohmann::ordered_json;

/// Six significant digits in fixed notation, trailing zeros trimmed
/// ("628.319", "0.000123457", "8"). Non-finite values become "null".
std::string format_number(double v);

/// Serializes like Json::dump but with every float through format_number, so
/// output is byte-stable across platforms. indent < 0 means compact.
std::string dump_canonical(const Json& j, int indent = 2);

Json to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);

}  // namespace stentsim
