#pragma once

#include <string>

#include <json.hpp>

namespace gms::io {

using Json = nlohmann::ordered_json;

/// %.17g
std::string format_double(double x);

/// Serializes like Json::dump(2) but prints every floating value with 17
/// significant digits. NaN and infinities become null.
std::string dump(const Json& j, int indent = 2);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace gms::io
