// Deterministic JSON text: sorted object keys, doubles at 17 significant
// digits. Internal to the library.

#pragma once

#include <json.hpp>

#include <string>

namespace qzeno::detail {

std::string format_double(double x);

void write_json(const nlohmann::json& j, std::string& out, int indent = 2, int depth = 0);

inline std::string json_text(const nlohmann::json& j, int indent = 2) {
    std::string out;
    write_json(j, out, indent, 0);
    return out;
}

} // namespace qzeno::detail
