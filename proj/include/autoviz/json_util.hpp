#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

namespace autoviz {

using Json = nlohmann::json; // std::map-backed, so keys serialize sorted

inline constexpr int kJsonSignificantDigits = 12;

/// Rounds to 12 significant digits so output does not depend on last-bit noise;
/// NaN and infinities become null.
inline Json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    if (v == 0.0) return 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kJsonSignificantDigits, v);
    return std::strtod(buf, nullptr);
}

} // namespace autoviz
