#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace autoviz {

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
}

/// Parses a finite decimal number; surrounding whitespace and one leading '+' are accepted.
inline std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    // from_chars also accepts "inf"/"nan"; those are never numeric cells here.
    const char lead = text.front() == '-' && text.size() > 1 ? text[1] : text.front();
    if (!((lead >= '0' && lead <= '9') || lead == '.')) return std::nullopt;
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value, std::chars_format::general);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

/// Rounds to `digits` significant decimal digits; used for stable serialization.
inline double round_significant(double value, int digits = 12) {
    if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    return std::strtod(buf.data(), nullptr);
}

} // namespace autoviz
