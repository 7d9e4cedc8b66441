#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace autoviz::ingest {

enum class Encoding { utf8, utf8_bom, latin1 };

constexpr std::string_view to_string(Encoding e) {
    switch (e) {
    case Encoding::utf8: return "UTF-8";
    case Encoding::utf8_bom: return "UTF-8-with-BOM";
    case Encoding::latin1: return "Latin-1";
    }
    return "UTF-8";
}

inline constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

/// Incremental UTF-8 validator that tolerates sequences split across chunks.
class Utf8Validator {
public:
    /// Returns false at the first invalid byte.
    bool feed(std::string_view bytes) {
        for (const char ch : bytes) {
            const auto byte = static_cast<unsigned char>(ch);
            if (pending_ == 0) {
                if (byte < 0x80) continue;
                if (byte >= 0xC2 && byte <= 0xDF) {
                    pending_ = 1;
                    lower_ = 0x80;
                    upper_ = 0xBF;
                } else if (byte >= 0xE0 && byte <= 0xEF) {
                    pending_ = 2;
                    lower_ = byte == 0xE0 ? 0xA0 : 0x80;
                    upper_ = byte == 0xED ? 0x9F : 0xBF;
                } else if (byte >= 0xF0 && byte <= 0xF4) {
                    pending_ = 3;
                    lower_ = byte == 0xF0 ? 0x90 : 0x80;
                    upper_ = byte == 0xF4 ? 0x8F : 0xBF;
                } else {
                    return false;
                }
            } else {
                if (byte < lower_ || byte > upper_) return false;
                lower_ = 0x80;
                upper_ = 0xBF;
                --pending_;
            }
        }
        return true;
    }

    /// True when no multi-byte sequence is left open.
    bool complete() const noexcept { return pending_ == 0; }

private:
    int pending_ = 0;
    unsigned char lower_ = 0x80;
    unsigned char upper_ = 0xBF;
};

inline bool is_valid_utf8(std::string_view bytes, bool allow_truncated_tail = false) {
    Utf8Validator v;
    if (!v.feed(bytes)) return false;
    return allow_truncated_tail || v.complete();
}

/// Appends the UTF-8 form of Latin-1 bytes to `out`.
inline void latin1_to_utf8(std::string_view bytes, std::string& out) {
    for (const char ch : bytes) {
        const auto byte = static_cast<unsigned char>(ch);
        if (byte < 0x80) {
            out.push_back(ch);
        } else {
            out.push_back(static_cast<char>(0xC0 | (byte >> 6)));
            out.push_back(static_cast<char>(0x80 | (byte & 0x3F)));
        }
    }
}

} // namespace autoviz::ingest
