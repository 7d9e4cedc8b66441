#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <streambuf>
#include <string>
#include <vector>

#include "autoviz/dataset.hpp"
#include "autoviz/ingest/dialect.hpp"
#include "autoviz/ingest/infer.hpp"
#include "autoviz/ingest/parser.hpp"

namespace autoviz::test_support {

inline ingest::ParseResult parse_text(const std::string& text, const ingest::Dialect& dialect) {
    std::istringstream in(text);
    return ingest::parse_table(in, dialect);
}

inline ingest::ParseResult parse_text(const std::string& text) {
    return parse_text(text, ingest::detect_dialect(text));
}

inline Dataset load_typed(const std::string& text) { return ingest::infer_types(parse_text(text).dataset).dataset; }

/// Streams a fixed prefix followed by `filler` bytes of one repeated character without allocating them.
class GeneratedStreamBuf : public std::streambuf {
public:
    GeneratedStreamBuf(std::string prefix, std::uint64_t filler, char fill)
        : prefix_(std::move(prefix)), remaining_(filler), block_(64 * 1024, fill) {}

protected:
    int_type underflow() override {
        if (!prefix_done_) {
            prefix_done_ = true;
            if (!prefix_.empty()) {
                setg(prefix_.data(), prefix_.data(), prefix_.data() + prefix_.size());
                return traits_type::to_int_type(*gptr());
            }
        }
        if (remaining_ == 0) return traits_type::eof();
        const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining_, block_.size()));
        remaining_ -= n;
        setg(block_.data(), block_.data(), block_.data() + n);
        return traits_type::to_int_type(*gptr());
    }

private:
    std::string prefix_;
    bool prefix_done_ = false;
    std::uint64_t remaining_;
    std::string block_;
};

/// Random table with mixed column kinds; `missing_rate` of cells are left empty.
inline std::string random_csv(std::mt19937_64& rng, std::size_t rows, std::size_t numeric_cols,
                              std::size_t categorical_cols, double missing_rate) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ostringstream out;
    const std::size_t width = numeric_cols + categorical_cols;
    for (std::size_t j = 0; j < width; ++j) {
        if (j) out << ',';
        out << (j < numeric_cols ? "num_" : "cat_") << j;
    }
    out << '\n';
    const char* levels[] = {"red", "green", "blue", "amber", "violet"};
    for (std::size_t i = 0; i < rows; ++i) {
        // ensure the first row has every numeric cell so the header heuristic sees numbers
        for (std::size_t j = 0; j < width; ++j) {
            if (j) out << ',';
            if (i > 1 && unit(rng) < missing_rate) continue;
            if (j < numeric_cols) {
                out << format_number(std::round((10.0 * normal(rng) + static_cast<double>(j)) * 1000.0) / 1000.0);
            } else {
                out << levels[static_cast<std::size_t>(unit(rng) * (2 + j % 4))];
            }
        }
        out << '\n';
    }
    return out.str();
}

} // namespace autoviz::test_support
