#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"
#include "autoviz/ingest/dialect.hpp"
#include "autoviz/ingest/encoding.hpp"

namespace autoviz::ingest {

inline constexpr std::uint64_t kDefaultMaxBytes = 500ull * 1000 * 1000;

struct ParseOptions {
    std::uint64_t max_bytes = kDefaultMaxBytes;
    /// Only the first this-many ragged-row warnings are kept verbatim; the rest are counted.
    std::size_t max_kept_warnings = 100;
};

struct RaggedRow {
    enum class Kind { padded, truncated };
    Kind kind;
    std::size_t row;    // 0-based data row
    std::size_t fields; // fields found in the record
    std::size_t width;  // table width

    std::string message() const {
        const std::string what = kind == Kind::padded ? "padded with missing" : "truncated";
        return "row " + std::to_string(row + 1) + " has " + std::to_string(fields) + " fields, expected " +
               std::to_string(width) + "; " + what;
    }
};

struct ParseResult {
    Dataset dataset; // untyped: every column has kind text
    std::vector<RaggedRow> warnings;
    std::size_t padded_rows = 0;
    std::size_t truncated_rows = 0;
    std::uint64_t bytes_read = 0;

    std::size_t count(RaggedRow::Kind kind) const {
        return kind == RaggedRow::Kind::padded ? padded_rows : truncated_rows;
    }
};

/// Makes header names unique by suffixing repeats as name_2, name_3, ...
inline std::vector<std::string> deduplicate_names(std::vector<std::string> names) {
    std::unordered_set<std::string> used;
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::string base(trim(names[j]));
        if (base.empty()) base = "col_" + std::to_string(j + 1);
        std::string candidate = base;
        for (int suffix = 2; used.count(candidate); ++suffix) candidate = base + "_" + std::to_string(suffix);
        used.insert(candidate);
        names[j] = std::move(candidate);
    }
    return names;
}

namespace detail {

/// RFC-4180 record assembler fed with decoded UTF-8 text in arbitrary chunks.
class TableBuilder {
public:
    TableBuilder(const Dialect& dialect, const ParseOptions& options)
        : delimiter_(dialect.delimiter), quote_(dialect.quote), expect_header_(dialect.has_header),
          options_(options) {}

    void feed(std::string_view text) {
        for (const char ch : text) {
            if (pending_cr_) {
                pending_cr_ = false;
                end_record();
                if (ch == '\n') continue;
            }
            switch (state_) {
            case State::field_start:
                if (ch == quote_) {
                    state_ = State::quoted;
                    field_quoted_ = true;
                } else if (ch == delimiter_) {
                    end_field();
                } else if (ch == '\n') {
                    end_record();
                } else if (ch == '\r') {
                    pending_cr_ = true;
                } else {
                    field_.push_back(ch);
                    state_ = State::unquoted;
                }
                break;
            case State::unquoted:
                if (ch == delimiter_) {
                    end_field();
                } else if (ch == '\n') {
                    end_record();
                } else if (ch == '\r') {
                    pending_cr_ = true;
                } else {
                    field_.push_back(ch);
                }
                break;
            case State::quoted:
                if (ch == quote_) state_ = State::quote_in_quoted;
                else field_.push_back(ch);
                break;
            case State::quote_in_quoted:
                if (ch == quote_) {
                    field_.push_back(quote_);
                    state_ = State::quoted;
                } else if (ch == delimiter_) {
                    end_field();
                } else if (ch == '\n') {
                    end_record();
                } else if (ch == '\r') {
                    pending_cr_ = true;
                } else {
                    // lenient: text after a closing quote is kept
                    field_.push_back(ch);
                    state_ = State::unquoted;
                }
                break;
            }
        }
    }

    ParseResult finish(std::uint64_t bytes_read) {
        if (pending_cr_) {
            pending_cr_ = false;
            end_record();
        } else if (state_ != State::field_start || record_size_ > 0) {
            end_record();
        }
        if (!width_known_ || data_rows_ == 0) throw Error(ErrorCode::empty_table, "input has no data rows");

        std::vector<Column> columns;
        columns.reserve(width_);
        for (std::size_t j = 0; j < width_; ++j) {
            columns.push_back(Column::text(std::move(names_[j]), std::move(cells_[j]), std::move(present_[j])));
        }
        result_.dataset = Dataset(std::move(columns));
        result_.bytes_read = bytes_read;
        return std::move(result_);
    }

private:
    enum class State { field_start, unquoted, quoted, quote_in_quoted };

    void end_field() {
        if (record_size_ == record_.size()) record_.emplace_back();
        record_[record_size_].swap(field_);
        quoted_.resize(record_.size());
        quoted_[record_size_] = field_quoted_;
        ++record_size_;
        field_.clear();
        field_quoted_ = false;
        state_ = State::field_start;
    }

    void end_record() {
        if (record_size_ == 0 && field_.empty() && !field_quoted_) {
            state_ = State::field_start;
            return; // blank line
        }
        end_field();
        const bool blank = record_size_ == 1 && record_[0].empty() && !quoted_[0];
        if (!blank) consume_record();
        record_size_ = 0;
    }

    void consume_record() {
        if (!width_known_) {
            width_known_ = true;
            width_ = record_size_;
            cells_.resize(width_);
            present_.resize(width_);
            if (expect_header_) {
                names_.assign(record_.begin(), record_.begin() + static_cast<std::ptrdiff_t>(width_));
                names_ = deduplicate_names(std::move(names_));
                return;
            }
            names_.clear();
            for (std::size_t j = 0; j < width_; ++j) names_.push_back("col_" + std::to_string(j + 1));
        }

        if (record_size_ != width_) {
            const auto kind = record_size_ < width_ ? RaggedRow::Kind::padded : RaggedRow::Kind::truncated;
            (kind == RaggedRow::Kind::padded ? result_.padded_rows : result_.truncated_rows) += 1;
            if (result_.warnings.size() < options_.max_kept_warnings) {
                result_.warnings.push_back({kind, data_rows_, record_size_, width_});
            }
        }

        for (std::size_t j = 0; j < width_; ++j) {
            auto& cells = cells_[j];
            // An empty unquoted field is a missing cell; "" is a present empty string.
            const bool present = j < record_size_ && (!record_[j].empty() || quoted_[j]);
            if (present) cells.bytes.append(record_[j]);
            if (cells.bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
                throw Error(ErrorCode::size_limit_exceeded, "column text exceeds 4 GiB");
            }
            cells.ends.push_back(static_cast<std::uint32_t>(cells.bytes.size()));
            present_[j].push_back(present ? 1 : 0);
        }
        ++data_rows_;
    }

    char delimiter_;
    char quote_;
    bool expect_header_;
    ParseOptions options_;

    State state_ = State::field_start;
    bool pending_cr_ = false;
    bool field_quoted_ = false;
    std::string field_;
    std::vector<std::string> record_;
    std::vector<bool> quoted_;
    std::size_t record_size_ = 0;

    bool width_known_ = false;
    std::size_t width_ = 0;
    std::size_t data_rows_ = 0;
    std::vector<std::string> names_;
    std::vector<Column::TextCells> cells_;
    std::vector<std::vector<std::uint8_t>> present_;
    ParseResult result_;
};

} // namespace detail

/// Single-pass parse of a delimited byte stream into an untyped table.
///
/// Bytes are decoded as they arrive (UTF-8 validated, or Latin-1 transcoded
/// to UTF-8), so the raw input is never held in memory as a whole.
inline ParseResult parse_table(std::istream& in, const Dialect& dialect, const ParseOptions& options = {}) {
    constexpr std::size_t kChunk = 64 * 1024;
    std::string raw(kChunk, '\0');
    std::string decoded;
    Utf8Validator validator;
    detail::TableBuilder builder(dialect, options);
    std::uint64_t total = 0;
    bool first = true;

    while (in) {
        in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0) break;
        total += got;
        if (total > options.max_bytes) {
            throw Error(ErrorCode::size_limit_exceeded,
                        "input exceeds the " + std::to_string(options.max_bytes) + " byte limit");
        }
        std::string_view chunk(raw.data(), got);
        if (first) {
            first = false;
            if (dialect.encoding != Encoding::latin1 && chunk.starts_with(kUtf8Bom)) chunk.remove_prefix(3);
        }
        if (dialect.encoding == Encoding::latin1) {
            decoded.clear();
            latin1_to_utf8(chunk, decoded);
            builder.feed(decoded);
        } else {
            if (!validator.feed(chunk)) {
                throw Error(ErrorCode::encoding_error, "invalid UTF-8 near byte " + std::to_string(total - got));
            }
            builder.feed(chunk);
        }
    }
    if (!validator.complete()) throw Error(ErrorCode::encoding_error, "input ends inside a UTF-8 sequence");
    return builder.finish(total);
}

} // namespace autoviz::ingest
