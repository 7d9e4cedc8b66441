#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autoviz {

enum class ErrorCode {
    empty_input,
    undecidable_dialect,
    size_limit_exceeded,
    encoding_error,
    empty_table,
    all_missing_column,
    too_few_values,
    degenerate_scale,
    cardinality_too_high,
    non_positive_input,
    degenerate_table,
    too_few_rows,
    no_varying_columns,
    degenerate_spread,
    unknown_target,
    method_inapplicable,
    no_candidates,
    invalid_argument,
    io_error,
    internal,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::undecidable_dialect: return "undecidable_dialect";
    case ErrorCode::size_limit_exceeded: return "size_limit_exceeded";
    case ErrorCode::encoding_error: return "encoding_error";
    case ErrorCode::empty_table: return "empty_table";
    case ErrorCode::all_missing_column: return "all_missing_column";
    case ErrorCode::too_few_values: return "too_few_values";
    case ErrorCode::degenerate_scale: return "degenerate_scale";
    case ErrorCode::cardinality_too_high: return "cardinality_too_high";
    case ErrorCode::non_positive_input: return "non_positive_input";
    case ErrorCode::degenerate_table: return "degenerate_table";
    case ErrorCode::too_few_rows: return "too_few_rows";
    case ErrorCode::no_varying_columns: return "no_varying_columns";
    case ErrorCode::degenerate_spread: return "degenerate_spread";
    case ErrorCode::unknown_target: return "unknown_target";
    case ErrorCode::method_inapplicable: return "method_inapplicable";
    case ErrorCode::no_candidates: return "no_candidates";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::internal: return "internal";
    }
    return "internal";
}

/// HTTP status used when an error escapes to the service boundary.
constexpr int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::size_limit_exceeded: return 413;
    case ErrorCode::encoding_error:
    case ErrorCode::undecidable_dialect: return 415;
    case ErrorCode::invalid_argument: return 400;
    case ErrorCode::io_error:
    case ErrorCode::internal: return 500;
    default: return 422;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace autoviz
