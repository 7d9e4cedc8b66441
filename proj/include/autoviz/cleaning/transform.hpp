#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/cleaning/types.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::cleaning {

/// Label or one-hot encoding with categories in sorted order.
/// One-hot columns are named "column=value".
inline std::vector<Column> encode_categorical(const Column& column, EncodingMethod method) {
    if (!is_discrete(column.kind())) throw Error(ErrorCode::method_inapplicable, "encoding needs a categorical column");
    if (column.missing_count() > 0) throw Error(ErrorCode::invalid_argument, "encode after imputation: column has missing cells");
    if (method == EncodingMethod::none) return {column};

    const auto codes = column.codes();
    const auto& levels = column.levels();
    std::vector<std::uint8_t> used(levels.size(), 0);
    for (const auto c : codes) used[c] = 1;
    std::vector<std::uint32_t> order; // level codes in sorted-label order
    for (std::uint32_t l = 0; l < levels.size(); ++l)
        if (used[l]) order.push_back(l);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return levels[a] < levels[b]; });
    std::vector<std::uint32_t> rank(levels.size(), 0);
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

    if (method == EncodingMethod::label) {
        std::vector<double> values;
        values.reserve(codes.size());
        for (const auto c : codes) values.push_back(static_cast<double>(rank[c]));
        return {Column::numeric(column.name(), std::move(values))};
    }
    if (order.size() > kOneHotMaxLevels) {
        throw Error(ErrorCode::cardinality_too_high, "column '" + column.name() + "' has " + std::to_string(order.size()) +
                                                         " categories; one-hot allows at most " +
                                                         std::to_string(kOneHotMaxLevels));
    }
    std::vector<Column> out;
    for (const auto l : order) {
        std::vector<double> values;
        values.reserve(codes.size());
        for (const auto c : codes) values.push_back(c == l ? 1.0 : 0.0);
        out.push_back(Column::numeric(column.name() + "=" + levels[l], std::move(values)));
    }
    return out;
}

struct TransformResult {
    std::vector<double> values;
    TransformMethod applied = TransformMethod::none; // none, log or box_cox
    double shift = 0.0;                                // log: y = ln(x + shift)
    double lambda = 1.0;                               // box_cox
    double log_likelihood = 0.0;                       // box_cox

    std::vector<std::pair<std::string, double>> parameters() const {
        if (applied == TransformMethod::log) return {{"shift", shift}};
        if (applied == TransformMethod::box_cox) return {{"lambda", lambda}, {"log_likelihood", log_likelihood}};
        return {};
    }
};

inline std::vector<double> box_cox(std::span<const double> values, double lambda) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const double x : values) {
        if (!(x > 0.0)) throw Error(ErrorCode::non_positive_input, "box-cox needs strictly positive values");
        out.push_back(lambda == 0.0 ? std::log(x) : std::expm1(lambda * std::log(x)) / lambda);
    }
    return out;
}

/// Profile log-likelihood of the Box-Cox model at lambda (constants dropped).
inline double box_cox_log_likelihood(std::span<const double> values, double lambda) {
    const auto y = box_cox(values, lambda);
    double sum_log = 0.0;
    for (const double x : values) sum_log += std::log(x);
    const double var = analysis::population_std(y);
    const auto n = static_cast<double>(values.size());
    return (lambda - 1.0) * sum_log - n * std::log(var);
}

/// Lambda on the grid -5, -4.99, ..., 5 with the highest log-likelihood (first on ties).
inline double box_cox_lambda(std::span<const double> values) {
    double best = -std::numeric_limits<double>::infinity();
    double best_lambda = 1.0;
    for (int i = -500; i <= 500; ++i) {
        const double lambda = static_cast<double>(i) / 100.0;
        const double ll = box_cox_log_likelihood(values, lambda);
        if (ll > best) {
            best = ll;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

/// log: ln(x - min + 1); box_cox: grid-fitted lambda unless one is given;
/// auto: box_cox when every value is positive, else log, and only when |skewness| > 1.
inline TransformResult transform_skewed(std::span<const double> values, TransformMethod method,
                                        std::optional<double> fixed_lambda = std::nullopt) {
    TransformResult out;
    if (values.empty() || method == TransformMethod::none) {
        out.values.assign(values.begin(), values.end());
        return out;
    }
    if (method == TransformMethod::auto_select) {
        if (std::fabs(analysis::skewness(values)) <= 1.0) return transform_skewed(values, TransformMethod::none);
        const bool positive = std::all_of(values.begin(), values.end(), [](double x) { return x > 0.0; });
        return transform_skewed(values, positive ? TransformMethod::box_cox : TransformMethod::log, fixed_lambda);
    }
    if (method == TransformMethod::log) {
        out.applied = TransformMethod::log;
        out.shift = 1.0 - *std::min_element(values.begin(), values.end());
        out.values.reserve(values.size());
        for (const double x : values) out.values.push_back(std::log(x + out.shift));
        return out;
    }
    for (const double x : values)
        if (!(x > 0.0)) throw Error(ErrorCode::non_positive_input, "box-cox needs strictly positive values");
    out.applied = TransformMethod::box_cox;
    out.lambda = fixed_lambda ? *fixed_lambda : box_cox_lambda(values);
    out.log_likelihood = box_cox_log_likelihood(values, out.lambda);
    out.values = box_cox(values, out.lambda);
    return out;
}

} // namespace autoviz::cleaning
