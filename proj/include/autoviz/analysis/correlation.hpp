#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "autoviz/analysis/matrix.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::analysis {

struct PearsonPair {
    double r = 0.0;
    std::size_t n = 0;
    bool degenerate = true; // fewer than two rows or zero variance on either side
};

/// Pearson r over rows where both columns are present.
inline PearsonPair pearson(const Column& x, const Column& y) {
    if (x.kind() != ColumnKind::numeric || y.kind() != ColumnKind::numeric) {
        throw Error(ErrorCode::method_inapplicable, "pearson needs two numeric columns");
    }
    const auto xs = x.numbers();
    const auto ys = y.numbers();
    const auto& xm = x.present_mask();
    const auto& ym = y.present_mask();
    const std::size_t rows = std::min(xs.size(), ys.size());

    PearsonPair out;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!xm[i] || !ym[i]) continue;
        sx += xs[i];
        sy += ys[i];
        ++out.n;
    }
    if (out.n < 2) return out;
    const double mx = sx / static_cast<double>(out.n);
    const double my = sy / static_cast<double>(out.n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!xm[i] || !ym[i]) continue;
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return out;
    out.degenerate = false;
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return out;
}

struct CorrelationMatrix {
    std::vector<std::string> feature_names;
    Matrix values;
    std::vector<std::size_t> pair_counts; // row-major, same shape as values
    std::vector<std::uint8_t> degenerate; // row-major

    std::size_t size() const { return feature_names.size(); }
    std::size_t count(std::size_t i, std::size_t j) const { return pair_counts[i * size() + j]; }
    bool is_degenerate(std::size_t i, std::size_t j) const { return degenerate[i * size() + j] != 0; }

    std::ptrdiff_t index_of(std::string_view name) const {
        const auto it = std::find(feature_names.begin(), feature_names.end(), name);
        return it == feature_names.end() ? -1 : it - feature_names.begin();
    }
};

/// Pairwise-complete correlation matrix over the given numeric columns.
inline CorrelationMatrix pearson_matrix(const Dataset& data, const std::vector<std::size_t>& columns) {
    CorrelationMatrix out;
    const std::size_t p = columns.size();
    out.values = Matrix(p, p);
    out.pair_counts.assign(p * p, 0);
    out.degenerate.assign(p * p, 1);
    for (const auto c : columns) out.feature_names.push_back(data.column(c).name());

    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            const auto pair = pearson(data.column(columns[i]), data.column(columns[j]));
            const double r = i == j ? (pair.degenerate ? 0.0 : 1.0) : pair.r;
            out.values(i, j) = out.values(j, i) = r;
            out.pair_counts[i * p + j] = out.pair_counts[j * p + i] = pair.n;
            out.degenerate[i * p + j] = out.degenerate[j * p + i] = pair.degenerate ? 1 : 0;
        }
    }
    return out;
}

inline CorrelationMatrix pearson_matrix(const Dataset& data) { return pearson_matrix(data, data.numeric_indices()); }

} // namespace autoviz::analysis
