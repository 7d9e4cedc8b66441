#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::analysis {

inline constexpr std::size_t kDefaultBins = 10;

/// A column reduced to integer labels: bins for numbers, level codes otherwise.
struct Discretized {
    std::vector<std::uint32_t> codes;
    std::vector<std::uint8_t> present;
    std::size_t labels = 0;    // codes lie in [0, labels)
    std::size_t bins_used = 0; // requested bins after the sqrt(n) clamp; 0 for categorical input
};

/// Equal-frequency bin target for n values: min(bins, floor(sqrt(n))), at least 2.
inline std::size_t clamp_bins(std::size_t bins, std::size_t n) {
    const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    return std::max<std::size_t>(2, std::min(bins, root));
}

inline Discretized discretize(const Column& column, std::size_t bins = kDefaultBins) {
    if (bins < 2) throw Error(ErrorCode::invalid_argument, "mutual information needs at least 2 bins");
    Discretized out;
    const auto mask = column.present_mask();
    out.present.assign(mask.begin(), mask.end());
    if (is_discrete(column.kind())) {
        const auto codes = column.codes();
        out.codes.assign(codes.begin(), codes.end());
        out.labels = column.levels().size();
        return out;
    }
    if (column.kind() != ColumnKind::numeric) {
        throw Error(ErrorCode::method_inapplicable, "column '" + column.name() + "' is neither numeric nor categorical");
    }
    const auto sorted = sorted_copy(column.present_numbers());
    out.codes.assign(column.size(), 0);
    if (sorted.empty()) {
        out.labels = 1;
        return out;
    }
    out.bins_used = clamp_bins(bins, sorted.size());
    std::vector<double> edges;
    for (std::size_t j = 1; j < out.bins_used; ++j) {
        const double edge = quantile_sorted(sorted, static_cast<double>(j) / static_cast<double>(out.bins_used));
        if (edges.empty() || edge != edges.back()) edges.push_back(edge);
    }
    const auto xs = column.numbers();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!mask[i]) continue;
        out.codes[i] = static_cast<std::uint32_t>(std::upper_bound(edges.begin(), edges.end(), xs[i]) - edges.begin());
    }
    out.labels = edges.size() + 1;
    return out;
}

namespace detail {

// Joint label counts over co-present rows, visited in ascending (a, b) order.
template <class Visit>
std::size_t joint_counts(const Discretized& x, const Discretized& y, std::vector<double>& px, std::vector<double>& py,
                         Visit&& visit) {
    const std::size_t rows = std::min(x.codes.size(), y.codes.size());
    px.assign(x.labels, 0.0);
    py.assign(y.labels, 0.0);
    std::size_t n = 0;
    const std::uint64_t cells = static_cast<std::uint64_t>(x.labels) * y.labels;
    if (cells <= (1u << 16)) {
        std::vector<std::uint32_t> dense(cells, 0);
        for (std::size_t i = 0; i < rows; ++i) {
            if (!x.present[i] || !y.present[i]) continue;
            ++dense[static_cast<std::uint64_t>(x.codes[i]) * y.labels + y.codes[i]];
            px[x.codes[i]] += 1.0;
            py[y.codes[i]] += 1.0;
            ++n;
        }
        for (std::uint64_t c = 0; c < cells; ++c)
            if (dense[c]) visit(c / y.labels, c % y.labels, static_cast<double>(dense[c]));
        return n;
    }
    std::vector<std::uint64_t> keys;
    keys.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!x.present[i] || !y.present[i]) continue;
        keys.push_back(static_cast<std::uint64_t>(x.codes[i]) * y.labels + y.codes[i]);
        px[x.codes[i]] += 1.0;
        py[y.codes[i]] += 1.0;
        ++n;
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        visit(keys[i] / y.labels, keys[i] % y.labels, static_cast<double>(j - i));
        i = j;
    }
    return n;
}

} // namespace detail

/// MI in nats between two discretized columns over co-present rows.
inline double mutual_information(const Discretized& x, const Discretized& y) {
    std::vector<double> px, py;
    std::vector<std::uint64_t> a_of, b_of;
    std::vector<double> count_of;
    const std::size_t n = detail::joint_counts(x, y, px, py, [&](std::uint64_t a, std::uint64_t b, double c) {
        a_of.push_back(a);
        b_of.push_back(b);
        count_of.push_back(c);
    });
    if (n == 0) return 0.0;
    const auto total = static_cast<double>(n);
    double mi = 0.0;
    for (std::size_t k = 0; k < count_of.size(); ++k) {
        const double c = count_of[k];
        mi += c / total * std::log(c * total / (px[a_of[k]] * py[b_of[k]]));
    }
    return std::max(0.0, mi);
}

/// Shannon entropy in nats of a discretized column over its present rows.
inline double entropy(const Discretized& x) {
    std::vector<double> counts(x.labels, 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < x.codes.size(); ++i) {
        if (!x.present[i]) continue;
        counts[x.codes[i]] += 1.0;
        n += 1.0;
    }
    double h = 0.0;
    for (const double c : counts)
        if (c > 0.0) h -= c / n * std::log(c / n);
    return h;
}

struct MIScore {
    std::string x;
    std::string y;
    double score = 0.0;
    std::size_t bins_used = 0;
};

inline MIScore mutual_information(const Column& x, const Column& y, std::size_t bins = kDefaultBins) {
    const auto dx = discretize(x, bins);
    const auto dy = discretize(y, bins);
    return {x.name(), y.name(), mutual_information(dx, dy), std::max(dx.bins_used, dy.bins_used)};
}

} // namespace autoviz::analysis
