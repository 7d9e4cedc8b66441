#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "autoviz/analysis/special.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::analysis {

using CountTable = std::vector<std::vector<double>>;

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    CountTable observed;
    CountTable expected;
    bool low_expected_warning = false;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    double n = 0.0;

    /// Cramer's V in [0, 1].
    double cramers_v() const {
        const auto k = std::min(observed.size(), observed.empty() ? 0 : observed[0].size());
        if (k < 2 || n <= 0.0) return 0.0;
        return std::min(1.0, std::sqrt(statistic / (n * static_cast<double>(k - 1))));
    }
};

/// Independence test on a contingency table; all-zero rows and columns are pruned first.
inline ChiSquareResult chi_square_table(const CountTable& table, std::vector<std::string> row_labels = {},
                                        std::vector<std::string> col_labels = {}) {
    const std::size_t r0 = table.size();
    const std::size_t c0 = r0 ? table[0].size() : 0;
    if (row_labels.empty())
        for (std::size_t i = 0; i < r0; ++i) row_labels.push_back(std::to_string(i));
    if (col_labels.empty())
        for (std::size_t j = 0; j < c0; ++j) col_labels.push_back(std::to_string(j));

    std::vector<double> row_sum(r0, 0.0), col_sum(c0, 0.0);
    for (std::size_t i = 0; i < r0; ++i) {
        if (table[i].size() != c0) throw Error(ErrorCode::invalid_argument, "contingency table is ragged");
        for (std::size_t j = 0; j < c0; ++j) {
            if (!(table[i][j] >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative count in table");
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
        }
    }
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < r0; ++i)
        if (row_sum[i] > 0.0) rows.push_back(i);
    for (std::size_t j = 0; j < c0; ++j)
        if (col_sum[j] > 0.0) cols.push_back(j);
    if (rows.size() < 2 || cols.size() < 2) {
        throw Error(ErrorCode::degenerate_table, "contingency table needs two non-empty rows and columns");
    }

    ChiSquareResult out;
    for (const auto i : rows) out.n += row_sum[i];
    out.observed.assign(rows.size(), std::vector<double>(cols.size()));
    out.expected.assign(rows.size(), std::vector<double>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) {
        out.row_labels.push_back(row_labels[rows[a]]);
        for (std::size_t b = 0; b < cols.size(); ++b) {
            const double o = table[rows[a]][cols[b]];
            const double e = row_sum[rows[a]] * col_sum[cols[b]] / out.n;
            out.observed[a][b] = o;
            out.expected[a][b] = e;
            out.statistic += (o - e) * (o - e) / e;
            if (e < 5.0) out.low_expected_warning = true;
        }
    }
    for (const auto j : cols) out.col_labels.push_back(col_labels[j]);
    out.dof = static_cast<int>((rows.size() - 1) * (cols.size() - 1));
    out.p_value = std::clamp(chi_square_survival(out.statistic, out.dof), 0.0, 1.0);
    return out;
}

/// Cross-tabulates two discrete columns over co-present rows and tests independence.
inline ChiSquareResult chi_square(const Column& a, const Column& b) {
    if (!is_discrete(a.kind()) || !is_discrete(b.kind())) {
        throw Error(ErrorCode::method_inapplicable, "chi-square needs two categorical columns");
    }
    const auto ac = a.codes();
    const auto bc = b.codes();
    const auto am = a.present_mask();
    const auto bm = b.present_mask();
    CountTable table(a.levels().size(), std::vector<double>(b.levels().size(), 0.0));
    for (std::size_t i = 0; i < std::min(ac.size(), bc.size()); ++i) {
        if (am[i] && bm[i]) table[ac[i]][bc[i]] += 1.0;
    }
    return chi_square_table(table, a.levels(), b.levels());
}

} // namespace autoviz::analysis
