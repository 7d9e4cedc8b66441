#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "autoviz/cleaning/types.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::cleaning {

struct ImputedColumn {
    Column column;
    std::vector<Imputation> ledger; // row order
};

/// KNN imputation over every numeric column of a table.
///
/// Distances use the other numeric columns standardized to zero mean and unit
/// population variance, only over dimensions present in both rows, rescaled by
/// sqrt(total / used). Ties in distance go to the lower row index.
class KnnImputer {
public:
    KnnImputer(const Dataset& data, ImputationConfig config) : data_(data), config_(config) {
        config_.validate();
        numeric_ = data.numeric_indices();
        rows_ = data.row_count();
        for (const auto c : numeric_) {
            const auto& col = data.column(c);
            const auto xs = col.numbers();
            const auto mask = col.present_mask();
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (!mask[i]) continue;
                sum += xs[i];
                ++n;
            }
            const double mu = n ? sum / static_cast<double>(n) : 0.0;
            double ss = 0.0;
            for (std::size_t i = 0; i < rows_; ++i)
                if (mask[i]) ss += (xs[i] - mu) * (xs[i] - mu);
            const double sd = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;

            std::vector<double> z(rows_, 0.0);
            std::vector<float> m(rows_, 0.0f);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (!mask[i]) continue;
                m[i] = 1.0f;
                z[i] = sd > 0.0 ? (xs[i] - mu) / sd : 0.0;
            }
            z_.push_back(std::move(z));
            m_.push_back(std::move(m));
            means_.push_back(mu);
            present_.push_back(n);
        }
    }

    /// Imputes one numeric column; throws AllMissingColumn when it has no values.
    ImputedColumn impute(std::size_t column_index) {
        const auto slot = slot_of(column_index);
        check_has_values(slot);
        return assemble(slot, solve({slot})[0]);
    }

    /// Imputes every numeric column that has at least one value, in column order.
    std::vector<ImputedColumn> impute_all() && {
        std::vector<ImputedColumn> out;
        std::move(*this).impute_all([&](std::size_t, ImputedColumn c) { out.push_back(std::move(c)); });
        return out;
    }

    /// Same, handing each column to sink(column_index, ImputedColumn) as soon as
    /// it is built. Consumes the imputer: the standardized workspace is released
    /// before the first column is assembled.
    template <class Sink>
    void impute_all(Sink&& sink) && {
        std::vector<std::size_t> slots;
        for (std::size_t s = 0; s < numeric_.size(); ++s)
            if (present_[s] > 0) slots.push_back(s);
        auto filled = solve(slots);
        std::vector<std::vector<double>>().swap(z_);
        std::vector<std::vector<float>>().swap(m_);
        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto column = assemble(slots[i], filled[i]);
            std::vector<Fill>().swap(filled[i]);
            sink(numeric_[slots[i]], std::move(column));
        }
    }

    const std::vector<std::size_t>& numeric_columns() const { return numeric_; }

private:
    struct Fill {
        std::size_t row;
        double value;
        const char* method;
    };

    using Neighbor = std::pair<double, std::size_t>; // (distance, row)

    // k nearest so far, ascending by (distance, row)
    struct Nearest {
        std::size_t query = 0;
        std::size_t slot = 0;
        std::vector<Neighbor> best;
    };

    static constexpr std::size_t kQueryBatch = 32;
    static constexpr std::size_t kRowBlock = 2048;

    std::size_t slot_of(std::size_t column_index) const {
        const auto it = std::find(numeric_.begin(), numeric_.end(), column_index);
        if (it == numeric_.end()) throw Error(ErrorCode::method_inapplicable, "knn imputation needs a numeric column");
        return static_cast<std::size_t>(it - numeric_.begin());
    }

    void check_has_values(std::size_t slot) const {
        if (present_[slot] == 0) {
            throw Error(ErrorCode::all_missing_column,
                        "column '" + data_.column(numeric_[slot]).name() + "' has no values to impute from");
        }
    }

    // Fills for each requested slot, in row order. The target is missing in the
    // query row, so one distance pass per query row serves all of its targets.
    // Queries are processed in batches against blocks of candidate rows so each
    // block is reused from cache.
    std::vector<std::vector<Fill>> solve(const std::vector<std::size_t>& slots) const {
        std::vector<std::vector<Fill>> out(slots.size());
        std::vector<std::size_t> queries;
        for (std::size_t i = 0; i < rows_; ++i) {
            for (const auto s : slots) {
                if (m_[s][i] == 0.0f) {
                    queries.push_back(i);
                    break;
                }
            }
        }
        const double total = static_cast<double>(z_.size()) - 1.0;
        const std::size_t batches = (queries.size() + kQueryBatch - 1) / kQueryBatch;
        std::vector<std::vector<std::pair<std::size_t, Fill>>> results(batches); // (slot index, fill)

        auto run_batch = [&](std::size_t batch, double* sum, double* used) {
            const std::size_t q0 = batch * kQueryBatch;
            const std::size_t q1 = std::min(queries.size(), q0 + kQueryBatch);
            std::vector<Nearest> searches;
            for (std::size_t q = q0; q < q1; ++q)
                for (std::size_t k = 0; k < slots.size(); ++k)
                    if (m_[slots[k]][queries[q]] == 0.0f) searches.push_back({queries[q], k, {}});
            if (total > 0.0) {
                for (std::size_t j0 = 0; j0 < rows_; j0 += kRowBlock) {
                    const std::size_t len = std::min(kRowBlock, rows_ - j0);
                    std::size_t last_query = rows_;
                    for (auto& search : searches) {
                        if (search.query != last_query) {
                            block_distances(search.query, j0, len, sum, used);
                            last_query = search.query;
                        }
                        scan_block(search, slots[search.slot], j0, len, sum, used, total);
                    }
                }
            }
            auto& fills = results[batch];
            fills.reserve(searches.size());
            for (const auto& search : searches) fills.emplace_back(search.slot, finish(search, slots[search.slot]));
        };

        std::size_t threads = config_.threads ? config_.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = std::min(threads, batches);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            std::vector<double> sum(kRowBlock), used(kRowBlock);
            for (std::size_t b = next++; b < batches; b = next++) run_batch(b, sum.data(), used.data());
        };
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        for (const auto& fills : results)
            for (const auto& [k, fill] : fills) out[k].push_back(fill);
        return out;
    }

    void block_distances(std::size_t query, std::size_t j0, std::size_t len, double* sum, double* used) const {
        std::fill(sum, sum + len, 0.0);
        std::fill(used, used + len, 0.0);
        for (std::size_t d = 0; d < z_.size(); ++d) {
            if (m_[d][query] == 0.0f) continue;
            const double zq = z_[d][query];
            const double* zd = z_[d].data() + j0;
            const float* md = m_[d].data() + j0;
            for (std::size_t j = 0; j < len; ++j) {
                const double diff = zd[j] - zq;
                sum[j] += md[j] * diff * diff;
                used[j] += md[j];
            }
        }
    }

    void scan_block(Nearest& search, std::size_t slot, std::size_t j0, std::size_t len, const double* sum,
                    const double* used, double total) const {
        const float* target = m_[slot].data() + j0;
        const std::size_t k = config_.knn_k;
        // squared bound with slack; anything above it cannot beat the current k-th distance
        double bound = std::numeric_limits<double>::infinity();
        if (search.best.size() == k) bound = search.best.back().first * search.best.back().first * (1.0 + 1e-9);
        for (std::size_t j = 0; j < len; ++j) {
            if (target[j] == 0.0f || used[j] == 0.0 || j0 + j == search.query) continue;
            if (sum[j] * total > bound * used[j]) continue;
            const Neighbor e{std::sqrt(sum[j] * total / used[j]), j0 + j};
            if (search.best.size() == k) {
                if (!(e < search.best.back())) continue;
                search.best.pop_back();
            }
            search.best.insert(std::upper_bound(search.best.begin(), search.best.end(), e), e);
            if (search.best.size() == k) {
                bound = search.best.back().first * search.best.back().first * (1.0 + 1e-9);
            }
        }
    }

    Fill finish(const Nearest& search, std::size_t slot) const {
        if (search.best.empty()) return {search.query, means_[slot], "column_mean"};
        const auto xs = data_.column(numeric_[slot]).numbers();
        double acc = 0.0;
        for (const auto& [d, j] : search.best) acc += xs[j];
        return {search.query, acc / static_cast<double>(search.best.size()), "knn"};
    }

    ImputedColumn assemble(std::size_t slot, const std::vector<Fill>& filled) const {
        const auto& col = data_.column(numeric_[slot]);
        if (filled.empty()) return {col, {}};
        const auto xs = col.numbers();
        std::vector<double> values(xs.begin(), xs.end());
        std::vector<Imputation> ledger;
        ledger.reserve(filled.size());
        for (const auto& f : filled) {
            values[f.row] = f.value;
            ledger.push_back({col.name(), f.row, f.value, f.method});
        }
        return {Column::numeric(col.name(), std::move(values)), std::move(ledger)};
    }

    const Dataset& data_;
    ImputationConfig config_;
    std::size_t rows_ = 0;
    std::vector<std::size_t> numeric_;
    std::vector<std::vector<double>> z_;
    std::vector<std::vector<float>> m_; // 1 where present
    std::vector<double> means_;
    std::vector<std::size_t> present_;
};

inline ImputedColumn impute_numeric_knn(const Dataset& data, std::string_view column, const ImputationConfig& config = {}) {
    const auto index = data.index_of(column);
    if (!index) throw Error(ErrorCode::invalid_argument, "unknown column '" + std::string(column) + "'");
    return KnnImputer(data, config).impute(*index);
}

/// Fills missing cells with the most frequent present label; ties go to the lexicographically smallest.
inline ImputedColumn impute_categorical_mode(const Column& column) {
    if (!is_discrete(column.kind())) {
        throw Error(ErrorCode::method_inapplicable, "mode imputation needs a categorical column");
    }
    const auto codes = column.codes();
    const auto mask = column.present_mask();
    const auto& levels = column.levels();
    std::vector<std::size_t> counts(levels.size(), 0);
    std::size_t present = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!mask[i]) continue;
        ++counts[codes[i]];
        ++present;
    }
    if (present == 0) {
        throw Error(ErrorCode::all_missing_column, "column '" + column.name() + "' has no values to impute from");
    }
    std::uint32_t mode = 0;
    for (std::uint32_t l = 1; l < levels.size(); ++l) {
        if (counts[l] > counts[mode] || (counts[l] == counts[mode] && levels[l] < levels[mode])) mode = l;
    }
    if (present == codes.size()) return {column, {}};

    std::vector<std::uint32_t> filled(codes.begin(), codes.end());
    ImputedColumn out{column, {}};
    out.ledger.reserve(codes.size() - present);
    for (std::size_t i = 0; i < filled.size(); ++i) {
        if (mask[i]) continue;
        filled[i] = mode;
        out.ledger.push_back({column.name(), i, levels[mode], "mode"});
    }
    out.column = Column::categorical(column.name(), std::move(filled), levels,
                                     std::vector<std::uint8_t>(codes.size(), 1), column.kind());
    return out;
}

} // namespace autoviz::cleaning
