#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoviz/analysis/chi_square.hpp"
#include "autoviz/analysis/correlation.hpp"
#include "autoviz/analysis/kde.hpp"
#include "autoviz/analysis/mutual_info.hpp"
#include "autoviz/analysis/pca.hpp"
#include "autoviz/analysis/stats.hpp"
#include "autoviz/dataset.hpp"

namespace autoviz::analysis {

struct AnalysisOptions {
    std::size_t mi_bins = kDefaultBins;
    BandwidthRule bandwidth_rule = BandwidthRule::silverman;
    std::size_t kde_grid = kDefaultGridSize;
    std::size_t pca_components = 0;
    /// Columns with more levels than this are left out of chi-square tests.
    std::size_t max_chi_square_levels = 100;
};

struct StageStatus {
    std::string stage;
    bool skipped = false;
    std::string reason;
};

struct NamedSummary {
    std::string column;
    SummaryStats stats;
};

struct NamedChiSquare {
    std::string x;
    std::string y;
    ChiSquareResult result;
};

struct NamedDensity {
    std::string column;
    DensityEstimate estimate;
};

struct AnalysisResult {
    std::vector<NamedSummary> summaries;
    std::optional<CorrelationMatrix> correlation;
    std::vector<NamedChiSquare> chi_square;
    std::optional<PCAResult> pca;
    std::vector<MIScore> mutual_information;
    std::vector<NamedDensity> densities;
    std::vector<StageStatus> stages;
    std::vector<std::string> warnings;

    const SummaryStats* summary(std::string_view column) const {
        for (const auto& s : summaries)
            if (s.column == column) return &s.stats;
        return nullptr;
    }

    const ChiSquareResult* chi_square_for(std::string_view a, std::string_view b) const {
        for (const auto& c : chi_square)
            if ((c.x == a && c.y == b) || (c.x == b && c.y == a)) return &c.result;
        return nullptr;
    }

    const MIScore* mi_for(std::string_view a, std::string_view b) const {
        for (const auto& m : mutual_information)
            if ((m.x == a && m.y == b) || (m.x == b && m.y == a)) return &m;
        return nullptr;
    }

    const DensityEstimate* density(std::string_view column) const {
        for (const auto& d : densities)
            if (d.column == column) return &d.estimate;
        return nullptr;
    }

    std::optional<double> correlation_between(std::string_view a, std::string_view b) const {
        if (!correlation) return std::nullopt;
        const auto i = correlation->index_of(a);
        const auto j = correlation->index_of(b);
        if (i < 0 || j < 0) return std::nullopt;
        return correlation->values(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    bool stage_skipped(std::string_view stage) const {
        for (const auto& s : stages)
            if (s.stage == stage) return s.skipped;
        return false;
    }
};

/// Runs every analysis stage. A stage that fails as a whole is marked skipped
/// with the reason; a pathological column only loses its own entry.
inline AnalysisResult analyze(const Dataset& data, const AnalysisOptions& options = {}) {
    AnalysisResult out;
    const auto numeric = data.numeric_indices();
    const auto discrete = data.discrete_indices();

    auto run = [&](std::string stage, auto&& body) {
        try {
            body();
            out.stages.push_back({std::move(stage), false, {}});
        } catch (const Error& e) {
            out.warnings.push_back(stage + " skipped: " + e.what());
            out.stages.push_back({std::move(stage), true, e.what()});
        }
    };

    run("summary_stats", [&] {
        for (const auto c : numeric) {
            const auto& col = data.column(c);
            const auto values = col.present_numbers();
            if (values.empty()) {
                out.warnings.push_back("summary_stats: column '" + col.name() + "' has no values");
                continue;
            }
            out.summaries.push_back({col.name(), summary_stats(values)});
        }
    });

    run("correlation", [&] {
        if (numeric.size() < 2) throw Error(ErrorCode::too_few_values, "fewer than 2 numeric columns");
        out.correlation = pearson_matrix(data, numeric);
    });

    run("chi_square", [&] {
        std::vector<std::size_t> usable;
        for (const auto c : discrete) {
            const auto& col = data.column(c);
            if (col.levels().size() > options.max_chi_square_levels) {
                out.warnings.push_back("chi_square: column '" + col.name() + "' has " +
                                       std::to_string(col.levels().size()) + " levels and was not tested");
            } else {
                usable.push_back(c);
            }
        }
        if (usable.size() < 2) throw Error(ErrorCode::too_few_values, "fewer than 2 categorical columns");
        for (std::size_t a = 0; a < usable.size(); ++a) {
            for (std::size_t b = a + 1; b < usable.size(); ++b) {
                const auto& x = data.column(usable[a]);
                const auto& y = data.column(usable[b]);
                try {
                    out.chi_square.push_back({x.name(), y.name(), chi_square(x, y)});
                } catch (const Error& e) {
                    out.warnings.push_back("chi_square: " + x.name() + " x " + y.name() + ": " + e.what());
                }
            }
        }
    });

    run("pca", [&] {
        if (numeric.size() < 2) throw Error(ErrorCode::too_few_values, "fewer than 2 numeric columns");
        out.pca = pca(data, numeric, options.pca_components);
        for (const auto& w : out.pca->warnings) out.warnings.push_back("pca: " + w);
    });

    run("mutual_information", [&] {
        std::vector<std::size_t> usable;
        for (std::size_t c = 0; c < data.column_count(); ++c) {
            if (data.column(c).kind() != ColumnKind::text) usable.push_back(c);
        }
        if (usable.size() < 2) throw Error(ErrorCode::too_few_values, "fewer than 2 analysable columns");
        std::vector<Discretized> bins;
        for (const auto c : usable) bins.push_back(discretize(data.column(c), options.mi_bins));
        for (std::size_t a = 0; a < usable.size(); ++a) {
            for (std::size_t b = a + 1; b < usable.size(); ++b) {
                out.mutual_information.push_back({data.column(usable[a]).name(), data.column(usable[b]).name(),
                                                  mutual_information(bins[a], bins[b]),
                                                  std::max(bins[a].bins_used, bins[b].bins_used)});
            }
        }
    });

    run("kde", [&] {
        for (const auto c : numeric) {
            const auto& col = data.column(c);
            try {
                out.densities.push_back({col.name(), kde(col.present_numbers(), options.bandwidth_rule, options.kde_grid)});
            } catch (const Error& e) {
                out.warnings.push_back("kde: column '" + col.name() + "': " + e.what());
            }
        }
    });

    return out;
}

} // namespace autoviz::analysis
