#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autoviz/analysis/analyze.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"
#include "autoviz/ingest/profile.hpp"

namespace autoviz::charts {

enum class ChartType { bar, box, density, grouped_bar, heatmap, histogram, scatter };

constexpr std::string_view to_string(ChartType t) {
    switch (t) {
    case ChartType::bar: return "bar";
    case ChartType::box: return "box";
    case ChartType::density: return "density";
    case ChartType::grouped_bar: return "grouped_bar";
    case ChartType::heatmap: return "heatmap";
    case ChartType::histogram: return "histogram";
    case ChartType::scatter: return "scatter";
    }
    return "bar";
}

inline std::optional<ChartType> parse_chart_type(std::string_view s) {
    for (auto t : {ChartType::bar, ChartType::box, ChartType::density, ChartType::grouped_bar, ChartType::heatmap,
                   ChartType::histogram, ChartType::scatter})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

/// Charts plotting one column; the rest need a y column.
constexpr bool is_univariate(ChartType t) {
    return t == ChartType::histogram || t == ChartType::density || t == ChartType::bar;
}

enum class Aggregate { none, count, mean };

constexpr std::string_view to_string(Aggregate a) {
    switch (a) {
    case Aggregate::none: return "none";
    case Aggregate::count: return "count";
    case Aggregate::mean: return "mean";
    }
    return "none";
}

struct Criteria {
    double interpretability = 0.0;
    double relationship_strength = 0.0;
    double data_fit = 0.0;
};

struct Weights {
    double interpretability = 0.4;
    double relationship_strength = 0.4;
    double data_fit = 0.2;

    void validate() const {
        if (interpretability < 0 || relationship_strength < 0 || data_fit < 0 ||
            std::fabs(interpretability + relationship_strength + data_fit - 1.0) > 1e-9) {
            throw Error(ErrorCode::invalid_argument, "chart weights must be non-negative and sum to 1");
        }
    }
};

struct InterpretabilityTable {
    double bar = 1.0;
    double scatter = 0.9;
    double histogram = 0.9;
    double box = 0.8;
    double grouped_bar = 0.7;
    double heatmap = 0.6;
    double density = 0.6;

    double of(ChartType t) const {
        switch (t) {
        case ChartType::bar: return bar;
        case ChartType::box: return box;
        case ChartType::density: return density;
        case ChartType::grouped_bar: return grouped_bar;
        case ChartType::heatmap: return heatmap;
        case ChartType::histogram: return histogram;
        case ChartType::scatter: return scatter;
        }
        return 0.0;
    }
};

struct ChartConfig {
    Weights weights;
    InterpretabilityTable interpretability;
    std::size_t top_n = 5;
    std::size_t pair_cap = 30;        // per pair family
    std::size_t bar_max_levels = 50;
    std::size_t pair_max_levels = 20; // box, grouped_bar, heatmap
    std::size_t sample_rows = 10000;  // inline data in exported specs

    void validate() const {
        weights.validate();
        if (top_n < 1) throw Error(ErrorCode::invalid_argument, "top_n must be at least 1");
        if (sample_rows < 1 || sample_rows > 10000) throw Error(ErrorCode::invalid_argument, "sample_rows must lie in 1..10000");
    }
};

struct ChartSpec {
    ChartType chart_type = ChartType::histogram;
    std::string x;
    std::optional<std::string> y;
    Aggregate aggregate = Aggregate::none;
    std::string title;
    double score = 0.0;
    std::string rationale;
    Criteria criteria;
};

/// Axis arity, title and score range.
inline bool is_valid(const ChartSpec& s) {
    if (s.x.empty() || s.title.empty()) return false;
    if (is_univariate(s.chart_type) == s.y.has_value()) return false;
    return s.score >= 0.0 && s.score <= 1.0;
}

inline double weighted_score(const Criteria& c, const Weights& w) {
    const double s = w.interpretability * c.interpretability + w.relationship_strength * c.relationship_strength +
                     w.data_fit * c.data_fit;
    return std::clamp(s, 0.0, 1.0);
}

/// Between-group share of the total sum of squares (eta squared) over rows
/// where both columns are present. 0 when the values do not vary.
inline double between_group_fraction(const Column& groups, const Column& values) {
    if (!is_discrete(groups.kind()) || values.kind() != ColumnKind::numeric) {
        throw Error(ErrorCode::method_inapplicable, "eta squared needs a discrete and a numeric column");
    }
    const auto codes = groups.codes();
    const auto x = values.numbers();
    std::vector<double> sum(groups.levels().size(), 0.0);
    std::vector<std::size_t> count(groups.levels().size(), 0);
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!groups.is_present(i) || !values.is_present(i)) continue;
        sum[codes[i]] += x[i];
        ++count[codes[i]];
        total += x[i];
        ++n;
    }
    if (n == 0) return 0.0;
    const double mean = total / static_cast<double>(n);
    double ss_total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!groups.is_present(i) || !values.is_present(i)) continue;
        ss_total += (x[i] - mean) * (x[i] - mean);
    }
    if (!(ss_total > 0.0)) return 0.0;
    double ss_between = 0.0;
    for (std::size_t g = 0; g < sum.size(); ++g) {
        if (!count[g]) continue;
        const double d = sum[g] / static_cast<double>(count[g]) - mean;
        ss_between += static_cast<double>(count[g]) * d * d;
    }
    return std::clamp(ss_between / ss_total, 0.0, 1.0);
}

namespace detail {

inline const ingest::ColumnProfile& profile_of(const std::vector<ingest::ColumnProfile>& profiles, std::string_view name) {
    for (const auto& p : profiles)
        if (p.name == name) return p;
    throw Error(ErrorCode::invalid_argument, "no profile for column '" + std::string(name) + "'");
}

// cardinality fits, each in [0, 1]
inline double numeric_fit(std::size_t distinct) { return std::min(1.0, static_cast<double>(distinct) / 10.0); }

inline double bar_fit(std::size_t levels) {
    if (levels <= 10) return 1.0;
    if (levels >= 50) return 0.2;
    return 1.0 - 0.8 * static_cast<double>(levels - 10) / 40.0;
}

inline double group_fit(std::size_t groups) {
    if (groups <= 10) return 1.0;
    if (groups >= 20) return 0.5;
    return 1.0 - 0.5 * static_cast<double>(groups - 10) / 10.0;
}

inline double heatmap_fit(std::size_t cells) { return cells <= 100 ? 1.0 : 100.0 / static_cast<double>(cells); }

inline double skew_fit(double skewness) {
    if (!std::isfinite(skewness)) return 0.0;
    const double a = std::fabs(skewness);
    return 1.0 - a / (1.0 + a);
}

struct Pair {
    std::size_t a = 0, b = 0; // column indices
    double strength = 0.0;
};

// strongest first, ties in column order; keeps at most `cap`
inline void cap_pairs(std::vector<Pair>& pairs, std::size_t cap) {
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return l.strength > r.strength; });
    if (pairs.size() > cap) pairs.resize(cap);
    std::sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return l.a != r.a ? l.a < r.a : l.b < r.b; });
}

inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

/// Candidate charts from the rule table:
///   numeric                          -> histogram, density
///   discrete, 2..50 levels           -> bar (count)
///   numeric x numeric                -> scatter
///   discrete (2..20) x numeric       -> box, grouped_bar (mean)
///   discrete (2..20) x discrete      -> heatmap (count)
/// Each pair family keeps its 30 strongest pairs (|r|, eta squared, chi-square statistic).
inline std::vector<ChartSpec> enumerate_candidates(const Dataset& data, const std::vector<ingest::ColumnProfile>& profiles,
                                                   const analysis::AnalysisResult& analysis, const ChartConfig& config = {}) {
    const auto& cols = data.columns();
    std::vector<ChartSpec> out;
    auto levels = [&](std::size_t i) { return detail::profile_of(profiles, cols[i].name()).distinct_count; };
    auto pairable = [&](std::size_t i) {
        return is_discrete(cols[i].kind()) && levels(i) >= 2 && levels(i) <= config.pair_max_levels;
    };

    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].kind() == ColumnKind::numeric) {
            out.push_back({ChartType::histogram, cols[i].name(), std::nullopt, Aggregate::none, {}, 0, {}, {}});
            out.push_back({ChartType::density, cols[i].name(), std::nullopt, Aggregate::none, {}, 0, {}, {}});
        } else if (is_discrete(cols[i].kind()) && levels(i) >= 2 && levels(i) <= config.bar_max_levels) {
            out.push_back({ChartType::bar, cols[i].name(), std::nullopt, Aggregate::count, {}, 0, {}, {}});
        }
    }

    std::vector<detail::Pair> numeric_pairs, mixed_pairs, discrete_pairs;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        for (std::size_t j = i + 1; j < cols.size(); ++j) {
            const bool ni = cols[i].kind() == ColumnKind::numeric, nj = cols[j].kind() == ColumnKind::numeric;
            if (ni && nj) {
                const auto r = analysis.correlation_between(cols[i].name(), cols[j].name());
                numeric_pairs.push_back({i, j, r ? std::fabs(*r) : 0.0});
            } else if (ni != nj) {
                const std::size_t g = ni ? j : i, v = ni ? i : j;
                if (pairable(g)) mixed_pairs.push_back({g, v, between_group_fraction(cols[g], cols[v])});
            } else if (pairable(i) && pairable(j)) {
                const auto* c = analysis.chi_square_for(cols[i].name(), cols[j].name());
                discrete_pairs.push_back({i, j, c ? c->statistic : 0.0});
            }
        }
    }
    detail::cap_pairs(numeric_pairs, config.pair_cap);
    detail::cap_pairs(mixed_pairs, config.pair_cap);
    detail::cap_pairs(discrete_pairs, config.pair_cap);
    for (const auto& p : numeric_pairs)
        out.push_back({ChartType::scatter, cols[p.a].name(), cols[p.b].name(), Aggregate::none, {}, 0, {}, {}});
    for (const auto& p : mixed_pairs) {
        out.push_back({ChartType::box, cols[p.a].name(), cols[p.b].name(), Aggregate::none, {}, 0, {}, {}});
        out.push_back({ChartType::grouped_bar, cols[p.a].name(), cols[p.b].name(), Aggregate::mean, {}, 0, {}, {}});
    }
    for (const auto& p : discrete_pairs)
        out.push_back({ChartType::heatmap, cols[p.a].name(), cols[p.b].name(), Aggregate::count, {}, 0, {}, {}});

    if (out.empty()) throw Error(ErrorCode::no_candidates, "no column can be charted");
    return out;
}

/// Strict total order: score descending, then chart type name, x, y.
inline bool chart_order(const ChartSpec& a, const ChartSpec& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chart_type != b.chart_type) return to_string(a.chart_type) < to_string(b.chart_type);
    if (a.x != b.x) return a.x < b.x;
    return a.y.value_or("") < b.y.value_or("");
}

inline std::string relationship_measure(ChartType t) {
    switch (t) {
    case ChartType::scatter: return "|r|";
    case ChartType::heatmap: return "Cramer's V";
    case ChartType::box:
    case ChartType::grouped_bar: return "eta squared";
    case ChartType::histogram:
    case ChartType::density: return "skewness fit";
    case ChartType::bar: return "none";
    }
    return "none";
}

/// Names the criteria in order of their weighted contribution.
inline std::string rationale(const ChartSpec& s, const Weights& w) {
    std::vector<std::pair<std::string, double>> parts{
        {"interpretability", w.interpretability * s.criteria.interpretability},
        {"relationship strength", w.relationship_strength * s.criteria.relationship_strength},
        {"data fit", w.data_fit * s.criteria.data_fit},
    };
    std::stable_sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::string out = std::string(to_string(s.chart_type)) + " scored " + detail::fixed2(s.score) + ": ";
    out += "interpretability " + detail::fixed2(s.criteria.interpretability);
    out += ", relationship strength " + detail::fixed2(s.criteria.relationship_strength) + " (" +
           relationship_measure(s.chart_type) + ")";
    out += ", data fit " + detail::fixed2(s.criteria.data_fit) + ". Led by " + parts[0].first;
    if (parts[1].second > 0.0) out += ", then " + parts[1].first;
    return out + ".";
}

/// Fills criteria, score and rationale, then sorts into the recommendation order.
inline void score_candidates(std::vector<ChartSpec>& candidates, const Dataset& data,
                             const std::vector<ingest::ColumnProfile>& profiles, const analysis::AnalysisResult& analysis,
                             const ChartConfig& config = {}) {
    config.weights.validate();
    for (auto& c : candidates) {
        const auto& px = detail::profile_of(profiles, c.x);
        const ingest::ColumnProfile* py = c.y ? &detail::profile_of(profiles, *c.y) : nullptr;
        const double completeness = py ? std::min(px.completeness, py->completeness) : px.completeness;
        double strength = 0.0, fit = 0.0;
        switch (c.chart_type) {
        case ChartType::histogram:
        case ChartType::density:
            strength = detail::skew_fit(px.stats ? px.stats->skewness : 0.0);
            fit = detail::numeric_fit(px.distinct_count);
            break;
        case ChartType::bar:
            fit = detail::bar_fit(px.distinct_count);
            break;
        case ChartType::scatter: {
            const auto r = analysis.correlation_between(c.x, *c.y);
            strength = r ? std::fabs(*r) : 0.0;
            fit = std::min(detail::numeric_fit(px.distinct_count), detail::numeric_fit(py->distinct_count));
            break;
        }
        case ChartType::box:
        case ChartType::grouped_bar:
            strength = between_group_fraction(data.column(c.x), data.column(*c.y));
            fit = detail::group_fit(px.distinct_count) * detail::numeric_fit(py->distinct_count);
            break;
        case ChartType::heatmap: {
            const auto* chi = analysis.chi_square_for(c.x, *c.y);
            strength = chi ? chi->cramers_v() : 0.0;
            fit = detail::heatmap_fit(px.distinct_count * py->distinct_count);
            break;
        }
        }
        c.criteria.interpretability = std::clamp(config.interpretability.of(c.chart_type), 0.0, 1.0);
        c.criteria.relationship_strength = std::isfinite(strength) ? std::clamp(strength, 0.0, 1.0) : 0.0;
        c.criteria.data_fit = std::clamp(completeness * fit, 0.0, 1.0);
        c.score = weighted_score(c.criteria, config.weights);
        c.rationale = rationale(c, config.weights);
    }
    std::sort(candidates.begin(), candidates.end(), chart_order);
}

/// "unit_price" -> "Unit Price"
inline std::string display_name(std::string_view column) {
    std::string out(column);
    bool start = true;
    for (auto& ch : out) {
        if (ch == '_') ch = ' ';
        if (start && std::isalpha(static_cast<unsigned char>(ch))) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        start = ch == ' ';
    }
    return out;
}

inline std::string generate_title(const ChartSpec& s) {
    const std::string x = display_name(s.x);
    const std::string y = s.y ? display_name(*s.y) : std::string();
    switch (s.chart_type) {
    case ChartType::histogram:
    case ChartType::density: return "Distribution of " + x;
    case ChartType::bar: return "Count of " + x;
    case ChartType::scatter: return y + " vs " + x;
    case ChartType::box: return y + " by " + x;
    case ChartType::grouped_bar: return "Mean " + y + " by " + x;
    case ChartType::heatmap: return x + " × " + y + " frequency";
    }
    return x;
}

/// enumerate -> score -> title -> top_n.
inline std::vector<ChartSpec> recommend(const Dataset& data, const analysis::AnalysisResult& analysis,
                                        const ChartConfig& config = {}) {
    config.validate();
    const auto profiles = ingest::profile_columns(data);
    auto candidates = enumerate_candidates(data, profiles, analysis, config);
    score_candidates(candidates, data, profiles, analysis, config);
    if (candidates.size() > config.top_n) candidates.resize(config.top_n);
    for (auto& c : candidates) c.title = generate_title(c);
    return candidates;
}

} // namespace autoviz::charts
