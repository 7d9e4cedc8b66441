#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoviz/analysis/analyze.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::features {

enum class Method { correlation, chi_square, pca_loading, mutual_information, aggregate };

constexpr std::string_view to_string(Method m) {
    switch (m) {
    case Method::correlation: return "correlation";
    case Method::chi_square: return "chi_square";
    case Method::pca_loading: return "pca_loading";
    case Method::mutual_information: return "mutual_information";
    case Method::aggregate: return "aggregate";
    }
    return "aggregate";
}

struct RankedFeature {
    std::string feature;
    double score = 0.0;
    std::size_t rank = 0; // 1 = best; equal scores share the smaller rank
};

struct FeatureRanking {
    Method method = Method::aggregate;
    std::optional<std::string> target;
    std::vector<RankedFeature> entries;    // by rank, then name
    std::vector<std::string> inapplicable; // features this method cannot score

    const RankedFeature* find(std::string_view feature) const {
        for (const auto& e : entries)
            if (e.feature == feature) return &e;
        return nullptr;
    }
};

inline constexpr double kPcaVarianceCutoff = 0.95;
// scores this close (relative) count as tied; duplicated columns differ by a few ulps after PCA
inline constexpr double kTieTolerance = 1e-12;

/// Competition ranking: higher score first, equal scores share the smaller rank,
/// entries within a tie ordered by name.
inline std::vector<RankedFeature> rank_scores(const std::map<std::string, double>& scores) {
    std::vector<RankedFeature> out;
    for (const auto& [name, score] : scores) out.push_back({name, score, 0});
    std::stable_sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) { return a.score > b.score; });
    std::size_t head = 0; // first entry of the current tie group
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lead = out[head].score;
        if (i == 0 || std::fabs(lead - out[i].score) > kTieTolerance * std::max(std::fabs(lead), std::fabs(out[i].score))) {
            head = i;
            out[i].rank = i + 1;
        } else {
            out[i].rank = out[head].rank;
        }
    }
    // name order inside each tie group
    std::stable_sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) {
        return a.rank != b.rank ? a.rank < b.rank : a.feature < b.feature;
    });
    return out;
}

namespace detail {

inline FeatureRanking make_ranking(Method method, const std::optional<std::string>& target,
                                   const std::map<std::string, double>& scores, std::vector<std::string> inapplicable) {
    FeatureRanking r;
    r.method = method;
    r.target = target;
    r.entries = rank_scores(scores);
    std::sort(inapplicable.begin(), inapplicable.end());
    r.inapplicable = std::move(inapplicable);
    return r;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace detail

/// Per-feature importance under correlation, chi-square, PCA loadings and
/// mutual information, plus an aggregate over the four.
///
/// With a target, each score relates the feature to the target. Without one,
/// a feature's score is the mean of its pairwise scores against the other
/// features ("unsupervised relevance"). The aggregate score is 1 / (mean rank
/// over the methods that could score the feature), so higher is still better.
inline std::vector<FeatureRanking> rank_features(const Dataset& data, const analysis::AnalysisResult& analysis,
                                                 const std::optional<std::string>& target = std::nullopt) {
    const Column* target_col = nullptr;
    if (target) {
        target_col = data.find(*target);
        if (!target_col || target_col->kind() == ColumnKind::text) {
            throw Error(ErrorCode::unknown_target, "target column '" + *target + "' does not exist");
        }
    }
    std::vector<const Column*> features;
    for (const auto& c : data.columns()) {
        if (c.kind() == ColumnKind::text || (target && c.name() == *target)) continue;
        features.push_back(&c);
    }

    std::vector<FeatureRanking> out;

    // correlation
    {
        std::map<std::string, double> scores;
        std::vector<std::string> skipped;
        for (const auto* f : features) {
            std::vector<double> values;
            if (f->kind() == ColumnKind::numeric) {
                if (target_col) {
                    if (target_col->kind() == ColumnKind::numeric)
                        if (const auto r = analysis.correlation_between(f->name(), *target)) values.push_back(std::fabs(*r));
                } else {
                    for (const auto* g : features)
                        if (g != f && g->kind() == ColumnKind::numeric)
                            if (const auto r = analysis.correlation_between(f->name(), g->name())) values.push_back(std::fabs(*r));
                }
            }
            if (values.empty()) skipped.push_back(f->name());
            else scores[f->name()] = detail::mean_of(values);
        }
        out.push_back(detail::make_ranking(Method::correlation, target, scores, std::move(skipped)));
    }

    // chi-square
    {
        std::map<std::string, double> scores;
        std::vector<std::string> skipped;
        for (const auto* f : features) {
            std::vector<double> values;
            if (is_discrete(f->kind())) {
                if (target_col) {
                    if (const auto* c = analysis.chi_square_for(f->name(), *target)) values.push_back(c->statistic);
                } else {
                    for (const auto* g : features)
                        if (g != f && is_discrete(g->kind()))
                            if (const auto* c = analysis.chi_square_for(f->name(), g->name())) values.push_back(c->statistic);
                }
            }
            if (values.empty()) skipped.push_back(f->name());
            else scores[f->name()] = detail::mean_of(values);
        }
        out.push_back(detail::make_ranking(Method::chi_square, target, scores, std::move(skipped)));
    }

    // PCA loadings over the components reaching 95% of the variance
    {
        std::map<std::string, double> scores;
        std::vector<std::string> skipped;
        const auto& pca = analysis.pca;
        std::size_t used = 0;
        if (pca) {
            double cumulative = 0.0;
            while (used < pca->components.rows()) {
                cumulative += pca->explained_variance_ratio[used++];
                if (cumulative >= kPcaVarianceCutoff) break;
            }
        }
        for (const auto* f : features) {
            std::ptrdiff_t idx = -1;
            if (pca) {
                const auto it = std::find(pca->feature_names.begin(), pca->feature_names.end(), f->name());
                if (it != pca->feature_names.end()) idx = it - pca->feature_names.begin();
            }
            if (idx < 0) {
                skipped.push_back(f->name());
                continue;
            }
            double s = 0.0;
            for (std::size_t k = 0; k < used; ++k) {
                s += pca->explained_variance_ratio[k] * std::fabs(pca->components(k, static_cast<std::size_t>(idx)));
            }
            scores[f->name()] = s;
        }
        out.push_back(detail::make_ranking(Method::pca_loading, target, scores, std::move(skipped)));
    }

    // mutual information
    {
        std::map<std::string, double> scores;
        std::vector<std::string> skipped;
        for (const auto* f : features) {
            std::vector<double> values;
            if (target_col) {
                if (const auto* m = analysis.mi_for(f->name(), *target)) values.push_back(m->score);
            } else {
                for (const auto* g : features)
                    if (g != f)
                        if (const auto* m = analysis.mi_for(f->name(), g->name())) values.push_back(m->score);
            }
            if (values.empty()) skipped.push_back(f->name());
            else scores[f->name()] = detail::mean_of(values);
        }
        out.push_back(detail::make_ranking(Method::mutual_information, target, scores, std::move(skipped)));
    }

    // aggregate
    {
        std::map<std::string, double> scores;
        std::vector<std::string> skipped;
        for (const auto* f : features) {
            std::vector<double> ranks;
            for (const auto& r : out)
                if (const auto* e = r.find(f->name())) ranks.push_back(static_cast<double>(e->rank));
            if (ranks.empty()) skipped.push_back(f->name());
            else scores[f->name()] = 1.0 / detail::mean_of(ranks);
        }
        out.push_back(detail::make_ranking(Method::aggregate, target, scores, std::move(skipped)));
    }
    return out;
}

struct DroppedFeature {
    std::string feature;
    std::string partner; // the retained member of the pair that triggered the drop
    double r = 0.0;
};

struct RedundancyResult {
    std::vector<std::string> retained; // matrix order
    std::vector<DroppedFeature> dropped;
};

/// Greedy correlation filter: while some retained pair has |r| > threshold, take
/// the strongest such pair and drop the member with the larger mean |r| to the
/// other retained features (the later column on a tie).
inline RedundancyResult redundancy_filter(const analysis::CorrelationMatrix& matrix, double threshold = 0.9) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorCode::invalid_argument, "threshold must lie in (0, 1]");
    const std::size_t p = matrix.size();
    std::vector<bool> alive(p, true);
    RedundancyResult out;

    auto mean_abs = [&](std::size_t i) {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (j == i || !alive[j]) continue;
            s += std::fabs(matrix.values(i, j));
            ++n;
        }
        return n ? s / static_cast<double>(n) : 0.0;
    };

    for (;;) {
        double best = threshold;
        std::size_t bi = p, bj = p;
        for (std::size_t i = 0; i < p; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < p; ++j) {
                if (!alive[j]) continue;
                const double r = std::fabs(matrix.values(i, j));
                if (r > best) {
                    best = r;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == p) break;
        const std::size_t drop = mean_abs(bi) > mean_abs(bj) ? bi : bj;
        const std::size_t keep = drop == bi ? bj : bi;
        alive[drop] = false;
        out.dropped.push_back({matrix.feature_names[drop], matrix.feature_names[keep], matrix.values(bi, bj)});
    }
    for (std::size_t i = 0; i < p; ++i)
        if (alive[i]) out.retained.push_back(matrix.feature_names[i]);
    return out;
}

} // namespace autoviz::features
