#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/cleaning/types.hpp"
#include "autoviz/error.hpp"

namespace autoviz::cleaning {

/// Flags |x - mu| / sigma > threshold with the population sigma; sigma = 0 flags nothing.
inline std::vector<OutlierFlag> detect_outliers_zscore(std::span<const double> values, const OutlierParams& params = {}) {
    params.validate();
    std::vector<OutlierFlag> out;
    const double mu = analysis::mean(values);
    const double sigma = analysis::population_std(values);
    if (!(sigma > 0.0)) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double z = (values[i] - mu) / sigma;
        if (std::fabs(z) > params.z_threshold) out.push_back({i, values[i], z});
    }
    return out;
}

/// Scale used by the modified z-score: 0.6745 / MAD, or 0.7979 / (mean absolute
/// deviation about the median) when MAD is 0, or 0 when both vanish.
struct ModifiedZScale {
    double median = 0.0;
    double factor = 0.0; // M = factor * (x - median)
};

inline ModifiedZScale modified_z_scale(std::span<const double> values) {
    ModifiedZScale s;
    if (values.empty()) return s;
    s.median = analysis::median(values);
    std::vector<double> dev;
    dev.reserve(values.size());
    for (const double v : values) dev.push_back(std::fabs(v - s.median));
    const double mad = analysis::median(dev);
    if (mad > 0.0) {
        s.factor = kModifiedZConstant / mad;
        return s;
    }
    const double mean_ad = analysis::mean(dev);
    if (mean_ad > 0.0) s.factor = kMeanAbsDeviationConstant / mean_ad;
    return s;
}

inline std::vector<OutlierFlag> detect_outliers_modified_z(std::span<const double> values,
                                                           const OutlierParams& params = {}) {
    params.validate();
    std::vector<OutlierFlag> out;
    const auto scale = modified_z_scale(values);
    if (scale.factor == 0.0) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double m = scale.factor * (values[i] - scale.median);
        if (std::fabs(m) > params.modified_z_threshold) out.push_back({i, values[i], m});
    }
    return out;
}

struct Fences {
    double lower = 0.0;
    double upper = 0.0;
};

inline Fences iqr_fences(std::span<const double> values, double multiplier) {
    if (values.size() < 4) throw Error(ErrorCode::too_few_values, "iqr detection needs at least 4 values");
    const auto q = analysis::quartiles_sorted(analysis::sorted_copy(values));
    return {q.q1 - multiplier * q.iqr(), q.q3 + multiplier * q.iqr()};
}

/// Flags values strictly outside [Q1 - m*IQR, Q3 + m*IQR].
inline std::vector<OutlierFlag> detect_outliers_iqr(std::span<const double> values, const OutlierParams& params = {}) {
    params.validate();
    const auto f = iqr_fences(values, params.iqr_multiplier);
    std::vector<OutlierFlag> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < f.lower) out.push_back({i, values[i], values[i] - f.lower});
        else if (values[i] > f.upper) out.push_back({i, values[i], values[i] - f.upper});
    }
    return out;
}

inline std::vector<OutlierFlag> detect_outliers(Detector detector, std::span<const double> values,
                                                const OutlierParams& params = {}) {
    switch (detector) {
    case Detector::zscore: return detect_outliers_zscore(values, params);
    case Detector::modified_z: return detect_outliers_modified_z(values, params);
    case Detector::iqr: return detect_outliers_iqr(values, params);
    }
    return {};
}

} // namespace autoviz::cleaning
