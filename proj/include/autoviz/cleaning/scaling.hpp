#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/cleaning/types.hpp"
#include "autoviz/error.hpp"

namespace autoviz::cleaning {

/// Fits the given method; a zero denominator yields method none.
inline ScalingChoice fit_scaler(std::span<const double> values, ScalingMethod method) {
    ScalingChoice c{method, 0.0, 1.0};
    switch (method) {
    case ScalingMethod::none: return c;
    case ScalingMethod::standard:
        c.center = analysis::mean(values);
        c.scale = analysis::population_std(values);
        break;
    case ScalingMethod::robust: {
        const auto sorted = analysis::sorted_copy(values);
        c.center = analysis::quantile_sorted(sorted, 0.5);
        c.scale = analysis::quartiles_sorted(sorted).iqr();
        break;
    }
    case ScalingMethod::minmax: {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        c.center = *lo;
        c.scale = *hi - *lo;
        break;
    }
    case ScalingMethod::unit_vector: {
        double ss = 0.0;
        for (const double v : values) ss += v * v;
        c.scale = std::sqrt(ss);
        break;
    }
    }
    if (values.empty() || !(c.scale > 0.0) || !std::isfinite(c.scale)) return {};
    return c;
}

/// Adaptive choice: none for zero variance, robust when skewed (|g1| > 1) or
/// any detector flagged the column, standard otherwise.
inline ScalingChoice select_scaler(std::span<const double> values, bool any_flagged) {
    if (!(analysis::population_std(values) > 0.0)) return {};
    const bool robust = any_flagged || std::fabs(analysis::skewness(values)) > 1.0;
    return fit_scaler(values, robust ? ScalingMethod::robust : ScalingMethod::standard);
}

inline std::vector<double> apply_scaling(std::span<const double> values, const ScalingChoice& choice) {
    std::vector<double> out(values.begin(), values.end());
    if (choice.method == ScalingMethod::none) return out;
    if (!(choice.scale != 0.0)) {
        throw Error(ErrorCode::degenerate_scale, std::string("zero denominator for ") + std::string(to_string(choice.method)) + " scaling");
    }
    if (choice.method == ScalingMethod::minmax) {
        for (auto& v : out) v = std::clamp((v - choice.center) / choice.scale, 0.0, 1.0);
        return out;
    }
    for (auto& v : out) v = (v - choice.center) / choice.scale;
    return out;
}

} // namespace autoviz::cleaning
