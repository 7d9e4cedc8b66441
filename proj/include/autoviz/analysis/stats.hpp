#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "autoviz/error.hpp"

namespace autoviz::analysis {

/// Quantile of an ascending-sorted sample by linear interpolation at position (n-1)*q.
///
/// This is the single quantile definition used for IQR fences, robust
/// scaling, Silverman's bandwidth and equal-frequency binning.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::too_few_values, "quantile of an empty sample");
    const double pos = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline double quantile(std::span<const double> values, double q) { return quantile_sorted(sorted_copy(values), q); }

inline double median(std::span<const double> values) { return quantile(values, 0.5); }

inline double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

/// Population (divide-by-n) standard deviation.
inline double population_std(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double mu = mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

/// Sample (divide-by-(n-1)) standard deviation; 0 for n < 2.
inline double sample_std(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean(values);
    double ss = 0.0;
    for (const double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

struct Quartiles {
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr() const { return q3 - q1; }
};

inline Quartiles quartiles_sorted(std::span<const double> sorted) {
    return {quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
}

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0;      // sample standard deviation
    double skewness = 0.0; // g1 = m3 / m2^1.5
    double kurtosis = 0.0; // excess, m4 / m2^2 - 3
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

/// Descriptive statistics with moment-based shape measures (no small-sample
/// correction). A constant sample reports zero spread, skewness and kurtosis.
inline SummaryStats summary_stats(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::too_few_values, "summary statistics need at least one value");
    SummaryStats s;
    s.n = values.size();
    const auto sorted = sorted_copy(values);
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = quantile_sorted(sorted, 0.5);
    s.mean = mean(values);
    if (s.min == s.max) {
        s.mean = s.min;
        return s;
    }
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (const double v : values) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    const auto n = static_cast<double>(s.n);
    s.std = s.n > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

/// Moment skewness alone, 0 for constant input.
inline double skewness(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean(values);
    double m2 = 0.0;
    double m3 = 0.0;
    for (const double v : values) {
        const double d = v - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    const auto n = static_cast<double>(values.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

} // namespace autoviz::analysis
