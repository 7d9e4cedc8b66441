#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "autoviz/analysis/stats.hpp"
#include "autoviz/error.hpp"

namespace autoviz::analysis {

enum class BandwidthRule { scott, silverman };

constexpr std::string_view to_string(BandwidthRule rule) { return rule == BandwidthRule::scott ? "scott" : "silverman"; }

inline constexpr std::size_t kDefaultGridSize = 256;

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    BandwidthRule rule = BandwidthRule::silverman;

    /// Trapezoidal integral of the density over the grid.
    double integral() const {
        double area = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) area += (grid[i] - grid[i - 1]) * (density[i] + density[i - 1]) / 2.0;
        return area;
    }
};

inline double gaussian_kernel(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

/// Rule-of-thumb bandwidth for a sample with nonzero spread.
inline double bandwidth(std::span<const double> values, BandwidthRule rule) {
    const auto sorted = sorted_copy(values);
    const auto n = static_cast<double>(sorted.size());
    const double sigma = sample_std(sorted);
    double spread = sigma;
    if (rule == BandwidthRule::silverman) {
        const double iqr = quartiles_sorted(sorted).iqr();
        if (iqr > 0.0) spread = std::min(sigma, iqr / 1.34);
    }
    const double factor = rule == BandwidthRule::silverman ? 0.9 : 1.0;
    const double h = factor * spread * std::pow(n, -0.2);
    return std::max(h, 1e-9 * (sorted.back() - sorted.front()));
}

namespace detail {

// Beyond this many bandwidths the kernel underflows to exactly zero in double.
inline constexpr double kKernelReach = 40.0;

inline double density_sorted(std::span<const double> sorted, double x, double h) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - kKernelReach * h);
    const auto hi = std::upper_bound(lo, sorted.end(), x + kKernelReach * h);
    double sum = 0.0;
    for (auto it = lo; it != hi; ++it) sum += gaussian_kernel((x - *it) / h);
    return sum / (static_cast<double>(sorted.size()) * h);
}

} // namespace detail

/// Direct kernel sum at one point with a given bandwidth; accepts any n >= 1.
inline double kde_density_at(std::span<const double> values, double x, double h) {
    if (values.empty() || !(h > 0.0)) throw Error(ErrorCode::invalid_argument, "kde needs data and h > 0");
    double sum = 0.0;
    for (const double v : values) sum += gaussian_kernel((x - v) / h);
    return sum / (static_cast<double>(values.size()) * h);
}

/// Gaussian KDE over an evenly spaced grid spanning [min - 3h, max + 3h].
inline DensityEstimate kde(std::span<const double> values, BandwidthRule rule = BandwidthRule::silverman,
                           std::size_t grid_size = kDefaultGridSize) {
    if (values.size() < 2) throw Error(ErrorCode::too_few_values, "kde needs at least 2 values");
    if (grid_size < 2) throw Error(ErrorCode::invalid_argument, "kde grid needs at least 2 points");
    const auto sorted = sorted_copy(values);
    if (sorted.front() == sorted.back()) throw Error(ErrorCode::degenerate_spread, "kde of a constant sample");

    DensityEstimate out;
    out.rule = rule;
    out.bandwidth = bandwidth(sorted, rule);
    const double lo = sorted.front() - 3.0 * out.bandwidth;
    const double hi = sorted.back() + 3.0 * out.bandwidth;
    const double step = (hi - lo) / static_cast<double>(grid_size - 1);
    out.grid.reserve(grid_size);
    out.density.reserve(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = i + 1 == grid_size ? hi : lo + step * static_cast<double>(i);
        out.grid.push_back(x);
        out.density.push_back(detail::density_sorted(sorted, x, out.bandwidth));
    }
    return out;
}

} // namespace autoviz::analysis
