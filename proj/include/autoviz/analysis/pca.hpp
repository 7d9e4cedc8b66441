#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "autoviz/analysis/matrix.hpp"
#include "autoviz/dataset.hpp"
#include "autoviz/error.hpp"

namespace autoviz::analysis {

struct Eigen {
    std::vector<double> values; // unsorted, matching vector columns
    Matrix vectors;             // column k is the eigenvector of values[k]
    int sweeps = 0;
};

inline double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline Eigen jacobi_eigen(Matrix a, double tolerance = 1e-12, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    Eigen out;
    out.vectors = Matrix::identity(n);
    Matrix& v = out.vectors;
    for (; out.sweeps < max_sweeps && off_diagonal_norm(a) >= tolerance; ++out.sweeps) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) out.values.push_back(a(i, i));
    return out;
}

struct PCAResult {
    std::vector<std::string> feature_names; // varying columns actually used
    Matrix components;                      // rows are components, columns follow feature_names
    std::vector<double> eigenvalues;        // descending, all p of them
    std::vector<double> explained_variance_ratio;
    std::vector<double> means;
    std::vector<double> stds; // population
    Matrix covariance;        // of the standardized data
    std::size_t rows_used = 0;
    std::vector<std::string> warnings;

    /// Score of one raw row (ordered as feature_names) on component k.
    double project(std::span<const double> row, std::size_t k) const {
        double score = 0.0;
        for (std::size_t i = 0; i < feature_names.size(); ++i) {
            score += components(k, i) * (row[i] - means[i]) / stds[i];
        }
        return score;
    }

    std::vector<double> project(std::span<const double> row) const {
        std::vector<double> out(components.rows());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = project(row, k);
        return out;
    }
};

/// Correlation PCA over rows complete in every selected column.
/// `n_components` = 0 keeps all of them.
inline PCAResult pca(const Dataset& data, const std::vector<std::size_t>& columns, std::size_t n_components = 0) {
    for (const auto c : columns) {
        if (data.column(c).kind() != ColumnKind::numeric) {
            throw Error(ErrorCode::method_inapplicable, "pca needs numeric columns");
        }
    }
    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        bool ok = true;
        for (const auto c : columns) ok = ok && data.column(c).is_present(i);
        if (ok) complete.push_back(i);
    }
    if (complete.size() < 3) {
        throw Error(ErrorCode::too_few_rows, "pca needs at least 3 complete rows, found " + std::to_string(complete.size()));
    }

    PCAResult out;
    out.rows_used = complete.size();
    const auto n = static_cast<double>(complete.size());
    std::vector<std::vector<double>> z; // standardized varying columns
    for (const auto c : columns) {
        const auto& col = data.column(c);
        const auto xs = col.numbers();
        double mu = 0.0;
        for (const auto i : complete) mu += xs[i];
        mu /= n;
        double ss = 0.0;
        for (const auto i : complete) ss += (xs[i] - mu) * (xs[i] - mu);
        const double sd = std::sqrt(ss / n);
        if (!(sd > 0.0)) {
            out.warnings.push_back("column '" + col.name() + "' has zero variance and was excluded from pca");
            continue;
        }
        std::vector<double> zc;
        zc.reserve(complete.size());
        for (const auto i : complete) zc.push_back((xs[i] - mu) / sd);
        z.push_back(std::move(zc));
        out.feature_names.push_back(col.name());
        out.means.push_back(mu);
        out.stds.push_back(sd);
    }
    const std::size_t p = z.size();
    if (p == 0) throw Error(ErrorCode::no_varying_columns, "pca found no column with nonzero variance");

    out.covariance = Matrix(p, p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < z[a].size(); ++i) s += z[a][i] * z[b][i];
            out.covariance(a, b) = out.covariance(b, a) = s / n;
        }
    }

    const auto eig = jacobi_eigen(out.covariance);
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return eig.values[x] > eig.values[y]; });

    const std::size_t k = n_components == 0 ? p : std::min(n_components, p);
    out.components = Matrix(k, p);
    double total = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
        const double lambda = std::max(0.0, eig.values[order[r]]);
        out.eigenvalues.push_back(lambda);
        total += lambda;
        if (r >= k) continue;
        std::size_t lead = 0;
        for (std::size_t i = 1; i < p; ++i) {
            if (std::fabs(eig.vectors(i, order[r])) > std::fabs(eig.vectors(lead, order[r]))) lead = i;
        }
        const double sign = eig.vectors(lead, order[r]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < p; ++i) out.components(r, i) = sign * eig.vectors(i, order[r]);
    }
    for (const double lambda : out.eigenvalues) out.explained_variance_ratio.push_back(total > 0.0 ? lambda / total : 0.0);
    return out;
}

inline PCAResult pca(const Dataset& data, std::size_t n_components = 0) {
    return pca(data, data.numeric_indices(), n_components);
}

} // namespace autoviz::analysis
