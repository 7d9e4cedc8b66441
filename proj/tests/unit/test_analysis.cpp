#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "autoviz/analysis/analyze.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace autoviz;
using namespace autoviz::analysis;

namespace {

Dataset numeric_table(const std::vector<std::vector<double>>& cols) {
    std::vector<Column> out;
    for (std::size_t j = 0; j < cols.size(); ++j) out.push_back(Column::numeric("c" + std::to_string(j), cols[j]));
    return Dataset(std::move(out));
}

void expect_error(ErrorCode code, auto&& fn) {
    try {
        fn();
        FAIL() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

} // namespace

TEST(SummaryStats, FiveValues) {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto s = summary_stats(v);
    EXPECT_DOUBLE_EQ(s.mean, 3);
    EXPECT_DOUBLE_EQ(s.median, 3);
    EXPECT_NEAR(s.std, std::sqrt(2.5), 1e-12);
    EXPECT_NEAR(s.skewness, 0, 1e-12);
    EXPECT_NEAR(s.kurtosis, -1.3, 1e-12);
    EXPECT_EQ(s.n, 5u);
}

TEST(SummaryStats, ConstantAndSingle) {
    const auto c = summary_stats(std::vector<double>{4, 4});
    EXPECT_EQ(c.std, 0);
    EXPECT_EQ(c.skewness, 0);
    EXPECT_EQ(c.kurtosis, 0);
    const auto s = summary_stats(std::vector<double>{9});
    EXPECT_EQ(s.mean, 9);
    EXPECT_EQ(s.median, 9);
    EXPECT_EQ(s.min, 9);
    EXPECT_EQ(s.max, 9);
    EXPECT_EQ(s.std, 0);
}

TEST(Pearson, Examples) {
    EXPECT_NEAR(pearson_matrix(numeric_table({{1, 2, 3}, {2, 4, 6}})).values(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(pearson_matrix(numeric_table({{1, 2, 3}, {6, 4, 2}})).values(0, 1), -1.0, 1e-15);
    EXPECT_NEAR(pearson_matrix(numeric_table({{1, 2, 3, 4}, {1, 3, 2, 4}})).values(0, 1), 0.8, 1e-15);
}

TEST(Pearson, DegenerateAndPairwise) {
    const auto m = pearson_matrix(numeric_table({{1, 2, 3}, {5, 5, 5}}));
    EXPECT_EQ(m.values(0, 1), 0.0);
    EXPECT_TRUE(m.is_degenerate(0, 1));
    EXPECT_EQ(m.values(1, 1), 0.0);
    EXPECT_EQ(m.values(0, 0), 1.0);

    const std::vector<std::optional<double>> x{1, 2, std::nullopt, 4, 5};
    const std::vector<std::optional<double>> y{2, std::nullopt, 3, 8, 9};
    const Dataset d({Column::numeric("x", x), Column::numeric("y", y)});
    const auto pm = pearson_matrix(d);
    const auto [r, n] = oracle::pearson_pairwise(x, y);
    EXPECT_EQ(pm.count(0, 1), n);
    EXPECT_EQ(n, 3u);
    EXPECT_NEAR(pm.values(0, 1), r, 1e-12);
}

TEST(Pearson, AffineInvariance) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<double> x(200), y(200), ax(200), nx(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g(rng);
        y[i] = 0.3 * x[i] + g(rng);
        ax[i] = 3.5 * x[i] + 11.0;
        nx[i] = -2.0 * x[i] + 1.0;
    }
    const auto m = pearson_matrix(numeric_table({x, y, ax, nx}));
    EXPECT_NEAR(m.values(2, 1), m.values(0, 1), 1e-12);
    EXPECT_NEAR(m.values(3, 1), -m.values(0, 1), 1e-12);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(m.values(i, j), m.values(j, i));
            EXPECT_LE(std::fabs(m.values(i, j)), 1.0 + 1e-12);
        }
}

TEST(ChiSquare, Examples) {
    const auto even = chi_square_table({{10, 10}, {10, 10}});
    EXPECT_EQ(even.statistic, 0.0);
    EXPECT_EQ(even.p_value, 1.0);
    const auto skew = chi_square_table({{20, 10}, {10, 20}});
    EXPECT_NEAR(skew.statistic, 20.0 / 3.0, 1e-12);
    EXPECT_EQ(skew.dof, 1);
    EXPECT_FALSE(skew.low_expected_warning);
    EXPECT_NEAR(chi_square_survival(3.841, 1), 0.05, 1e-4);
    EXPECT_NEAR(chi_square_survival(3.841, 1), oracle::chi_square_p(3.841, 1), 1e-12);
}

TEST(ChiSquare, PValueMatchesClosedForms) {
    for (int dof = 1; dof <= 30; ++dof) {
        for (double x : {0.01, 0.5, 1.0, 3.841, 7.5, 20.0, 45.0, 90.0}) {
            const double expect = oracle::chi_square_p(x, dof);
            const double got = chi_square_survival(x, dof);
            EXPECT_LE(std::fabs(got - expect), 1e-10 * std::max(expect, 1e-300)) << "dof " << dof << " x " << x;
        }
    }
}

TEST(ChiSquare, ExpectedMarginsAndPruning) {
    const auto r = chi_square_table({{3, 0, 7}, {0, 0, 0}, {4, 0, 1}});
    ASSERT_EQ(r.observed.size(), 2u);
    ASSERT_EQ(r.observed[0].size(), 2u);
    EXPECT_EQ(r.dof, 1);
    EXPECT_TRUE(r.low_expected_warning);
    for (std::size_t i = 0; i < 2; ++i) {
        double o = 0, e = 0;
        for (std::size_t j = 0; j < 2; ++j) {
            o += r.observed[i][j];
            e += r.expected[i][j];
        }
        EXPECT_NEAR(o, e, 1e-9);
    }
    expect_error(ErrorCode::degenerate_table, [] { chi_square_table({{5, 5}, {0, 0}}); });
}

TEST(ChiSquare, PermutationInvariant) {
    const auto a = chi_square_table({{12, 5, 9}, {3, 14, 6}});
    const auto b = chi_square_table({{14, 6, 3}, {5, 9, 12}});
    EXPECT_NEAR(a.statistic, b.statistic, 1e-12);
    EXPECT_NEAR(a.statistic, oracle::chi_square_statistic({{12, 5, 9}, {3, 14, 6}}), 1e-12);
}

TEST(ChiSquare, FromColumnsAndCramersV) {
    const Dataset d({Column::categorical("a", {"x", "x", "y", "y"}), Column::categorical("b", {"p", "p", "q", "q"})});
    const auto r = chi_square(d.column("a"), d.column("b"));
    EXPECT_NEAR(r.statistic, 4.0, 1e-12);
    EXPECT_NEAR(r.cramers_v(), 1.0, 1e-12);
    expect_error(ErrorCode::method_inapplicable, [] {
        const auto n = Column::numeric("n", std::vector<double>{1, 2});
        chi_square(n, n);
    });
}

TEST(Pca, LineIsRankOne) {
    const auto r = pca(numeric_table({{1, 2, 3, 4, 5}, {1, 2, 3, 4, 5}}));
    EXPECT_NEAR(r.explained_variance_ratio[0], 1.0, 1e-12);
    EXPECT_NEAR(r.explained_variance_ratio[1], 0.0, 1e-12);
    EXPECT_GT(r.components(0, 0), 0.0);
}

TEST(Pca, InvariantsOnRandomData) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> cols(6, std::vector<double>(80));
    for (std::size_t i = 0; i < 80; ++i) {
        const double f = g(rng);
        for (std::size_t j = 0; j < 6; ++j) cols[j][i] = f * static_cast<double>(j % 3) + g(rng) * (1.0 + j);
    }
    const auto r = pca(numeric_table(cols));
    const std::size_t p = 6;
    double trace = 0, sum = 0, ratio = 0;
    for (std::size_t i = 0; i < p; ++i) {
        trace += r.covariance(i, i);
        sum += r.eigenvalues[i];
        ratio += r.explained_variance_ratio[i];
        if (i) EXPECT_GE(r.eigenvalues[i - 1], r.eigenvalues[i]);
    }
    EXPECT_NEAR(sum, trace, 1e-9);
    EXPECT_NEAR(ratio, 1.0, 1e-9);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            double dot = 0, recon = 0;
            for (std::size_t i = 0; i < p; ++i) dot += r.components(a, i) * r.components(b, i);
            for (std::size_t k = 0; k < p; ++k) recon += r.components(k, a) * r.eigenvalues[k] * r.components(k, b);
            EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-8);
            EXPECT_NEAR(recon, r.covariance(a, b), 1e-6);
        }
    }
    // projection follows the weighted sum of standardized values
    const std::vector<double> row{cols[0][3], cols[1][3], cols[2][3], cols[3][3], cols[4][3], cols[5][3]};
    double manual = 0;
    for (std::size_t i = 0; i < p; ++i) manual += r.components(1, i) * (row[i] - r.means[i]) / r.stds[i];
    EXPECT_NEAR(r.project(row, 1), manual, 1e-12);
}

TEST(Pca, MatchesCubicOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::array<double, 3>> rows(4);
        std::vector<std::vector<double>> cols(3, std::vector<double>(4));
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 3; ++j) rows[i][j] = cols[j][i] = u(rng);
        const auto expect = oracle::pca3(rows);
        const auto got = pca(numeric_table(cols));
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(got.eigenvalues[k], std::max(0.0, expect.eigenvalues[k]), 1e-9);
            if (k == 2) continue; // 4 rows in 3 columns: the last eigenvalue is 0 and its vector is the null direction
            double dot = 0;
            for (std::size_t i = 0; i < 3; ++i) dot += got.components(k, i) * expect.components[k][i];
            EXPECT_NEAR(std::fabs(dot), 1.0, 1e-6);
        }
    }
}

TEST(Pca, Errors) {
    expect_error(ErrorCode::too_few_rows, [] { pca(numeric_table({{1, 2}, {3, 4}})); });
    expect_error(ErrorCode::no_varying_columns, [] { pca(numeric_table({{1, 1, 1}, {2, 2, 2}})); });
    const auto r = pca(numeric_table({{1, 2, 3, 5}, {7, 7, 7, 7}, {2, 1, 4, 3}}));
    EXPECT_EQ(r.feature_names.size(), 2u);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Jacobi, ConvergesBelowTolerance) {
    Matrix a(3, 3);
    const double v[3][3] = {{4, 1, 2}, {1, 3, 0.5}, {2, 0.5, 5}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = v[i][j];
    const auto e = jacobi_eigen(a);
    EXPECT_NEAR(e.values[0] + e.values[1] + e.values[2], 12.0, 1e-12);
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
            double av = 0;
            for (std::size_t j = 0; j < 3; ++j) av += v[i][j] * e.vectors(j, k);
            EXPECT_NEAR(av, e.values[k] * e.vectors(i, k), 1e-10);
        }
    }
}

TEST(MutualInformation, Examples) {
    const Dataset two({Column::categorical("x", {"a", "a", "b", "b"}), Column::categorical("y", {"a", "a", "b", "b"})});
    EXPECT_NEAR(mutual_information(two.column(0), two.column(1)).score, std::log(2.0), 1e-12);

    for (int k : {3, 5, 8}) {
        std::vector<std::optional<std::string>> v;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < k; ++c) v.push_back("l" + std::to_string(c));
        const auto col = Column::categorical("x", v);
        EXPECT_NEAR(mutual_information(col, col.renamed("y")).score, std::log(k), 1e-12);
    }

    // product distribution: every (x, y) combination appears equally often
    std::vector<std::optional<std::string>> x, y;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 4; ++b) {
            x.push_back("x" + std::to_string(a));
            y.push_back("y" + std::to_string(b));
        }
    EXPECT_NEAR(mutual_information(Column::categorical("x", x), Column::categorical("y", y)).score, 0.0, 1e-12);
}

TEST(MutualInformation, ConstantIsZeroAndBinsClamp) {
    const auto c = Column::numeric("c", std::vector<double>(30, 2.0));
    const auto x = Column::numeric("x", std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18,
                                                            19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30});
    const auto s = mutual_information(c, x);
    EXPECT_EQ(s.score, 0.0);
    EXPECT_EQ(s.bins_used, 5u); // floor(sqrt(30))
    EXPECT_EQ(clamp_bins(10, 400), 10u);
    EXPECT_EQ(clamp_bins(10, 3), 2u);
}

TEST(MutualInformation, SymmetryBoundsAndOracle) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 20 + trial * 3;
        std::vector<double> xv(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            xv[i] = std::round(g(rng) * 4.0);
            yv[i] = xv[i] * 0.5 + g(rng);
        }
        const auto x = Column::numeric("x", xv);
        const auto y = Column::numeric("y", yv);
        const auto dx = discretize(x), dy = discretize(y);
        const double xy = mutual_information(dx, dy);
        EXPECT_NEAR(xy, mutual_information(dy, dx), 1e-12);
        EXPECT_GE(xy, -1e-12);
        EXPECT_LE(xy, std::min(entropy(dx), entropy(dy)) + 1e-12);
        EXPECT_GE(mutual_information(dx, dx) + 1e-12, xy);

        const int bins = static_cast<int>(clamp_bins(10, n));
        const double expect = oracle::mutual_information(oracle::quantile_bins(xv, bins), oracle::quantile_bins(yv, bins));
        EXPECT_NEAR(xy, expect, 1e-9);
    }
}

TEST(Kde, SingleTermAndBandwidth) {
    const std::vector<double> one{2.5};
    EXPECT_NEAR(kde_density_at(one, 2.5, 1.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);

    // n = 100 with unit sample std and a wide IQR: h = 0.9 * 100^-0.2
    std::vector<double> v(100);
    for (std::size_t i = 0; i < 100; ++i) v[i] = i < 50 ? -1.0 : 1.0;
    const double sd = sample_std(v);
    for (auto& x : v) x /= sd;
    ASSERT_NEAR(sample_std(v), 1.0, 1e-15);
    ASSERT_GT(quantile(v, 0.75) - quantile(v, 0.25), 1.34);
    EXPECT_NEAR(bandwidth(v, BandwidthRule::silverman), 0.9 * std::pow(100.0, -0.2), 1e-12);
    EXPECT_NEAR(bandwidth(v, BandwidthRule::scott), std::pow(100.0, -0.2), 1e-12);
}

TEST(Kde, NormalizationAndOracle) {
    std::mt19937_64 rng(9);
    std::lognormal_distribution<double> ln(0.0, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(50 + trial * 20);
        for (auto& x : v) x = ln(rng);
        for (auto rule : {BandwidthRule::silverman, BandwidthRule::scott}) {
            const auto d = kde(v, rule);
            ASSERT_EQ(d.grid.size(), 256u);
            EXPECT_GE(d.integral(), 0.98);
            EXPECT_LE(d.integral(), 1.001);
            for (double y : d.density) EXPECT_GE(y, 0.0);
            EXPECT_NEAR(d.density[100], oracle::kde_at(v, d.grid[100], d.bandwidth), 1e-12);
        }
    }
}

TEST(Kde, WiderBandwidthNeverRaisesPeak) {
    const std::vector<double> v{0.1, 0.2, 0.25, 1.0, 3.0, 3.1};
    double last = 1e300;
    for (double h : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
        double peak = 0;
        for (double x = -2; x <= 5; x += 0.001) peak = std::max(peak, kde_density_at(v, x, h));
        EXPECT_LE(peak, last + 1e-12);
        last = peak;
    }
}

TEST(Kde, Errors) {
    expect_error(ErrorCode::degenerate_spread, [] { kde(std::vector<double>{3, 3, 3}); });
    expect_error(ErrorCode::too_few_values, [] { kde(std::vector<double>{3}); });
}

TEST(Analyze, MarksStagesAndSkipsPathologicalColumns) {
    const auto data = test_support::load_typed("a,b,g,h\n1,2,x,p\n2,2,y,q\n3,2,x,p\n4,2,y,q\n5,2,x,q\n");
    const auto r = analyze(data);
    EXPECT_FALSE(r.stage_skipped("summary_stats"));
    EXPECT_FALSE(r.stage_skipped("correlation"));
    EXPECT_FALSE(r.stage_skipped("pca")); // b has no variance but a still does
    EXPECT_FALSE(r.stage_skipped("chi_square"));
    ASSERT_NE(r.chi_square_for("h", "g"), nullptr);
    EXPECT_EQ(r.densities.size(), 1u); // b is constant
    EXPECT_NE(r.density("a"), nullptr);
    EXPECT_EQ(r.mutual_information.size(), 6u);
    EXPECT_FALSE(r.warnings.empty());

    const auto single = test_support::load_typed("g\nx\ny\nx\n");
    const auto s = analyze(single);
    EXPECT_TRUE(s.stage_skipped("correlation"));
    EXPECT_TRUE(s.stage_skipped("pca"));
    EXPECT_TRUE(s.stage_skipped("chi_square"));
}
