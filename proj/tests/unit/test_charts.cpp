#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "autoviz/analysis/analyze.hpp"
#include "autoviz/charts/export.hpp"
#include "autoviz/charts/recommend.hpp"
#include "test_util.hpp"

using namespace autoviz;
using namespace autoviz::charts;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kFixtures = AUTOVIZ_FIXTURE_DIR "/charts/";

struct Prepared {
    Dataset data;
    analysis::AnalysisResult analysis;
    std::vector<ingest::ColumnProfile> profiles;
};

Prepared prepare(Dataset data) {
    Prepared p;
    p.analysis = analysis::analyze(data);
    p.profiles = ingest::profile_columns(data);
    p.data = std::move(data);
    return p;
}

std::vector<ChartType> types_of(const std::vector<ChartSpec>& specs) {
    std::vector<ChartType> out;
    for (const auto& s : specs) out.push_back(s.chart_type);
    std::sort(out.begin(), out.end());
    return out;
}

Column categorical(const std::string& name, const std::vector<std::string>& labels) {
    std::vector<std::string> levels;
    std::vector<std::uint32_t> codes;
    for (const auto& l : labels) {
        auto it = std::find(levels.begin(), levels.end(), l);
        if (it == levels.end()) {
            levels.push_back(l);
            it = levels.end() - 1;
        }
        codes.push_back(static_cast<std::uint32_t>(it - levels.begin()));
    }
    return Column::categorical(name, std::move(codes), std::move(levels), std::vector<std::uint8_t>(labels.size(), 1),
                               ColumnKind::categorical);
}

} // namespace

TEST(Enumerate, SingleNumericGivesHistogramAndDensity) {
    std::vector<Column> cols;
    cols.push_back(Column::numeric("v", std::vector<double>{1, 2, 3, 4, 5}));
    const auto p = prepare(Dataset(std::move(cols)));
    const auto c = enumerate_candidates(p.data, p.profiles, p.analysis);
    EXPECT_EQ(types_of(c), (std::vector<ChartType>{ChartType::density, ChartType::histogram}));
}

TEST(Enumerate, SingleCategoricalGivesBar) {
    std::vector<std::string> labels;
    for (int i = 0; i < 20; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i % 5)));
    std::vector<Column> cols;
    cols.push_back(categorical("c", labels));
    const auto p = prepare(Dataset(std::move(cols)));
    const auto c = enumerate_candidates(p.data, p.profiles, p.analysis);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].chart_type, ChartType::bar);
    EXPECT_EQ(c[0].aggregate, Aggregate::count);
}

TEST(Enumerate, SixtyLevelsGetNoBar) {
    std::vector<std::string> labels;
    for (int i = 0; i < 120; ++i) labels.push_back("k" + std::to_string(i % 60));
    std::vector<Column> cols;
    cols.push_back(categorical("c", labels));
    const auto p = prepare(Dataset(std::move(cols)));
    try {
        enumerate_candidates(p.data, p.profiles, p.analysis);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_candidates);
    }
}

TEST(Enumerate, PairRulesAndCaps) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<Column> cols;
    for (int j = 0; j < 10; ++j) {
        std::vector<double> v(50);
        for (auto& x : v) x = n01(rng);
        cols.push_back(Column::numeric("n" + std::to_string(j), v));
    }
    std::vector<std::string> g;
    for (int i = 0; i < 50; ++i) g.push_back(i % 3 ? "a" : "b");
    cols.push_back(categorical("g", g));
    const auto p = prepare(Dataset(std::move(cols)));
    const auto c = enumerate_candidates(p.data, p.profiles, p.analysis);
    std::size_t scatter = 0, box = 0, grouped = 0;
    for (const auto& s : c) {
        scatter += s.chart_type == ChartType::scatter;
        box += s.chart_type == ChartType::box;
        grouped += s.chart_type == ChartType::grouped_bar;
        if (s.chart_type == ChartType::box || s.chart_type == ChartType::grouped_bar) EXPECT_EQ(s.x, "g");
    }
    EXPECT_EQ(scatter, 30u); // 45 pairs capped
    EXPECT_EQ(box, 10u);
    EXPECT_EQ(grouped, 10u);

    // the 30 kept scatter pairs are the strongest
    std::vector<double> kept, all;
    for (const auto& s : c)
        if (s.chart_type == ChartType::scatter) kept.push_back(std::fabs(*p.analysis.correlation_between(s.x, *s.y)));
    for (int i = 0; i < 10; ++i)
        for (int j = i + 1; j < 10; ++j)
            all.push_back(std::fabs(*p.analysis.correlation_between("n" + std::to_string(i), "n" + std::to_string(j))));
    std::sort(all.rbegin(), all.rend());
    EXPECT_GE(*std::min_element(kept.begin(), kept.end()), all[29]);
}

TEST(Score, WeightedSum) {
    EXPECT_DOUBLE_EQ(weighted_score({1.0, 1.0, 1.0}, {}), 1.0);
    EXPECT_NEAR(weighted_score({0.9, 0.5, 0.8}, {}), 0.72, 1e-15);
    EXPECT_THROW((Weights{0.5, 0.5, 0.5}.validate()), Error);
}

TEST(Score, StrongerCorrelationScoresHigher) {
    std::vector<double> x, same, noise;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i);
        same.push_back(2 * i + 1);
        noise.push_back(i % 2 ? 1.0 : -1.0);
    }
    // noise is orthogonal to x: sum((x - mean) * noise) = 0
    std::vector<Column> cols;
    cols.push_back(Column::numeric("x", x));
    cols.push_back(Column::numeric("same", same));
    cols.push_back(Column::numeric("noise", noise));
    const auto p = prepare(Dataset(std::move(cols)));
    auto c = enumerate_candidates(p.data, p.profiles, p.analysis);
    score_candidates(c, p.data, p.profiles, p.analysis);
    const ChartSpec *strong = nullptr, *weak = nullptr;
    for (const auto& s : c) {
        if (s.chart_type != ChartType::scatter) continue;
        if (s.x == "x" && s.y == "same") strong = &s;
        if (s.x == "x" && s.y == "noise") weak = &s;
    }
    ASSERT_TRUE(strong && weak);
    EXPECT_NEAR(strong->criteria.relationship_strength, 1.0, 1e-12);
    EXPECT_LT(weak->criteria.relationship_strength, 0.1);
    EXPECT_GT(strong->score, weak->score);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_TRUE(chart_order(c[i - 1], c[i]));
}

TEST(Score, EtaSquared) {
    std::vector<Column> cols;
    cols.push_back(categorical("g", {"a", "a", "b", "b"}));
    cols.push_back(Column::numeric("v", std::vector<double>{1, 3, 5, 7}));
    const Dataset d(std::move(cols));
    // grand mean 4; between = 2*(2-4)^2 + 2*(6-4)^2 = 16; total = 9+1+1+9 = 20
    EXPECT_NEAR(between_group_fraction(d.column("g"), d.column("v")), 0.8, 1e-15);
}

TEST(Title, Templates) {
    ChartSpec s;
    s.chart_type = ChartType::scatter;
    s.x = "age";
    s.y = "income";
    EXPECT_EQ(generate_title(s), "Income vs Age");
    s = {};
    s.chart_type = ChartType::histogram;
    s.x = "unit_price";
    EXPECT_EQ(generate_title(s), "Distribution of Unit Price");
    s.chart_type = ChartType::bar;
    s.x = "region";
    EXPECT_EQ(generate_title(s), "Count of Region");
    s.chart_type = ChartType::grouped_bar;
    s.x = "segment";
    s.y = "total_spend";
    EXPECT_EQ(generate_title(s), "Mean Total Spend by Segment");
    s.chart_type = ChartType::heatmap;
    s.x = "color";
    s.y = "size";
    EXPECT_EQ(generate_title(s), "Color × Size frequency");
}

TEST(Recommend, FixturesMatchRuleTableAndExpectedScores) {
    const auto expected = Json::parse(read_file(kFixtures + "expected.json"));
    ASSERT_EQ(expected.size(), 6u);
    for (const auto& [name, e] : expected.items()) {
        const auto p = prepare(test_support::load_typed(read_file(kFixtures + name + ".csv")));
        const auto specs = recommend(p.data, p.analysis);
        ASSERT_FALSE(specs.empty()) << name;
        const auto& top = specs.front();
        EXPECT_EQ(to_string(top.chart_type), e["chart_type"].get<std::string>()) << name;
        EXPECT_EQ(top.x, e["x"].get<std::string>()) << name;
        if (e["y"].is_null()) EXPECT_FALSE(top.y) << name;
        else EXPECT_EQ(top.y.value_or(""), e["y"].get<std::string>()) << name;
        EXPECT_NEAR(top.score, e["score"].get<double>(), 1e-9) << name;
        for (const auto& s : specs) EXPECT_TRUE(is_valid(s)) << name;
    }
}

TEST(Recommend, TopNTruncatesAndKeepsAllWhenFewer) {
    const auto p = prepare(test_support::load_typed(read_file(kFixtures + "numeric_numeric.csv")));
    ChartConfig cfg;
    cfg.top_n = 2;
    EXPECT_EQ(recommend(p.data, p.analysis, cfg).size(), 2u);
    cfg.top_n = 100;
    EXPECT_EQ(recommend(p.data, p.analysis, cfg).size(), 5u); // 2 histograms, 2 densities, 1 scatter
}

TEST(Recommend, DeterministicJson) {
    std::mt19937_64 rng(4);
    const auto text = test_support::random_csv(rng, 300, 4, 3, 0.0);
    std::string first;
    for (int run = 0; run < 5; ++run) {
        const auto p = prepare(test_support::load_typed(text));
        std::string all;
        for (const auto& s : recommend(p.data, p.analysis)) all += chart_to_json(s, p.data).dump() + "\n";
        if (run == 0) first = all;
        EXPECT_EQ(all, first);
    }
}

TEST(Export, SchemaRoundTrip) {
    const auto p = prepare(test_support::load_typed(read_file(kFixtures + "categorical_numeric.csv")));
    for (const auto& s : recommend(p.data, p.analysis)) {
        const auto j = Json::parse(chart_to_json(s, p.data).dump());
        EXPECT_EQ(validate_chart_json(j), "") << j.dump();
        EXPECT_EQ(j["data"]["rows"], p.data.row_count());
    }
    auto j = chart_to_json(recommend(p.data, p.analysis).front(), p.data);
    j["y"] = nullptr;
    EXPECT_NE(validate_chart_json(j), "");
    EXPECT_EQ(chart_file_name(0), "chart_01.json");
}

TEST(Export, SamplesFirstRows) {
    std::vector<double> v(12000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 97);
    std::vector<Column> cols;
    cols.push_back(Column::numeric("v", v));
    const auto p = prepare(Dataset(std::move(cols)));
    const auto j = chart_to_json(recommend(p.data, p.analysis).front(), p.data);
    EXPECT_EQ(j["data"]["rows"], 10000u);
    EXPECT_TRUE(j["data"]["sampled"].get<bool>());
    EXPECT_EQ(j["data"]["values"]["v"][9999], 9999 % 97);
    EXPECT_EQ(validate_chart_json(j), "");
}
