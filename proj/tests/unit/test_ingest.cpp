#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "autoviz/ingest/dialect.hpp"
#include "autoviz/ingest/infer.hpp"
#include "autoviz/ingest/parser.hpp"
#include "autoviz/ingest/profile.hpp"
#include "autoviz/ingest/writer.hpp"
#include "test_util.hpp"

using namespace autoviz;
using namespace autoviz::ingest;
using autoviz::test_support::parse_text;

namespace {

std::vector<std::optional<std::string>> cells_of(const Column& col) {
    std::vector<std::optional<std::string>> out;
    for (std::size_t i = 0; i < col.size(); ++i) out.push_back(col.cell_text(i));
    return out;
}

Column text_column(std::vector<std::optional<std::string>> cells) { return Column::text("c", cells); }

} // namespace

TEST(DetectDialect, CommaWithHeader) {
    const auto d = detect_dialect("a,b\n1,2\n3,4");
    EXPECT_EQ(d.delimiter, ',');
    EXPECT_TRUE(d.has_header);
    EXPECT_EQ(d.encoding, Encoding::utf8);
    EXPECT_FALSE(d.delimiter_fallback);
}

TEST(DetectDialect, TabWithHeader) {
    const auto d = detect_dialect("x\ty\n1\t2");
    EXPECT_EQ(d.delimiter, '\t');
    EXPECT_TRUE(d.has_header);
}

TEST(DetectDialect, SemicolonWithoutHeader) {
    const auto d = detect_dialect("1;2\n3;4");
    EXPECT_EQ(d.delimiter, ';');
    EXPECT_FALSE(d.has_header);
}

TEST(DetectDialect, PrefersConsistentCountOverFrequentOne) {
    // commas appear inside one text field only; pipes are the consistent delimiter
    const auto d = detect_dialect("id|note\n1|a, b, c\n2|plain\n3|x");
    EXPECT_EQ(d.delimiter, '|');
}

TEST(DetectDialect, IgnoresDelimitersInsideQuotes) {
    const auto d = detect_dialect("name;city\n\"Smith, J\";Oslo\n\"Doe, A\";Rome\n\"Roe\";Pisa\n");
    EXPECT_EQ(d.delimiter, ';');
}

TEST(DetectDialect, CategoricalHeaderViaRepeatedValues) {
    const auto d = detect_dialect("color,size\nred,big\nred,small\nblue,big\n");
    EXPECT_TRUE(d.has_header);
    const auto headerless = detect_dialect("red,big\nred,small\nblue,big\n");
    EXPECT_FALSE(headerless.has_header);
}

TEST(DetectDialect, UndecidableFallsBackToComma) {
    const auto d = detect_dialect("value\n1\n2\n");
    EXPECT_EQ(d.delimiter, ',');
    EXPECT_TRUE(d.delimiter_fallback);
    EXPECT_TRUE(d.has_header);
}

TEST(DetectDialect, EmptyInputIsAnError) {
    try {
        detect_dialect("\n\n\r\n");
        FAIL() << "expected empty_input";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_input);
    }
    EXPECT_THROW(detect_dialect(""), Error);
}

TEST(DetectDialect, RejectsTinySampleLimit) { EXPECT_THROW(detect_dialect("a,b\n1,2", 100), Error); }

TEST(DetectDialect, BomAndLatin1) {
    const auto bom = detect_dialect("\xEF\xBB\xBFh1,h2\n1,2\n");
    EXPECT_EQ(bom.encoding, Encoding::utf8_bom);
    EXPECT_TRUE(bom.has_header);
    const auto latin = detect_dialect("name,v\ncaf\xE9,1\n");
    EXPECT_EQ(latin.encoding, Encoding::latin1);
}

TEST(DetectDialect, Deterministic) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::string bytes(200 + trial * 13, '\0');
        for (auto& b : bytes) b = static_cast<char>("a,;|\t\n\"1 "[rng() % 10]);
        bytes += "\nx,y\n";
        EXPECT_EQ(detect_dialect(bytes), detect_dialect(bytes));
    }
}

TEST(ParseTable, QuotedDelimiter) {
    const auto r = parse_text("a,b\n1,\"x,y\"", Dialect{});
    ASSERT_EQ(r.dataset.row_count(), 1u);
    EXPECT_EQ(r.dataset.column(0).label(0), "1");
    EXPECT_EQ(r.dataset.column(1).label(0), "x,y");
}

TEST(ParseTable, QuotedNewlineAndEscapedQuote) {
    const auto r = parse_text("a,b\r\n\"line1\nline2\",\"say \"\"hi\"\"\"\r\n", Dialect{});
    ASSERT_EQ(r.dataset.row_count(), 1u);
    EXPECT_EQ(r.dataset.column(0).label(0), "line1\nline2");
    EXPECT_EQ(r.dataset.column(1).label(0), "say \"hi\"");
}

TEST(ParseTable, RaggedRowsPaddedAndTruncated) {
    const auto r = parse_text("a,b\n1\n2,3,4", Dialect{});
    ASSERT_EQ(r.dataset.row_count(), 2u);
    EXPECT_EQ(cells_of(r.dataset.column(0)), (std::vector<std::optional<std::string>>{"1", "2"}));
    EXPECT_EQ(cells_of(r.dataset.column(1)), (std::vector<std::optional<std::string>>{std::nullopt, "3"}));
    EXPECT_EQ(r.count(RaggedRow::Kind::truncated), 1u);
    EXPECT_EQ(r.count(RaggedRow::Kind::padded), 1u);
    ASSERT_EQ(r.warnings.size(), 2u);
    EXPECT_EQ(r.warnings[1].kind, RaggedRow::Kind::truncated);
    EXPECT_EQ(r.warnings[1].row, 1u);
}

TEST(ParseTable, HeaderlessNamesAndDuplicateHeaders) {
    Dialect no_header;
    no_header.has_header = false;
    const auto r = parse_text("1,2\n3,4\n", no_header);
    EXPECT_EQ(r.dataset.column(0).name(), "col_1");
    EXPECT_EQ(r.dataset.column(1).name(), "col_2");
    EXPECT_EQ(r.dataset.row_count(), 2u);

    const auto d = parse_text("x,x,x,,x_2\n1,2,3,4,5\n", Dialect{});
    std::vector<std::string> names;
    for (const auto& c : d.dataset.columns()) names.push_back(c.name());
    EXPECT_EQ(names, (std::vector<std::string>{"x", "x_2", "x_3", "col_4", "x_2_2"}));
}

TEST(ParseTable, EmptyTable) {
    try {
        parse_text("a,b\n", Dialect{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_table);
    }
}

TEST(ParseTable, SizeLimitOn501MegabyteStream) {
    // 501 MiB of blank lines after a header: streamed through without being stored
    test_support::GeneratedStreamBuf buf("a,b\n1,2\n", 501ull * 1024 * 1024, '\n');
    std::istream in(&buf);
    try {
        parse_table(in, Dialect{});
        FAIL() << "expected size_limit_exceeded";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::size_limit_exceeded);
    }
}

TEST(ParseTable, ConfigurableLimit) {
    std::istringstream in("a,b\n1,2\n3,4\n");
    ParseOptions opts;
    opts.max_bytes = 8;
    EXPECT_THROW(parse_table(in, Dialect{}, opts), Error);
}

TEST(ParseTable, EncodingHandling) {
    Dialect latin;
    latin.encoding = Encoding::latin1;
    const auto r = parse_text("name\ncaf\xE9\n", latin);
    EXPECT_EQ(r.dataset.column(0).label(0), "caf\xC3\xA9");

    try {
        parse_text("name\ncaf\xE9\n", Dialect{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::encoding_error);
    }

    Dialect bom;
    bom.encoding = Encoding::utf8_bom;
    EXPECT_EQ(parse_text("\xEF\xBB\xBFh\n1\n", bom).dataset.column(0).name(), "h");
}

TEST(ParseTable, BlankLinesSkipped) {
    const auto r = parse_text("a,b\n\n1,2\n\n3,4\n\n", Dialect{});
    EXPECT_EQ(r.dataset.row_count(), 2u);
}

TEST(ParseTable, FuzzNeverCrashes) {
    std::mt19937_64 rng(42);
    const std::string alphabet("ab1.,;|\t\"\n\r \xC3\xA9\xFF\x00", 16);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string bytes(rng() % 300, '\0');
        for (auto& b : bytes) b = alphabet[rng() % alphabet.size()];
        try {
            const auto d = detect_dialect(bytes);
            std::istringstream in(bytes);
            auto parsed = parse_table(in, d);
            auto typed = infer_types(std::move(parsed.dataset));
            (void)profile_columns(typed.dataset);
        } catch (const Error&) {
            // typed errors are the only acceptable failure
        }
    }
}

TEST(ParseTable, RoundTripThroughWriter) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "ab,\"\n x;|";
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t cols = 1 + rng() % 4;
        const std::size_t rows = 1 + rng() % 12;
        std::vector<Column> columns;
        for (std::size_t j = 0; j < cols; ++j) {
            std::vector<std::optional<std::string>> cells;
            for (std::size_t i = 0; i < rows; ++i) {
                std::string s(rng() % 5, ' ');
                for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
                // parsed tables only hold missing cells in multi-column tables
                const bool missing = cols > 1 && rng() % 5 == 0;
                cells.push_back(missing ? std::nullopt : std::optional<std::string>(s));
            }
            columns.push_back(Column::text("c" + std::to_string(j), cells));
        }
        // parse once so the fixture is itself a parsed dataset
        std::ostringstream first;
        write_csv(first, Dataset(columns));
        const auto parsed = parse_text(first.str(), Dialect{}).dataset;
        for (const char delim : kDelimiterCandidates) {
            std::ostringstream out;
            write_csv(out, parsed, delim);
            Dialect dialect;
            dialect.delimiter = delim;
            EXPECT_EQ(parse_text(out.str(), dialect).dataset, parsed) << out.str();
        }
    }
}

TEST(InferTypes, Examples) {
    auto infer_one = [](std::vector<std::optional<std::string>> cells) {
        return infer_types(Dataset({text_column(std::move(cells))})).dataset.column(0);
    };
    EXPECT_EQ(infer_one({"1", "2", "3"}).kind(), ColumnKind::numeric);
    EXPECT_EQ(infer_one({"1", "2", "x"}).kind(), ColumnKind::categorical);
    EXPECT_EQ(infer_one({"yes", "no", "yes"}).kind(), ColumnKind::boolean);
    EXPECT_EQ(infer_one({"yes", "yes"}).kind(), ColumnKind::categorical);
    EXPECT_EQ(infer_one({"0", "1", "1"}).kind(), ColumnKind::numeric);
    EXPECT_EQ(infer_one({"TRUE", "false", "N/A"}).kind(), ColumnKind::boolean);
}

TEST(InferTypes, MissingTokensAndCoercion) {
    std::vector<std::optional<std::string>> cells;
    for (int i = 0; i < 40; ++i) cells.push_back(std::to_string(i));
    cells.push_back("oops");
    cells.push_back("NA");
    cells.push_back(" null ");
    cells.push_back("-");
    const auto r = infer_types(Dataset({text_column(cells)}));
    const auto& col = r.dataset.column(0);
    EXPECT_EQ(col.kind(), ColumnKind::numeric);
    EXPECT_EQ(col.missing_count(), 4u);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("oops"), std::string::npos);
}

TEST(InferTypes, IdempotentOnRenderedText) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto text = test_support::random_csv(rng, 40, 3, 2, 0.1);
        const auto typed = test_support::load_typed(text);
        std::ostringstream rendered;
        write_csv(rendered, typed);
        const auto again = test_support::load_typed(rendered.str());
        ASSERT_EQ(again.column_count(), typed.column_count());
        for (std::size_t j = 0; j < typed.column_count(); ++j) {
            EXPECT_EQ(again.column(j).kind(), typed.column(j).kind());
        }
        EXPECT_EQ(again, typed);
        // typed input is accepted directly as well
        EXPECT_EQ(infer_types(typed).dataset, typed);
    }
}

TEST(ProfileColumns, Examples) {
    std::vector<std::optional<double>> v(10, 1.0);
    v[3] = std::nullopt;
    v[7] = std::nullopt;
    const auto p = profile_column(Column::numeric("n", v));
    EXPECT_DOUBLE_EQ(p.completeness, 0.8);
    EXPECT_EQ(p.distinct_count, 1u);
    ASSERT_TRUE(p.stats);
    EXPECT_EQ(p.stats->n, 8u);

    const auto empty = profile_column(Column::numeric("e", std::vector<std::optional<double>>(4)));
    EXPECT_DOUBLE_EQ(empty.completeness, 0.0);
    EXPECT_EQ(empty.distinct_count, 0u);
    EXPECT_FALSE(empty.stats);

    const auto cat = profile_column(Column::categorical("c", {"a", "b", "a"}));
    EXPECT_EQ(cat.distinct_count, 2u);
    EXPECT_DOUBLE_EQ(cat.completeness, 1.0);

    const auto none = profile_column(Column::numeric("z", std::vector<double>{}));
    EXPECT_DOUBLE_EQ(none.completeness, 1.0);
}

TEST(ProfileColumns, InvariantsOnRandomTables) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto data = test_support::load_typed(test_support::random_csv(rng, 30, 2, 2, 0.2));
        for (const auto& p : profile_columns(data)) {
            EXPECT_LE(p.distinct_count, p.count - p.missing_count);
            EXPECT_NEAR(p.completeness, double(p.count - p.missing_count) / double(p.count), 1e-15);
        }
    }
}
