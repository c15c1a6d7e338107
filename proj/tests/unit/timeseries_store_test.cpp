#include <gtest/gtest.h>

#include <sstream>

#include "tsf/timeseries_store.hpp"

using namespace tsf;

namespace {

ParsedFrame parse(const std::string& text, const CsvSchema& schema = CsvSchema::ohlcv()) {
    std::istringstream in(text);
    return parse_ohlcv_csv(in, schema);
}

}  // namespace

TEST(Ingest, SortsDeduplicatesAndCoerces) {
    const auto p = parse(
        "Date,Open,High,Low,Close,Volume\n"
        "2024-01-03,10,11,9,10.5,100\n"
        "2024-01-02,9,10,8,9.5,n/a\n"
        "2024-01-03,20,21,19,20.5,200\n"
        "not-a-date,1,1,1,1,1\n");
    EXPECT_EQ(p.stats.rows_in, 4u);
    EXPECT_EQ(p.stats.rows_out, 2u);
    EXPECT_EQ(p.stats.duplicate_dates, 1u);
    EXPECT_EQ(p.stats.unparsable_dates, 1u);
    EXPECT_EQ(p.stats.coerced_cells, 1u);
    EXPECT_EQ(p.frame.dates().front(), (Date{2024, 1, 2}));
    EXPECT_EQ(p.frame.column("close")[1], 20.5);  // last occurrence wins
    EXPECT_TRUE(is_missing(p.frame.column("volume")[0]));
}

TEST(Ingest, HeaderMatchingIsCaseInsensitive) {
    const auto p = parse("date,OPEN,high,LOW,close,volume\n2024-01-02,1,2,0.5,1.5,10\n");
    EXPECT_EQ(p.frame.column_names(), (std::vector<std::string>{"open", "high", "low", "close", "volume"}));
}

TEST(Ingest, MissingMappedColumnIsNamed) {
    try {
        parse("Date,Open,High,Low,Volume\n2024-01-02,1,2,0.5,10\n");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("'Close'"), std::string::npos);
    }
}

TEST(Ingest, NoRowsIsAnError) {
    EXPECT_THROW(parse("Date,Open,High,Low,Close,Volume\nbad,1,2,3,4,5\n"), std::runtime_error);
    EXPECT_THROW(parse_ohlcv_csv(std::string("/nonexistent/x.csv")), std::runtime_error);
}

TEST(Ingest, CustomDateFormat) {
    auto schema = CsvSchema::ohlcv();
    schema.date_format = "%d/%m/%Y";
    const auto p = parse("Date,Open,High,Low,Close,Volume\n05/01/2024,1,2,0.5,1.5,10\n", schema);
    EXPECT_EQ(p.frame.dates().front(), (Date{2024, 1, 5}));
}

TEST(Ingest, OhlcViolationsAreKeptAndReported) {
    const auto p = parse(
        "Date,Open,High,Low,Close,Volume\n"
        "2024-01-02,10,9,8,9.5,100\n"
        "2024-01-03,10,11,9,10.5,100\n");
    ASSERT_EQ(p.stats.ohlc_violations.size(), 1u);
    EXPECT_EQ(p.stats.ohlc_violations[0], (Date{2024, 1, 2}));
    EXPECT_EQ(p.frame.rows(), 2u);
}

TEST(PriceBar, Consistency) {
    PriceBar b{Date{2024, 1, 2}, 10, 11, 9, 10.5, 100};
    EXPECT_TRUE(b.is_consistent());
    b.low = 10.2;
    EXPECT_FALSE(b.is_consistent());
    b.low = 9;
    b.volume = -1;
    EXPECT_FALSE(b.is_consistent());
}

TEST(ForwardFill, FillsInteriorKeepsLeadingGaps) {
    SeriesFrame f({Date{2024, 1, 1}, Date{2024, 1, 2}, Date{2024, 1, 3}, Date{2024, 1, 4}});
    f.add_column("a", {kMissing, 1, kMissing, 3});
    const auto g = forward_fill(f);
    EXPECT_TRUE(is_missing(g.column("a")[0]));
    EXPECT_EQ(g.column("a")[2], 1);
    EXPECT_EQ(g.column("a")[3], 3);
}

TEST(Fundamentals, AsOfJoin) {
    std::istringstream in(
        "effective_date,equity,cash_dividend_pct\n"
        "2024-01-03,500,10\n"
        "2023-12-01,400,\n");
    auto records = parse_fundamentals_csv(in);
    ASSERT_EQ(records.size(), 2u);
    SeriesFrame prices({Date{2023, 11, 30}, Date{2024, 1, 2}, Date{2024, 1, 3}, Date{2024, 1, 4}});
    prices.add_column("close", {1, 2, 3, 4});
    const auto m = merge_fundamentals(prices, records);
    EXPECT_EQ(m.cols(), 1 + kFundamentalColumns.size());
    const auto& eq = m.column("equity");
    EXPECT_TRUE(is_missing(eq[0]));
    EXPECT_EQ(eq[1], 400);
    EXPECT_EQ(eq[2], 500);
    EXPECT_EQ(eq[3], 500);
    EXPECT_TRUE(is_missing(m.column("sales")[3]));
    EXPECT_TRUE(is_missing(m.column("cash_dividend_pct")[1]));
    EXPECT_EQ(m.column("cash_dividend_pct")[3], 10);
}

TEST(Fundamentals, RequiresDateColumn) {
    std::istringstream in("when,equity\n2024-01-01,1\n");
    EXPECT_THROW(parse_fundamentals_csv(in), std::runtime_error);
}
