#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tsf/csv.hpp"
#include "tsf/date.hpp"
#include "tsf/series_frame.hpp"

using namespace tsf;

TEST(Date, ParsesIsoAndRejectsInvalid) {
    EXPECT_EQ(Date::parse_iso("2024-02-29")->iso(), "2024-02-29");
    EXPECT_FALSE(Date::parse_iso("2023-02-29"));
    EXPECT_FALSE(Date::parse_iso("2023-13-01"));
    EXPECT_FALSE(Date::parse_iso("yesterday"));
    EXPECT_EQ(Date::parse_iso("2024-01-05 00:00:00")->iso(), "2024-01-05");
}

TEST(Date, ParsesCustomPattern) {
    EXPECT_EQ(Date::parse("31/12/2020", "%d/%m/%Y")->iso(), "2020-12-31");
    EXPECT_FALSE(Date::parse("2020-12-31", "%d/%m/%Y"));
}

TEST(Date, WeekdayAndTradingDays) {
    const Date fri{2024, 1, 5};
    EXPECT_EQ(fri.weekday(), 4u);
    EXPECT_EQ(fri.next_trading_day(), (Date{2024, 1, 8}));
    EXPECT_EQ((Date{2024, 1, 6}).next_trading_day(), (Date{2024, 1, 8}));
    EXPECT_EQ((Date{2024, 1, 8}).next_trading_day(), (Date{2024, 1, 9}));
}

// Reference values from the ISO-8601 calendar.
TEST(Date, IsoWeekTable) {
    struct Case {
        Date d;
        int year;
        unsigned week;
    };
    const Case cases[] = {
        {{2005, 1, 1}, 2004, 53},  {{2005, 1, 2}, 2004, 53}, {{2005, 12, 31}, 2005, 52}, {{2007, 1, 1}, 2007, 1},
        {{2007, 12, 30}, 2007, 52}, {{2008, 12, 29}, 2009, 1}, {{2009, 12, 31}, 2009, 53}, {{2010, 1, 3}, 2009, 53},
        {{2020, 12, 31}, 2020, 53}, {{2021, 1, 4}, 2021, 1},  {{2024, 6, 15}, 2024, 24},
    };
    for (const auto& c : cases) {
        const auto w = c.d.iso_week();
        EXPECT_EQ(w.year, c.year) << c.d.iso();
        EXPECT_EQ(w.week, c.week) << c.d.iso();
    }
}

TEST(Csv, SplitsQuotedFields) {
    const auto f = csv::split_line(R"(a, "b,c" ,"d""e",)" "\r");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[0], "a");
    EXPECT_EQ(f[1], "b,c");
    EXPECT_EQ(f[2], "d\"e");
    EXPECT_EQ(f[3], "");
}

TEST(Csv, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 1e22}) EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
    EXPECT_EQ(csv::format_double(kMissing), "");
    EXPECT_TRUE(std::isnan(csv::parse_double("")));
    EXPECT_TRUE(std::isnan(csv::parse_double("12abc")));
    EXPECT_TRUE(std::isnan(csv::parse_double("1,000")));
    EXPECT_TRUE(std::isnan(csv::parse_double("inf")));
    EXPECT_EQ(csv::parse_double(" 42.5 "), 42.5);
}

TEST(SeriesFrame, RejectsUnorderedDates) {
    EXPECT_THROW(SeriesFrame({Date{2024, 1, 2}, Date{2024, 1, 2}}), std::invalid_argument);
    EXPECT_THROW(SeriesFrame({Date{2024, 1, 3}, Date{2024, 1, 2}}), std::invalid_argument);
}

TEST(SeriesFrame, ColumnsAndSlicing) {
    SeriesFrame f({Date{2024, 1, 1}, Date{2024, 1, 2}, Date{2024, 1, 3}});
    f.add_column("a", {1, 2, 3});
    f.add_column("b", {4, kMissing, 6});
    EXPECT_THROW(f.add_column("a", {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(f.add_column("c", {1, 2}), std::invalid_argument);
    EXPECT_THROW((void)f.column("zzz"), std::invalid_argument);
    const auto s = f.slice_rows(1, 3);
    EXPECT_EQ(s.rows(), 2u);
    EXPECT_EQ(s.column("a")[0], 2);
    const std::vector<std::string> order{"b", "a"};
    EXPECT_EQ(f.select(order).column_names(), order);
}

TEST(SeriesFrame, CsvRoundTripPreservesBitsAndMissing) {
    SeriesFrame f({Date{2024, 1, 1}, Date{2024, 1, 2}});
    f.add_column("x", {0.1 + 0.2, kMissing});
    f.add_column("y", {-1e-310, 7});
    std::stringstream s;
    write_frame_csv(s, f);
    EXPECT_EQ(s.str().substr(0, 9), "date,x,y\n");
    EXPECT_EQ(read_frame_csv(s), f);
}
