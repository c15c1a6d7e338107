#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tsf {

/// Calendar date with day resolution.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                            std::chrono::day{d}}) {}

    /// Parses `YYYY-MM-DD`. Returns nullopt on malformed or invalid dates.
    static std::optional<Date> parse_iso(std::string_view text);

    /// Parses with a strptime-style pattern (e.g. "%d/%m/%Y"). An empty
    /// pattern means ISO-8601.
    static std::optional<Date> parse(std::string_view text, std::string_view pattern);

    std::string iso() const;

    constexpr std::chrono::sys_days days() const noexcept { return days_; }
    constexpr std::chrono::year_month_day ymd() const noexcept { return {days_}; }

    int year() const noexcept { return static_cast<int>(ymd().year()); }
    unsigned month() const noexcept { return static_cast<unsigned>(ymd().month()); }
    unsigned day() const noexcept { return static_cast<unsigned>(ymd().day()); }

    /// Monday = 0 ... Sunday = 6.
    unsigned weekday() const noexcept;

    struct IsoWeek {
        int year;
        unsigned week;
    };
    IsoWeek iso_week() const noexcept;

    /// Next Monday-Friday date strictly after this one.
    Date next_trading_day() const noexcept;

    constexpr Date operator+(int n) const noexcept { return Date{days_ + std::chrono::days{n}}; }
    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace tsf
