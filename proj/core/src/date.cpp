#include "tsf/date.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace tsf {

namespace {

std::optional<Date> make_valid(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Date> Date::parse_iso(std::string_view text) {
    text = trim(text);
    // Accept a trailing time component ("2024-01-02 00:00:00" / "2024-01-02T00:00").
    if (text.size() > 10 && (text[10] == ' ' || text[10] == 'T')) text = text.substr(0, 10);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d))
        return std::nullopt;
    return make_valid(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

std::optional<Date> Date::parse(std::string_view text, std::string_view pattern) {
    if (pattern.empty() || pattern == "%Y-%m-%d") return parse_iso(text);
    std::tm tm{};
    tm.tm_mday = 0;
    std::istringstream in{std::string{trim(text)}};
    in >> std::get_time(&tm, std::string{pattern}.c_str());
    if (in.fail()) return std::nullopt;
    return make_valid(tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1),
                      static_cast<unsigned>(tm.tm_mday));
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

unsigned Date::weekday() const noexcept {
    return std::chrono::weekday{days_}.iso_encoding() - 1;
}

Date::IsoWeek Date::iso_week() const noexcept {
    namespace chr = std::chrono;
    // The ISO week belongs to the year containing its Thursday.
    const chr::sys_days thursday = days_ + chr::days{3 - static_cast<int>(weekday())};
    const chr::year iso_year = chr::year_month_day{thursday}.year();
    const chr::sys_days jan1{iso_year / chr::January / 1};
    const auto ordinal = (thursday - jan1).count();
    return {static_cast<int>(iso_year), static_cast<unsigned>(ordinal / 7 + 1)};
}

Date Date::next_trading_day() const noexcept {
    Date next = *this + 1;
    while (next.weekday() >= 5) next = next + 1;
    return next;
}

}  // namespace tsf
