#include "tsf/series_frame.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tsf/csv.hpp"

namespace tsf {

namespace csv {

std::vector<std::string> split_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    for (auto& f : fields) {
        const auto first = f.find_first_not_of(" \t");
        const auto last = f.find_last_not_of(" \t");
        f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
    }
    return fields;
}

std::string format_double(double value) {
    if (std::isnan(value)) return {};
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view cell) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
        cell.remove_suffix(1);
    if (cell.empty()) return kMissing;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return kMissing;
    if (!std::isfinite(value)) return kMissing;
    return value;
}

}  // namespace csv

SeriesFrame::SeriesFrame(std::vector<Date> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i]))
            throw std::invalid_argument("SeriesFrame: dates must be strictly increasing (at " +
                                        dates_[i].iso() + ")");
    }
}

bool SeriesFrame::has_column(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t SeriesFrame::column_index(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::invalid_argument("unknown column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

const Series& SeriesFrame::column(std::string_view name) const {
    return columns_[column_index(name)];
}

void SeriesFrame::add_column(std::string name, Series values) {
    if (has_column(name)) throw std::invalid_argument("duplicate column '" + name + "'");
    if (values.size() != rows())
        throw std::invalid_argument("column '" + name + "' has " + std::to_string(values.size()) +
                                    " values, frame has " + std::to_string(rows()) + " rows");
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

void SeriesFrame::set_column(std::string_view name, Series values) {
    if (!has_column(name)) {
        add_column(std::string(name), std::move(values));
        return;
    }
    if (values.size() != rows())
        throw std::invalid_argument("column '" + std::string(name) + "' length mismatch");
    columns_[column_index(name)] = std::move(values);
}

SeriesFrame SeriesFrame::slice_rows(std::size_t begin, std::size_t end) const {
    if (begin > end || end > rows()) throw std::out_of_range("slice_rows: bad row range");
    SeriesFrame out{std::vector<Date>(dates_.begin() + static_cast<std::ptrdiff_t>(begin),
                                      dates_.begin() + static_cast<std::ptrdiff_t>(end))};
    for (std::size_t c = 0; c < cols(); ++c) {
        out.add_column(names_[c], Series(columns_[c].begin() + static_cast<std::ptrdiff_t>(begin),
                                         columns_[c].begin() + static_cast<std::ptrdiff_t>(end)));
    }
    return out;
}

SeriesFrame SeriesFrame::select(std::span<const std::string> names) const {
    SeriesFrame out{dates_};
    for (const auto& n : names) out.add_column(n, column(n));
    return out;
}

bool operator==(const SeriesFrame& a, const SeriesFrame& b) {
    if (a.dates_ != b.dates_ || a.names_ != b.names_) return false;
    for (std::size_t c = 0; c < a.columns_.size(); ++c) {
        const auto& x = a.columns_[c];
        const auto& y = b.columns_[c];
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (is_missing(x[i]) != is_missing(y[i])) return false;
            if (!is_missing(x[i]) && x[i] != y[i]) return false;
        }
    }
    return true;
}

void write_frame_csv(std::ostream& out, const SeriesFrame& frame) {
    out << "date";
    for (const auto& n : frame.column_names()) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out << frame.dates()[r].iso();
        for (std::size_t c = 0; c < frame.cols(); ++c) out << ',' << csv::format_double(frame.column(c)[r]);
        out << '\n';
    }
}

SeriesFrame read_frame_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("frame CSV: missing header row");
    const auto header = csv::split_line(line);
    if (header.empty() || header.front() != "date")
        throw std::runtime_error("frame CSV: first column must be 'date'");
    std::vector<Date> dates;
    std::vector<Series> cols(header.size() - 1);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error("frame CSV: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        auto date = Date::parse_iso(fields[0]);
        if (!date) throw std::runtime_error("frame CSV: bad date on line " + std::to_string(line_no));
        dates.push_back(*date);
        for (std::size_t c = 1; c < fields.size(); ++c) cols[c - 1].push_back(csv::parse_double(fields[c]));
    }
    SeriesFrame frame{std::move(dates)};
    for (std::size_t c = 0; c < cols.size(); ++c) frame.add_column(header[c + 1], std::move(cols[c]));
    return frame;
}

void write_frame_csv_file(const std::string& path, const SeriesFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_frame_csv(out, frame);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SeriesFrame read_frame_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_frame_csv(in);
}

}  // namespace tsf
