#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tsf::csv {

/// Splits one CSV record on `,`. Double-quoted fields may contain commas and
/// `""` escapes; surrounding whitespace and a trailing CR are stripped.
std::vector<std::string> split_line(std::string_view line);

/// Shortest decimal representation that parses back to the same double.
/// NaN is written as an empty field.
std::string format_double(double value);

/// Parses a numeric cell. Empty, non-numeric, or partially numeric cells
/// yield NaN. Thousands separators are not accepted.
double parse_double(std::string_view cell);

}  // namespace tsf::csv
