#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mcs::csv {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double value);

/// Writes one comma-delimited, LF-terminated record.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

std::vector<std::string> split_row(std::string_view line);

}  // namespace mcs::csv
