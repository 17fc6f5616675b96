#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nbprior {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
unsigned long long parse_uint(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delim);

// RFC 4180 style quoting, only when the field needs it.
std::string csv_field(std::string_view field);
// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> parse_csv_line(std::string_view line);

std::string html_escape(std::string_view text);

// Keeps [A-Za-z0-9._-]; everything else becomes %XX.
std::string percent_encode(std::string_view text);
std::string percent_decode(std::string_view text);

}  // namespace nbprior
