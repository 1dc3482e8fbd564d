#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace glmstab {

/// Scientific notation with 17 significant digits; nan/inf spelled out.
std::string format_number(double x);

/// RFC-4180 field quoting: fields containing comma, quote, CR or LF are
/// wrapped in double quotes with embedded quotes doubled.
std::string csv_field(std::string_view s);

/// Writes one CSV record terminated by CRLF.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace glmstab
