#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

namespace simcache::csv {

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

/// Writes comma-joined fields followed by '\n'.
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);

}  // namespace simcache::csv
