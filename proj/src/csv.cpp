#include "simcache/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace simcache::csv {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (std::string_view f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << '\n';
}

}  // namespace simcache::csv
