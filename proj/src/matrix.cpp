#include "simcache/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace simcache {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.values()) best = std::max(best, std::abs(v));
  return best;
}

double frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double best = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) best = std::max(best, std::abs(av[i] - bv[i]));
  return best;
}

}  // namespace simcache
