#include "simcache/projection.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <numeric>

namespace simcache {

namespace {

// Points this close to feasible are returned as-is so projection is
// idempotent under rounding.
constexpr double kFeasibleSlack = 1e-12;

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

double shifted_mass(std::span<const double> v, double theta) {
  double total = 0.0;
  for (double e : v) total += clip01(e - theta);
  return total;
}

// Closed-form shift for the active set implied by `theta`; falls back to
// `theta` when the implied sets are inconsistent.
double polish_shift(std::span<const double> v, double capacity, double theta) {
  double mid_sum = 0.0;
  std::size_t mid_count = 0;
  std::size_t upper_count = 0;
  for (double e : v) {
    const double y = e - theta;
    if (y >= 1.0) {
      ++upper_count;
    } else if (y > 0.0) {
      mid_sum += e;
      ++mid_count;
    }
  }
  if (mid_count == 0) return theta;
  const double exact = (mid_sum + static_cast<double>(upper_count) - capacity) /
                       static_cast<double>(mid_count);
  constexpr double kSlack = 1e-9;
  if (exact < 0.0) return theta;
  for (double e : v) {
    const double y_old = e - theta;
    const double y_new = e - exact;
    if (y_old >= 1.0 && y_new < 1.0 - kSlack) return theta;
    if (y_old <= 0.0 && y_new > kSlack) return theta;
    if (y_old > 0.0 && y_old < 1.0 && (y_new < -kSlack || y_new > 1.0 + kSlack)) return theta;
  }
  return exact;
}

}  // namespace

std::vector<double> project_cache_row(std::span<const double> row, long capacity,
                                      const std::vector<bool>& pinned,
                                      const CappedProjectionOptions& opts) {
  assert(pinned.size() == row.size());
  std::vector<double> out(row.size(), 1.0);
  std::vector<double> free_values;
  std::vector<std::size_t> free_index;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!pinned[i]) {
      free_values.push_back(row[i]);
      free_index.push_back(i);
    }
  }

  const double cap = static_cast<double>(std::max(capacity, 0L));
  double theta = 0.0;
  if (shifted_mass(free_values, 0.0) > cap + kFeasibleSlack) {
    double lo = 0.0;
    double hi = *std::max_element(free_values.begin(), free_values.end());
    for (int it = 0; it < opts.max_iterations && hi - lo > opts.tolerance; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (shifted_mass(free_values, mid) > cap) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    theta = cap == 0.0 ? hi : polish_shift(free_values, cap, 0.5 * (lo + hi));
  }

  for (std::size_t k = 0; k < free_values.size(); ++k)
    out[free_index[k]] = clip01(free_values[k] - theta);
  return out;
}

std::vector<double> project_delivery_row(std::span<const double> row) {
  std::vector<double> out(row.begin(), row.end());
  if (out.empty()) return out;
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  const bool nonnegative = std::all_of(out.begin(), out.end(), [](double v) { return v >= 0.0; });
  if (nonnegative && std::abs(total - 1.0) <= kFeasibleSlack) return out;
  std::vector<double> sorted = out;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  for (double& v : out) v = std::max(v - theta, 0.0);
  return out;
}

Matrix clamp_dual(const Matrix& raw) {
  Matrix out = raw;
  for (double& v : out.values()) v = std::max(v, 0.0);
  return out;
}

void project_caching(const Scenario& s, Matrix& x) {
  std::vector<bool> pins(s.num_contents());
  for (NodeId v = 0; v < s.num_nodes(); ++v) {
    for (ContentId f = 0; f < s.num_contents(); ++f) pins[f] = s.pinned(v, f);
    auto projected = project_cache_row(x.row(v), s.capacities[v], pins);
    std::copy(projected.begin(), projected.end(), x.row(v).begin());
  }
}

void project_delivery(Matrix& q) {
  for (std::size_t r = 0; r < q.rows(); ++r) {
    auto projected = project_delivery_row(q.row(r));
    std::copy(projected.begin(), projected.end(), q.row(r).begin());
  }
}

}  // namespace simcache
