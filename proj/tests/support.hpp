#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the library's cost or projection code, so the oracles can be
// trusted to check it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "simcache/cost.hpp"
#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache::testing {

struct RequestSpec {
  ContentId content;
  std::vector<NodeId> path;
  double rate = 1.0;
};

// Hand-built instance; node i is named "v<i>", content f is "f<f+1>".
inline Scenario make_scenario(std::size_t num_nodes, const std::vector<Edge>& edges,
                              std::size_t num_contents,
                              const std::vector<std::vector<NodeId>>& sources,
                              const std::vector<RequestSpec>& requests,
                              std::vector<long> capacities, double alpha, double beta = 3.0) {
  Scenario s;
  std::vector<std::string> names;
  for (std::size_t v = 0; v < num_nodes; ++v) names.push_back("v" + std::to_string(v));
  s.network = Network(names, edges);
  for (std::size_t f = 0; f < num_contents; ++f) s.catalog.names.push_back("f" + std::to_string(f + 1));
  s.sources.nodes = sources;
  for (const auto& r : requests) s.requests.push_back({r.content, Path{r.path}, r.rate});
  s.dissimilarity = DissimilarityMatrix::power_law(num_contents, beta);
  s.capacities = std::move(capacities);
  s.alpha = alpha;
  return s;
}

// Three-node line v0 - v1 - v2 with delays 2 and 5, both contents at v2,
// one request for content 0 entering at v0.
inline Scenario three_node_line(double alpha = 10.0) {
  return make_scenario(3, {{0, 1, 2.0}, {1, 2, 5.0}}, 2, {{2}, {2}}, {{0, {0, 1, 2}, 1.0}},
                       {1, 1, 0}, alpha);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Every entry drawn from [lo, hi]; no feasibility imposed.
inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo,
                            double hi) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = uniform(rng, lo, hi);
  return m;
}

inline PrimalState random_interior_state(const Scenario& s, std::mt19937_64& rng) {
  return {random_matrix(s.num_nodes(), s.num_contents(), rng, 0.05, 0.95),
          random_matrix(s.num_requests(), s.num_contents(), rng, 0.05, 0.95)};
}

inline DualState random_dual(const Scenario& s, std::mt19937_64& rng) {
  return {random_matrix(s.num_requests(), s.num_contents(), rng, 0.1, 2.0)};
}

// ---- term-by-term cost oracle -------------------------------------------

inline double oracle_delay(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  const auto& p = s.requests[r].path.nodes;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    double miss = 1.0;
    for (std::size_t j = 0; j <= k; ++j) miss *= 1.0 - x(p[j], g);
    total += s.network.delay(p[k + 1], p[k]) * miss;
  }
  return total;
}

inline double oracle_unavailability(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  const auto& p = s.requests[r].path.nodes;
  std::size_t span = p.size();
  if (s.availability_excludes_terminal && g != s.requests[r].content) span -= 1;
  double miss = 1.0;
  for (std::size_t j = 0; j < span; ++j) miss *= 1.0 - x(p[j], g);
  return miss;
}

inline double oracle_lagrangian(const Scenario& s, const PrimalState& st, const DualState& dual) {
  double total = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    const double lambda = s.requests[r].rate;
    const ContentId f = s.requests[r].content;
    for (ContentId g = 0; g < s.num_contents(); ++g) {
      const double q = st.q(r, g);
      total += lambda * q * (oracle_delay(s, st.x, r, g) + s.alpha * s.dissimilarity(f, g));
      total += lambda * dual.mu(r, g) * q * oracle_unavailability(s, st.x, r, g);
    }
  }
  return total;
}

// ---- dense QP oracles for the projections --------------------------------
//
// Enumerates every active set (each coordinate at its lower bound, upper
// bound or free; the coupling constraint active or not), solves the
// resulting equality-constrained least squares in closed form, and keeps
// the nearest primal-feasible candidate. The projection is the KKT point of
// one of these active sets, and every feasible candidate is at least as far
// as the projection, so the minimum is exact.

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
  return total;
}

inline std::vector<double> qp_capped_oracle(const std::vector<double>& a, double capacity) {
  const std::size_t n = a.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<int> state(n);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(c % 3);  // 0 lower, 1 upper, 2 free
      c /= 3;
    }
    for (int coupled = 0; coupled < 2; ++coupled) {
      double free_sum = 0.0;
      double upper = 0.0;
      std::size_t free_count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == 2) {
          free_sum += a[i];
          ++free_count;
        } else if (state[i] == 1) {
          upper += 1.0;
        }
      }
      double theta = 0.0;
      if (coupled) {
        if (free_count == 0) continue;
        theta = (free_sum + upper - capacity) / static_cast<double>(free_count);
      }
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i)
        y[i] = state[i] == 0 ? 0.0 : state[i] == 1 ? 1.0 : a[i] - theta;
      double sum = 0.0;
      bool ok = true;
      for (double v : y) {
        sum += v;
        if (v < -1e-12 || v > 1.0 + 1e-12) ok = false;
      }
      if (!ok || sum > capacity + 1e-12) continue;
      const double dist = squared_distance(y, a);
      if (dist < best_dist) {
        best_dist = dist;
        best = y;
      }
    }
  }
  return best;
}

inline std::vector<double> qp_simplex_oracle(const std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        free_sum += a[i];
        ++free_count;
      }
    }
    const double theta = (free_sum - 1.0) / static_cast<double>(free_count);
    std::vector<double> y(n, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        y[i] = a[i] - theta;
        if (y[i] < -1e-12) ok = false;
      }
    }
    if (!ok) continue;
    const double dist = squared_distance(y, a);
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  return best;
}

// ---- exhaustive integer optimum for tiny instances -----------------------

// Delay of g for r under an integer caching matrix: hop delays up to the
// first node that stores g.
inline double integer_delay(const Scenario& s, const std::vector<std::vector<bool>>& store,
                            RequestId r, ContentId g) {
  const auto& p = s.requests[r].path.nodes;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (store[p[k]][g]) return total;
    total += s.network.delay(p[k + 1], p[k]);
  }
  return total;
}

inline bool integer_available(const Scenario& s, const std::vector<std::vector<bool>>& store,
                              RequestId r, ContentId g) {
  const auto& p = s.requests[r].path.nodes;
  std::size_t span = p.size();
  if (s.availability_excludes_terminal && g != s.requests[r].content) span -= 1;
  for (std::size_t j = 0; j < span; ++j)
    if (store[p[j]][g]) return true;
  return false;
}

struct BruteForceOptimum {
  double objective = std::numeric_limits<double>::infinity();
  long placements = 0;
};

// Minimum objective over every capacity-feasible placement (sources pinned)
// and, per placement, the best available content for each request.
inline BruteForceOptimum brute_force_optimum(const Scenario& s) {
  const std::size_t nodes = s.num_nodes();
  const std::size_t contents = s.num_contents();
  std::vector<std::pair<NodeId, ContentId>> free_cells;
  for (NodeId v = 0; v < nodes; ++v)
    for (ContentId f = 0; f < contents; ++f)
      if (!s.pinned(v, f)) free_cells.emplace_back(v, f);

  BruteForceOptimum out;
  const std::uint64_t combos = std::uint64_t{1} << free_cells.size();
  for (std::uint64_t mask = 0; mask < combos; ++mask) {
    std::vector<std::vector<bool>> store(nodes, std::vector<bool>(contents, false));
    std::vector<long> used(nodes, 0);
    for (NodeId v = 0; v < nodes; ++v)
      for (ContentId f = 0; f < contents; ++f) store[v][f] = s.pinned(v, f);
    for (std::size_t i = 0; i < free_cells.size(); ++i) {
      if (mask >> i & 1U) {
        store[free_cells[i].first][free_cells[i].second] = true;
        ++used[free_cells[i].first];
      }
    }
    bool fits = true;
    for (NodeId v = 0; v < nodes; ++v) fits = fits && used[v] <= s.capacities[v];
    if (!fits) continue;
    ++out.placements;
    double total = 0.0;
    for (RequestId r = 0; r < s.num_requests(); ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (ContentId g = 0; g < contents; ++g) {
        if (!integer_available(s, store, r, g)) continue;
        best = std::min(best, integer_delay(s, store, r, g) +
                                  s.alpha * s.dissimilarity(s.requests[r].content, g));
      }
      total += s.requests[r].rate * best;
    }
    out.objective = std::min(out.objective, total);
  }
  return out;
}

inline std::vector<std::vector<bool>> to_store(const Matrix& x) {
  std::vector<std::vector<bool>> out(x.rows(), std::vector<bool>(x.cols()));
  for (std::size_t v = 0; v < x.rows(); ++v)
    for (std::size_t f = 0; f < x.cols(); ++f) out[v][f] = x(v, f) == 1.0;
  return out;
}

// Exact integer feasibility of a rounded state: binary X with sources held
// and capacities respected, one-hot Q, and only available contents
// delivered.
inline bool integer_feasible(const Scenario& s, const PrimalState& st) {
  for (NodeId v = 0; v < s.num_nodes(); ++v) {
    long used = 0;
    for (ContentId f = 0; f < s.num_contents(); ++f) {
      const double x = st.x(v, f);
      if (x != 0.0 && x != 1.0) return false;
      if (s.pinned(v, f)) {
        if (x != 1.0) return false;
      } else if (x == 1.0) {
        ++used;
      }
    }
    if (used > s.capacities[v]) return false;
  }
  const auto store = to_store(st.x);
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    double mass = 0.0;
    for (ContentId g = 0; g < s.num_contents(); ++g) {
      const double q = st.q(r, g);
      if (q != 0.0 && q != 1.0) return false;
      mass += q;
      if (q == 1.0 && !integer_available(s, store, r, g)) return false;
    }
    if (mass != 1.0) return false;
  }
  return true;
}

}  // namespace simcache::testing
