#pragma once

// Euclidean projections onto the convex feasible sets of the relaxed problem.
// The primal feasible set factorizes over cache rows and delivery rows, so
// every projection here is row-wise and exact.

#include <span>
#include <vector>

#include "simcache/cost.hpp"
#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache {

struct CappedProjectionOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
};

/// Projects the free coordinates of `row` onto {y in [0,1]^k : sum y <= capacity}
/// and sets pinned coordinates to exactly 1. `pinned` has one flag per entry.
std::vector<double> project_cache_row(std::span<const double> row, long capacity,
                                      const std::vector<bool>& pinned,
                                      const CappedProjectionOptions& opts = {});

/// Projection onto the probability simplex {y >= 0, sum y = 1}.
std::vector<double> project_delivery_row(std::span<const double> row);

/// Elementwise max(0, .).
Matrix clamp_dual(const Matrix& raw);

/// Projects every cache row of X in place (pins from the scenario's sources).
void project_caching(const Scenario& s, Matrix& x);
/// Projects every delivery row of Q in place.
void project_delivery(Matrix& q);

}  // namespace simcache
