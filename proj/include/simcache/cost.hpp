#pragma once

// Delay, cost, availability constraint and Lagrangian of the joint caching /
// similarity-delivery problem, evaluated on fractional or integer states.

#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache {

/// Caching variables X (nodes x contents) and delivery variables Q
/// (requests x contents).
struct PrimalState {
  Matrix x;
  Matrix q;

  bool operator==(const PrimalState&) const = default;
};

/// Multipliers of the availability constraints, one per (request, content).
struct DualState {
  Matrix mu;

  bool operator==(const DualState&) const = default;
};

PrimalState zero_primal(const Scenario& s);
DualState zero_dual(const Scenario& s);

/// Expected delay of delivering content g for request r under caching X:
/// the hop delays toward the source, each weighted by the probability that
/// no earlier node on the path holds g.
double delivery_delay(const Scenario& s, const Matrix& x, RequestId r, ContentId g);

/// delivery_delay + alpha * d(f, g).
double delivery_cost(const Scenario& s, const Matrix& x, RequestId r, ContentId g);

/// Product of (1 - x_{v,g}) over the availability span of the path.
double unavailability(const Scenario& s, const Matrix& x, RequestId r, ContentId g);

/// h = q_{r,g} * unavailability; zero at integer points iff g is reachable on
/// the path or not delivered.
double availability_violation(const Scenario& s, const PrimalState& st, RequestId r, ContentId g);

/// True when some node on the availability span of r stores g under an
/// integer caching matrix.
bool available(const Scenario& s, const Matrix& x, RequestId r, ContentId g);

double objective(const Scenario& s, const PrimalState& st);
double expected_delay(const Scenario& s, const PrimalState& st);
double dissimilarity_cost(const Scenario& s, const PrimalState& st);

/// objective + sum_r lambda_r sum_g mu_{r,g} h_{r,g}.
double lagrangian(const Scenario& s, const PrimalState& st, const DualState& dual);

/// Largest h over all (request, content) pairs.
double max_availability_violation(const Scenario& s, const PrimalState& st);

}  // namespace simcache
