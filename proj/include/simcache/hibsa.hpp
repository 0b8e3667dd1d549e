#pragma once

// Offline solver: alternating projected gradient descent on the primal
// variables (X, Q) and perturbed projected gradient ascent on the
// multipliers mu, followed by greedy rounding to an integer solution.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "simcache/cost.hpp"
#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache {

/// Sign of the perturbation term in the dual update
///   mu(n+1) = ((1 -/+ gamma(n) eta_mu) mu(n) + eta_mu grad_mu)^+,
/// gamma(n) = 1 / (eta_mu n^{1/4}).
/// kShrink damps the multipliers (the regularized ascent step). kAmplify
/// grows them by (1 + n^{-1/4}) per step and diverges once any multiplier is
/// positive; it is kept for comparison only.
enum class DualPerturbation { kShrink, kAmplify };

std::string_view to_string(DualPerturbation p);

struct SolverConfig {
  double eta_s = 1e-3;
  double eta_mu = 1.0;
  double delta = 1e-6;
  long max_iters = 50'000;
  std::uint64_t seed = 0;
  bool random_init = false;
  // false pins Q to the requested content and optimizes X only.
  bool optimize_delivery = true;
  DualPerturbation perturbation = DualPerturbation::kShrink;
};

enum class StopReason { kConverged, kMaxIterations, kDiverged };

std::string_view to_string(StopReason r);

struct TraceRecord {
  long n = 0;
  double lagrangian = 0.0;
  double objective = 0.0;
  double expected_delay = 0.0;
  double dissimilarity_cost = 0.0;
  double max_h = 0.0;
  double dual_norm = 0.0;
};

struct SolveTrace {
  std::vector<TraceRecord> records;
  long iterations = 0;
  StopReason stop = StopReason::kMaxIterations;
};

struct OfflineResult {
  PrimalState fractional;
  DualState dual;
  PrimalState rounded;
  SolveTrace trace;
};

/// Deterministic feasible start: free cache entries C_v / (|F| - pins),
/// uniform delivery rows, mu = 0. With cfg.random_init the start is a
/// projected uniform draw from cfg.seed. With optimize_delivery off, Q is
/// the identity on requested contents.
PrimalState initial_state(const Scenario& s, const SolverConfig& cfg);

/// Q with q_{r,f} = 1 on the requested content of every request.
Matrix requested_delivery(const Scenario& s);

/// Projected gradient step given precomputed gradient blocks. Pinned X
/// entries of the gradient are ignored. `eta_q` is unused when
/// `update_delivery` is false.
PrimalState primal_step(const Scenario& s, const PrimalState& st, const Matrix& gx,
                        const Matrix& gq, double eta_x, double eta_q, bool update_delivery = true);

/// Projected gradient step using the analytic gradients at (st, dual).
PrimalState primal_step(const Scenario& s, const PrimalState& st, const DualState& dual,
                        double eta_x, double eta_q, bool update_delivery = true);

/// Perturbed ascent step with gradient `gmu`; n >= 1.
DualState dual_step(const DualState& dual, const Matrix& gmu, long n, double eta_mu,
                    DualPerturbation perturbation = DualPerturbation::kShrink);

/// Perturbed ascent step with the analytic grad_mu at the updated primal state.
DualState dual_step(const Scenario& s, const PrimalState& next, const DualState& dual, long n,
                    double eta_mu, DualPerturbation perturbation = DualPerturbation::kShrink);

OfflineResult solve_offline(const Scenario& s, const SolverConfig& cfg);

/// Per node: sources pinned to 1, then the capacity filled with the largest
/// fractional entries (smaller content id first on ties).
Matrix round_caching(const Scenario& s, const Matrix& x);

/// Among contents available on the path of r under integer `x`, the one with
/// the largest q (smaller id first on ties). Falls back to the requested
/// content, which the source always makes available.
ContentId select_delivery(const Scenario& s, const Matrix& x, std::span<const double> q_row,
                          RequestId r);

/// One-hot delivery matrix from select_delivery for every request.
Matrix round_delivery(const Scenario& s, const Matrix& x, const Matrix& q);

PrimalState round_solution(const Scenario& s, const PrimalState& fractional);

/// Columns: n, lagrangian, objective, expected_delay, dissimilarity_cost,
/// max_h, dual_norm.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

}  // namespace simcache
