#pragma once

// Analytic partial derivatives of the Lagrangian with respect to X, Q and mu,
// and a central finite-difference approximation used to check them.

#include "simcache/cost.hpp"
#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache {

enum class GradientBlock { X, Q, Mu };

/// dL/dx_{v,g}. Entries for pinned (source) variables are computed like any
/// other; callers zero them before stepping.
Matrix grad_x(const Scenario& s, const PrimalState& st, const DualState& dual);

/// dL/dq_{r,g} = lambda_r * (t_{r,g} + alpha d(f,g) + mu_{r,g} * unavailability).
Matrix grad_q(const Scenario& s, const PrimalState& st, const DualState& dual);

/// dL/dmu_{r,g} = lambda_r * h_{r,g}.
Matrix grad_mu(const Scenario& s, const PrimalState& st);

/// Optional outputs for accumulate_pair_gradient; null blocks are skipped.
struct GradientSink {
  Matrix* x = nullptr;
  Matrix* q = nullptr;
  Matrix* mu = nullptr;
};

/// Adds `weight` times the rate-free derivative terms contributed by the
/// single (request r, content g) pair. With weight = lambda_r summed over all
/// pairs this reproduces grad_x / grad_q / grad_mu; the online estimator
/// uses weight = count / T instead.
void accumulate_pair_gradient(const Scenario& s, const PrimalState& st, const DualState& dual,
                              RequestId r, ContentId g, double weight, const GradientSink& sink);

/// Central differences of lagrangian over one block. Perturbed coordinates
/// are clamped to [0, 1] for X and Q and to [0, inf) for mu; the quotient
/// uses the actual clamped spread.
Matrix fd_gradient(const Scenario& s, const PrimalState& st, const DualState& dual,
                   GradientBlock which, double step);

}  // namespace simcache
