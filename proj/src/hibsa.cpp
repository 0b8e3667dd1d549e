#include "simcache/hibsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "simcache/csv.hpp"
#include "simcache/gradients.hpp"
#include "simcache/projection.hpp"

namespace simcache {

std::string_view to_string(DualPerturbation p) {
  switch (p) {
    case DualPerturbation::kShrink: return "shrink";
    case DualPerturbation::kAmplify: return "amplify";
  }
  return "unknown";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIterations: return "max_iterations";
    case StopReason::kDiverged: return "diverged";
  }
  return "unknown";
}

Matrix requested_delivery(const Scenario& s) {
  Matrix q(s.num_requests(), s.num_contents());
  for (RequestId r = 0; r < s.num_requests(); ++r) q(r, s.requests[r].content) = 1.0;
  return q;
}

PrimalState initial_state(const Scenario& s, const SolverConfig& cfg) {
  const std::size_t nf = s.num_contents();
  PrimalState st = zero_primal(s);
  if (cfg.random_init) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& v : st.x.values()) v = unit(rng);
    for (double& v : st.q.values()) v = unit(rng);
    project_caching(s, st.x);
    project_delivery(st.q);
  } else {
    for (NodeId v = 0; v < s.num_nodes(); ++v) {
      std::size_t pins = 0;
      for (ContentId f = 0; f < nf; ++f) pins += s.pinned(v, f) ? 1 : 0;
      const std::size_t free_count = nf - pins;
      const double share =
          free_count == 0
              ? 0.0
              : std::min(1.0, static_cast<double>(s.capacities[v]) / static_cast<double>(free_count));
      for (ContentId f = 0; f < nf; ++f) st.x(v, f) = s.pinned(v, f) ? 1.0 : share;
    }
    st.q.fill(nf == 0 ? 0.0 : 1.0 / static_cast<double>(nf));
  }
  if (!cfg.optimize_delivery) st.q = requested_delivery(s);
  return st;
}

PrimalState primal_step(const Scenario& s, const PrimalState& st, const Matrix& gx,
                        const Matrix& gq, double eta_x, double eta_q, bool update_delivery) {
  PrimalState next = st;
  for (NodeId v = 0; v < s.num_nodes(); ++v) {
    for (ContentId f = 0; f < s.num_contents(); ++f) {
      if (!s.pinned(v, f)) next.x(v, f) -= eta_x * gx(v, f);
    }
  }
  project_caching(s, next.x);
  if (update_delivery) {
    auto qv = next.q.values();
    auto gv = gq.values();
    for (std::size_t i = 0; i < qv.size(); ++i) qv[i] -= eta_q * gv[i];
    project_delivery(next.q);
  }
  return next;
}

PrimalState primal_step(const Scenario& s, const PrimalState& st, const DualState& dual,
                        double eta_x, double eta_q, bool update_delivery) {
  Matrix gx(s.num_nodes(), s.num_contents());
  Matrix gq(s.num_requests(), s.num_contents());
  GradientSink sink{.x = &gx, .q = update_delivery ? &gq : nullptr};
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    const double rate = s.requests[r].rate;
    if (rate == 0.0) continue;
    for (ContentId g = 0; g < s.num_contents(); ++g)
      accumulate_pair_gradient(s, st, dual, r, g, rate, sink);
  }
  return primal_step(s, st, gx, gq, eta_x, eta_q, update_delivery);
}

DualState dual_step(const DualState& dual, const Matrix& gmu, long n, double eta_mu,
                    DualPerturbation perturbation) {
  // gamma(n) * eta_mu = n^{-1/4}
  const double damping = std::pow(static_cast<double>(n), -0.25);
  const double factor =
      perturbation == DualPerturbation::kShrink ? 1.0 - damping : 1.0 + damping;
  DualState next = dual;
  auto mv = next.mu.values();
  auto gv = gmu.values();
  for (std::size_t i = 0; i < mv.size(); ++i) mv[i] = std::max(0.0, factor * mv[i] + eta_mu * gv[i]);
  return next;
}

DualState dual_step(const Scenario& s, const PrimalState& next, const DualState& dual, long n,
                    double eta_mu, DualPerturbation perturbation) {
  return dual_step(dual, grad_mu(s, next), n, eta_mu, perturbation);
}

namespace {

TraceRecord record(const Scenario& s, long n, const PrimalState& st, const DualState& dual,
                   double lag) {
  TraceRecord rec;
  rec.n = n;
  rec.lagrangian = lag;
  rec.expected_delay = expected_delay(s, st);
  rec.dissimilarity_cost = dissimilarity_cost(s, st);
  rec.objective = objective(s, st);
  rec.max_h = max_availability_violation(s, st);
  rec.dual_norm = frobenius_norm(dual.mu);
  return rec;
}

}  // namespace

OfflineResult solve_offline(const Scenario& s, const SolverConfig& cfg) {
  OfflineResult out;
  PrimalState st = initial_state(s, cfg);
  DualState dual = zero_dual(s);
  double prev = lagrangian(s, st, dual);

  SolveTrace& trace = out.trace;
  trace.stop = StopReason::kMaxIterations;
  for (long n = 1; n <= cfg.max_iters; ++n) {
    st = primal_step(s, st, dual, cfg.eta_s, cfg.eta_s, cfg.optimize_delivery);
    dual = dual_step(s, st, dual, n, cfg.eta_mu, cfg.perturbation);
    const double lag = lagrangian(s, st, dual);
    trace.records.push_back(record(s, n, st, dual, lag));
    trace.iterations = n;
    if (!std::isfinite(lag)) {
      trace.stop = StopReason::kDiverged;
      break;
    }
    if (std::abs(lag - prev) <= cfg.delta) {
      trace.stop = StopReason::kConverged;
      break;
    }
    prev = lag;
  }

  out.rounded = round_solution(s, st);
  out.fractional = std::move(st);
  out.dual = std::move(dual);
  return out;
}

Matrix round_caching(const Scenario& s, const Matrix& x) {
  const std::size_t nf = s.num_contents();
  Matrix out(s.num_nodes(), nf);
  std::vector<ContentId> order;
  for (NodeId v = 0; v < s.num_nodes(); ++v) {
    order.clear();
    for (ContentId f = 0; f < nf; ++f) {
      if (s.pinned(v, f)) {
        out(v, f) = 1.0;
      } else {
        order.push_back(f);
      }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](ContentId a, ContentId b) { return x(v, a) > x(v, b); });
    const std::size_t take =
        std::min(order.size(), static_cast<std::size_t>(std::max(s.capacities[v], 0L)));
    for (std::size_t i = 0; i < take; ++i) out(v, order[i]) = 1.0;
  }
  return out;
}

ContentId select_delivery(const Scenario& s, const Matrix& x, std::span<const double> q_row,
                          RequestId r) {
  ContentId best = s.requests[r].content;
  double best_q = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (ContentId g = 0; g < s.num_contents(); ++g) {
    if (!available(s, x, r, g)) continue;
    if (!found || q_row[g] > best_q) {
      best = g;
      best_q = q_row[g];
      found = true;
    }
  }
  return best;
}

Matrix round_delivery(const Scenario& s, const Matrix& x, const Matrix& q) {
  Matrix out(s.num_requests(), s.num_contents());
  for (RequestId r = 0; r < s.num_requests(); ++r) out(r, select_delivery(s, x, q.row(r), r)) = 1.0;
  return out;
}

PrimalState round_solution(const Scenario& s, const PrimalState& fractional) {
  PrimalState out;
  out.x = round_caching(s, fractional.x);
  out.q = round_delivery(s, out.x, fractional.q);
  return out;
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  using csv::format_real;
  csv::write_row(out, {"n", "lagrangian", "objective", "expected_delay", "dissimilarity_cost",
                       "max_h", "dual_norm"});
  for (const TraceRecord& rec : trace.records) {
    csv::write_row(out, {std::to_string(rec.n), format_real(rec.lagrangian),
                         format_real(rec.objective), format_real(rec.expected_delay),
                         format_real(rec.dissimilarity_cost), format_real(rec.max_h),
                         format_real(rec.dual_norm)});
  }
}

}  // namespace simcache
