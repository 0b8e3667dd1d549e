#include "simcache/gradients.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <vector>

namespace simcache {

void accumulate_pair_gradient(const Scenario& s, const PrimalState& st, const DualState& dual,
                              RequestId r, ContentId g, double weight, const GradientSink& sink) {
  const Request& req = s.requests[r];
  const auto& nodes = req.path.nodes;
  const std::size_t len = nodes.size();
  const std::size_t span = s.availability_span(r, g);
  const double q = st.q(r, g);
  const double mu = dual.mu(r, g);

  // miss[k] = 1 - x_{p_k, g}; prefix[k] = prod_{j<k} miss[j].
  thread_local std::vector<double> miss;
  thread_local std::vector<double> prefix;
  miss.resize(len);
  prefix.resize(len + 1);
  prefix[0] = 1.0;
  for (std::size_t k = 0; k < len; ++k) {
    miss[k] = 1.0 - st.x(nodes[k], g);
    prefix[k + 1] = prefix[k] * miss[k];
  }

  if (sink.q != nullptr || sink.mu != nullptr) {
    double delay = 0.0;
    for (std::size_t k = 0; k + 1 < len; ++k)
      delay += s.network.delay(nodes[k + 1], nodes[k]) * prefix[k + 1];
    const double unavail = prefix[span];
    const double d = s.dissimilarity(req.content, g);
    if (sink.q != nullptr) (*sink.q)(r, g) += weight * (delay + s.alpha * d + mu * unavail);
    if (sink.mu != nullptr) (*sink.mu)(r, g) += weight * q * unavail;
  }

  if (sink.x == nullptr || q == 0.0) return;

  // tail = sum_{k>=j} tau_k prod_{j<k'<=k} miss[k'], built back to front;
  // suffix = prod_{j<k<span} miss[k].
  double tail = 0.0;
  double suffix = 1.0;
  for (std::size_t j = len; j-- > 0;) {
    if (j + 1 < len) tail = s.network.delay(nodes[j + 1], nodes[j]) + miss[j + 1] * tail;
    double term = q * prefix[j] * tail;
    if (j < span) term += mu * q * prefix[j] * suffix;
    (*sink.x)(nodes[j], g) -= weight * term;
    if (j < span) suffix *= miss[j];
  }
}

namespace {

void accumulate_all(const Scenario& s, const PrimalState& st, const DualState& dual,
                    const GradientSink& sink) {
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    const double rate = s.requests[r].rate;
    if (rate == 0.0) continue;
    for (ContentId g = 0; g < s.num_contents(); ++g)
      accumulate_pair_gradient(s, st, dual, r, g, rate, sink);
  }
}

}  // namespace

Matrix grad_x(const Scenario& s, const PrimalState& st, const DualState& dual) {
  Matrix out(s.num_nodes(), s.num_contents());
  accumulate_all(s, st, dual, {.x = &out});
  return out;
}

Matrix grad_q(const Scenario& s, const PrimalState& st, const DualState& dual) {
  Matrix out(s.num_requests(), s.num_contents());
  accumulate_all(s, st, dual, {.q = &out});
  return out;
}

Matrix grad_mu(const Scenario& s, const PrimalState& st) {
  Matrix out(s.num_requests(), s.num_contents());
  const DualState unused = zero_dual(s);
  accumulate_all(s, st, unused, {.mu = &out});
  return out;
}

Matrix fd_gradient(const Scenario& s, const PrimalState& st, const DualState& dual,
                   GradientBlock which, double step) {
  assert(step > 0.0);
  PrimalState probe = st;
  DualState probe_dual = dual;
  Matrix* target = nullptr;
  double upper = 1.0;
  switch (which) {
    case GradientBlock::X: target = &probe.x; break;
    case GradientBlock::Q: target = &probe.q; break;
    case GradientBlock::Mu:
      target = &probe_dual.mu;
      upper = std::numeric_limits<double>::infinity();
      break;
  }

  Matrix out(target->rows(), target->cols());
  for (std::size_t i = 0; i < target->rows(); ++i) {
    for (std::size_t j = 0; j < target->cols(); ++j) {
      const double base = (*target)(i, j);
      const double hi = std::min(base + step, upper);
      const double lo = std::max(base - step, 0.0);
      (*target)(i, j) = hi;
      const double l_hi = lagrangian(s, probe, probe_dual);
      (*target)(i, j) = lo;
      const double l_lo = lagrangian(s, probe, probe_dual);
      (*target)(i, j) = base;
      out(i, j) = (l_hi - l_lo) / (hi - lo);
    }
  }
  return out;
}

}  // namespace simcache
