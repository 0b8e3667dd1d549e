#include "simcache/cost.hpp"

#include <algorithm>

namespace simcache {

PrimalState zero_primal(const Scenario& s) {
  return {Matrix(s.num_nodes(), s.num_contents()), Matrix(s.num_requests(), s.num_contents())};
}

DualState zero_dual(const Scenario& s) { return {Matrix(s.num_requests(), s.num_contents())}; }

double delivery_delay(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  const auto& nodes = s.requests[r].path.nodes;
  double miss = 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    miss *= 1.0 - x(nodes[k], g);
    total += s.network.delay(nodes[k + 1], nodes[k]) * miss;
  }
  return total;
}

double delivery_cost(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  return delivery_delay(s, x, r, g) + s.alpha * s.dissimilarity(s.requests[r].content, g);
}

double unavailability(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  const auto& nodes = s.requests[r].path.nodes;
  const std::size_t span = s.availability_span(r, g);
  double prod = 1.0;
  for (std::size_t k = 0; k < span; ++k) prod *= 1.0 - x(nodes[k], g);
  return prod;
}

double availability_violation(const Scenario& s, const PrimalState& st, RequestId r, ContentId g) {
  return st.q(r, g) * unavailability(s, st.x, r, g);
}

bool available(const Scenario& s, const Matrix& x, RequestId r, ContentId g) {
  return unavailability(s, x, r, g) == 0.0;
}

double objective(const Scenario& s, const PrimalState& st) {
  double total = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    double inner = 0.0;
    for (ContentId g = 0; g < s.num_contents(); ++g) {
      const double q = st.q(r, g);
      if (q != 0.0) inner += q * delivery_cost(s, st.x, r, g);
    }
    total += s.requests[r].rate * inner;
  }
  return total;
}

double expected_delay(const Scenario& s, const PrimalState& st) {
  double total = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    double inner = 0.0;
    for (ContentId g = 0; g < s.num_contents(); ++g) {
      const double q = st.q(r, g);
      if (q != 0.0) inner += q * delivery_delay(s, st.x, r, g);
    }
    total += s.requests[r].rate * inner;
  }
  return total;
}

double dissimilarity_cost(const Scenario& s, const PrimalState& st) {
  double total = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    const ContentId f = s.requests[r].content;
    double inner = 0.0;
    for (ContentId g = 0; g < s.num_contents(); ++g) inner += st.q(r, g) * s.dissimilarity(f, g);
    total += s.requests[r].rate * inner;
  }
  return total;
}

double lagrangian(const Scenario& s, const PrimalState& st, const DualState& dual) {
  double penalty = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    double inner = 0.0;
    for (ContentId g = 0; g < s.num_contents(); ++g) {
      const double mu = dual.mu(r, g);
      if (mu != 0.0) inner += mu * availability_violation(s, st, r, g);
    }
    penalty += s.requests[r].rate * inner;
  }
  return objective(s, st) + penalty;
}

double max_availability_violation(const Scenario& s, const PrimalState& st) {
  double worst = 0.0;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    for (ContentId g = 0; g < s.num_contents(); ++g)
      worst = std::max(worst, availability_violation(s, st, r, g));
  }
  return worst;
}

}  // namespace simcache
