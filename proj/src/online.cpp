#include "simcache/online.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "simcache/csv.hpp"
#include "simcache/gradients.hpp"

namespace simcache {

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kRequestStreamTag = 0;

// sum_g q (t + alpha d) + mu q * unavailability, without the rate.
double request_lagrangian(const Scenario& s, const PrimalState& st, const DualState& dual,
                          RequestId r) {
  double total = 0.0;
  for (ContentId g = 0; g < s.num_contents(); ++g) {
    const double q = st.q(r, g);
    if (q == 0.0) continue;
    total += q * delivery_cost(s, st.x, r, g) + dual.mu(r, g) * q * unavailability(s, st.x, r, g);
  }
  return total;
}

}  // namespace

RequestStreams::RequestStreams(std::uint64_t seed, std::size_t num_requests) {
  streams_.reserve(num_requests);
  for (std::size_t r = 0; r < num_requests; ++r)
    streams_.push_back(seeded(seed, kRequestStreamTag, r));
}

std::mt19937_64 auxiliary_stream(std::uint64_t seed, std::uint64_t tag) {
  return seeded(seed, tag + 1, 0);
}

std::vector<RequestId> draw_slot_requests(const Scenario& s, double slot_length,
                                          RequestStreams& streams) {
  std::vector<RequestId> out;
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    const double mean = s.requests[r].rate * slot_length;
    if (!(mean > 0.0)) continue;
    std::poisson_distribution<long> count(mean);
    const long n = count(streams.stream(r));
    out.insert(out.end(), static_cast<std::size_t>(n), r);
  }
  return out;
}

ContentId serve_request(const Scenario& s, const Matrix& x_rounded, const Matrix& q, RequestId r) {
  return select_delivery(s, x_rounded, q.row(r), r);
}

StochasticGradient stochastic_gradients(const Scenario& s, const PrimalState& st,
                                        const DualState& dual,
                                        std::span<const ServedRequest> served, double slot_length,
                                        EstimatorSupport support) {
  StochasticGradient g{Matrix(s.num_nodes(), s.num_contents()),
                       Matrix(s.num_requests(), s.num_contents()),
                       Matrix(s.num_requests(), s.num_contents())};
  const GradientSink sink{.x = &g.x, .q = &g.q, .mu = &g.mu};
  if (support == EstimatorSupport::kDeliveredOnly) {
    for (const ServedRequest& sr : served)
      accumulate_pair_gradient(s, st, dual, sr.request, sr.delivered, 1.0 / slot_length, sink);
    return g;
  }
  std::vector<long> counts(s.num_requests(), 0);
  for (const ServedRequest& sr : served) ++counts[sr.request];
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    if (counts[r] == 0) continue;
    const double weight = static_cast<double>(counts[r]) / slot_length;
    for (ContentId c = 0; c < s.num_contents(); ++c)
      accumulate_pair_gradient(s, st, dual, r, c, weight, sink);
  }
  return g;
}

double WindowMean::push(double v) {
  if (values_.size() < static_cast<std::size_t>(width_)) {
    values_.push_back(v);
  } else {
    values_[next_] = v;
    next_ = (next_ + 1) % values_.size();
  }
  sum_ = std::accumulate(values_.begin(), values_.end(), 0.0);
  return sum_ / static_cast<double>(values_.size());
}

OnlineResult run_online(const Scenario& s, const OnlineConfig& cfg) {
  OnlineResult out;
  PrimalState st = initial_state(s, SolverConfig{});
  DualState dual = zero_dual(s);
  Matrix x_rounded = round_caching(s, st.x);
  RequestStreams streams(cfg.seed, s.num_requests());
  WindowMean delay_window(cfg.delay_window);
  WindowMean dissim_window(cfg.delay_window);
  WindowMean realized_window(cfg.delay_window);

  out.slots.reserve(static_cast<std::size_t>(std::max(cfg.num_slots, 0L)));
  for (long t = 1; t <= cfg.num_slots; ++t) {
    SlotOutcome slot;
    PrimalState serving{x_rounded, Matrix(s.num_requests(), s.num_contents())};
    for (RequestId r = 0; r < s.num_requests(); ++r)
      serving.q(r, serve_request(s, x_rounded, st.q, r)) = 1.0;

    const auto arrivals = draw_slot_requests(s, cfg.slot_length, streams);
    double realized = 0.0;
    double lag_estimate = 0.0;
    for (RequestId r : arrivals) {
      const ContentId g = serve_request(s, x_rounded, st.q, r);
      const double delay = delivery_delay(s, x_rounded, r, g);
      slot.served.push_back({r, g, delay, s.dissimilarity(s.requests[r].content, g)});
      realized += delay;
      lag_estimate += request_lagrangian(s, st, dual, r);
    }

    const StochasticGradient primal_grad =
        stochastic_gradients(s, st, dual, slot.served, cfg.slot_length, cfg.support);
    PrimalState next =
        primal_step(s, st, primal_grad.x, primal_grad.q, cfg.eta_x, cfg.eta_q, true);
    const StochasticGradient dual_grad =
        stochastic_gradients(s, next, dual, slot.served, cfg.slot_length, cfg.support);
    dual = dual_step(dual, dual_grad.mu, t, cfg.eta_mu, cfg.perturbation);
    st = std::move(next);
    Matrix next_rounded = round_caching(s, st.x);

    SlotRecord& rec = slot.record;
    rec.t = t;
    rec.num_requests = static_cast<long>(arrivals.size());
    rec.expected_delay = expected_delay(s, serving);
    rec.expected_dissimilarity = dissimilarity_cost(s, serving);
    rec.avg_delay_window = delay_window.push(rec.expected_delay);
    rec.dissimilarity_window = dissim_window.push(rec.expected_dissimilarity);
    rec.realized_delay_window = realized_window.push(realized / cfg.slot_length);
    rec.lagrangian_estimate = lag_estimate / cfg.slot_length;
    for (std::size_t i = 0; i < next_rounded.size(); ++i)
      rec.cache_churn += next_rounded.values()[i] != x_rounded.values()[i] ? 1 : 0;

    slot.rounded = std::move(serving);
    out.slots.push_back(std::move(slot));
    x_rounded = std::move(next_rounded);
  }

  out.rounded.x = x_rounded;
  out.rounded.q = round_delivery(s, x_rounded, st.q);
  out.state = std::move(st);
  out.dual = std::move(dual);
  return out;
}

std::vector<SlotRecord> slot_records(std::span<const SlotOutcome> slots) {
  std::vector<SlotRecord> out;
  out.reserve(slots.size());
  for (const SlotOutcome& s : slots) out.push_back(s.record);
  return out;
}

void write_slot_log_csv(std::ostream& out, std::span<const SlotRecord> records,
                        std::optional<double> offline_reference) {
  using csv::format_real;
  if (offline_reference) {
    csv::write_row(out, {"t", "num_requests", "avg_delay_window", "dissimilarity_window",
                         "lagrangian_estimate", "cache_churn", "realized_delay_window",
                         "offline_reference"});
  } else {
    csv::write_row(out, {"t", "num_requests", "avg_delay_window", "dissimilarity_window",
                         "lagrangian_estimate", "cache_churn", "realized_delay_window"});
  }
  const std::string reference = offline_reference ? format_real(*offline_reference) : "";
  for (const SlotRecord& r : records) {
    const std::string t = std::to_string(r.t);
    const std::string n = std::to_string(r.num_requests);
    const std::string delay = format_real(r.avg_delay_window);
    const std::string dissim = format_real(r.dissimilarity_window);
    const std::string lag = format_real(r.lagrangian_estimate);
    const std::string churn = std::to_string(r.cache_churn);
    const std::string realized = format_real(r.realized_delay_window);
    if (offline_reference) {
      csv::write_row(out, {t, n, delay, dissim, lag, churn, realized, reference});
    } else {
      csv::write_row(out, {t, n, delay, dissim, lag, churn, realized});
    }
  }
}

}  // namespace simcache
