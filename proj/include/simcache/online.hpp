#pragma once

// Slotted online operation: Poisson request arrivals per slot, delivery by
// feasible argmax of the fractional Q against the rounded caches, stochastic
// gradient estimates from the observed requests, and per-slot primal/dual
// updates followed by greedy rounding.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "simcache/cost.hpp"
#include "simcache/hibsa.hpp"
#include "simcache/matrix.hpp"
#include "simcache/model.hpp"

namespace simcache {

/// Which (request, content) entries an observed request instance updates.
/// kAllContents adds the derivative terms of every content for each observed
/// request, which is unbiased for every entry. kDeliveredOnly touches only the
/// delivered content and is unbiased for those entries alone.
enum class EstimatorSupport { kAllContents, kDeliveredOnly };

struct OnlineConfig {
  double slot_length = 1.0;  // T
  double eta_x = 1e-3;
  double eta_q = 1e-4;
  double eta_mu = 1.0;
  long num_slots = 5'000;
  std::uint64_t seed = 0;
  long delay_window = 10;
  EstimatorSupport support = EstimatorSupport::kAllContents;
  DualPerturbation perturbation = DualPerturbation::kShrink;
};

/// One independent Poisson stream per request, derived from a single seed,
/// so adding requests leaves the draws of existing ones unchanged.
class RequestStreams {
 public:
  RequestStreams(std::uint64_t seed, std::size_t num_requests);
  std::mt19937_64& stream(RequestId r) { return streams_.at(r); }

 private:
  std::vector<std::mt19937_64> streams_;
};

/// Seeded generator for an auxiliary purpose, independent of request streams.
std::mt19937_64 auxiliary_stream(std::uint64_t seed, std::uint64_t tag);

/// Request instances of one slot: Poisson(lambda_r T) copies of each r, in
/// request-index order.
std::vector<RequestId> draw_slot_requests(const Scenario& s, double slot_length,
                                          RequestStreams& streams);

/// Content delivered for r: the largest fractional q among contents
/// available under the rounded caches.
ContentId serve_request(const Scenario& s, const Matrix& x_rounded, const Matrix& q, RequestId r);

struct ServedRequest {
  RequestId request = 0;
  ContentId delivered = 0;
  double delay = 0.0;
  double dissimilarity = 0.0;
};

struct StochasticGradient {
  Matrix x;
  Matrix q;
  Matrix mu;
};

StochasticGradient stochastic_gradients(const Scenario& s, const PrimalState& st,
                                        const DualState& dual,
                                        std::span<const ServedRequest> served, double slot_length,
                                        EstimatorSupport support = EstimatorSupport::kAllContents);

/// Per-slot metrics shared by the online scheme and the per-cache baseline.
struct SlotRecord {
  long t = 0;
  long num_requests = 0;
  // Expected delay / dissimilarity (rate-weighted sums over requests) of the
  // decisions used for serving in this slot, and their trailing-window means.
  double expected_delay = 0.0;
  double expected_dissimilarity = 0.0;
  double avg_delay_window = 0.0;
  double dissimilarity_window = 0.0;
  // Realized delay per unit time, trailing-window mean.
  double realized_delay_window = 0.0;
  double lagrangian_estimate = 0.0;
  long cache_churn = 0;
};

struct SlotOutcome {
  SlotRecord record;
  std::vector<ServedRequest> served;
  PrimalState rounded;  // caches and one-hot deliveries used in this slot
};

struct OnlineResult {
  std::vector<SlotOutcome> slots;
  PrimalState state;
  DualState dual;
  PrimalState rounded;  // decisions for the slot after the last one
};

OnlineResult run_online(const Scenario& s, const OnlineConfig& cfg);

/// Trailing-window averaging of per-slot values.
class WindowMean {
 public:
  explicit WindowMean(long width) : width_(width > 0 ? width : 1) {}
  double push(double v);

 private:
  long width_;
  std::vector<double> values_;
  std::size_t next_ = 0;
  double sum_ = 0.0;
};

/// Columns: t, num_requests, avg_delay_window, dissimilarity_window,
/// lagrangian_estimate, cache_churn, realized_delay_window, and
/// offline_reference when given.
void write_slot_log_csv(std::ostream& out, std::span<const SlotRecord> records,
                        std::optional<double> offline_reference = std::nullopt);

std::vector<SlotRecord> slot_records(std::span<const SlotOutcome> slots);

}  // namespace simcache
