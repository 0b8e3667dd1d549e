#pragma once

// Comparison schemes: adaptive caching (placement only, requested content
// always delivered) and a per-cache most-similar delivery scheme with q-LRU
// style insertion, labelled "per-cache (simplified)" in outputs.

#include <cstdint>
#include <optional>
#include <vector>

#include "simcache/hibsa.hpp"
#include "simcache/model.hpp"
#include "simcache/online.hpp"

namespace simcache {

/// solve_offline with Q pinned to the requested content; only X moves.
OfflineResult solve_adaptive_caching(const Scenario& s, SolverConfig cfg);

struct PerCacheConfig {
  double insert_prob = 0.5;  // q0
  long num_slots = 5'000;
  std::uint64_t seed = 0;
  double slot_length = 1.0;
  long delay_window = 10;
};

/// LRU-ordered contents at one ingress node, most recent first.
class LruCache {
 public:
  explicit LruCache(long capacity) : capacity_(capacity > 0 ? capacity : 0) {}

  const std::vector<ContentId>& contents() const noexcept { return order_; }
  bool contains(ContentId f) const;
  void touch(ContentId f);
  /// Inserts (or refreshes) f at the front, evicting the LRU entry if full.
  void insert(ContentId f);

 private:
  std::size_t capacity_;
  std::vector<ContentId> order_;
};

struct PerCacheResult {
  std::vector<SlotRecord> slots;
  std::vector<ServedRequest> last_slot;
  std::vector<LruCache> caches;  // indexed by node
};

/// Content the ingress node of r delivers: the most similar one among its
/// cache and its permanently stored contents, or nullopt when both are
/// empty (the request is then fetched from the source).
std::optional<ContentId> per_cache_delivery(const Scenario& s, const LruCache& cache, RequestId r);

PerCacheResult run_per_cache_baseline(const Scenario& s, const PerCacheConfig& cfg);

}  // namespace simcache
