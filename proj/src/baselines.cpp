#include "simcache/baselines.hpp"

#include <algorithm>

namespace simcache {

namespace {

constexpr std::uint64_t kInsertStreamTag = 7;

double full_path_delay(const Scenario& s, RequestId r) {
  const auto& nodes = s.requests[r].path.nodes;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) total += s.network.delay(nodes[k + 1], nodes[k]);
  return total;
}

}  // namespace

OfflineResult solve_adaptive_caching(const Scenario& s, SolverConfig cfg) {
  cfg.optimize_delivery = false;
  return solve_offline(s, cfg);
}

bool LruCache::contains(ContentId f) const {
  return std::find(order_.begin(), order_.end(), f) != order_.end();
}

void LruCache::touch(ContentId f) {
  auto it = std::find(order_.begin(), order_.end(), f);
  if (it != order_.end()) std::rotate(order_.begin(), it, it + 1);
}

void LruCache::insert(ContentId f) {
  if (capacity_ == 0) return;
  if (contains(f)) {
    touch(f);
    return;
  }
  if (order_.size() == capacity_) order_.pop_back();
  order_.insert(order_.begin(), f);
}

std::optional<ContentId> per_cache_delivery(const Scenario& s, const LruCache& cache, RequestId r) {
  const Request& req = s.requests[r];
  const NodeId ingress = req.path.ingress();
  std::optional<ContentId> best;
  double best_d = 0.0;
  for (ContentId g = 0; g < s.num_contents(); ++g) {
    if (!cache.contains(g) && !s.pinned(ingress, g)) continue;
    const double d = s.dissimilarity(req.content, g);
    if (!best || d < best_d) {
      best = g;
      best_d = d;
    }
  }
  return best;
}

PerCacheResult run_per_cache_baseline(const Scenario& s, const PerCacheConfig& cfg) {
  PerCacheResult out;
  for (NodeId v = 0; v < s.num_nodes(); ++v) out.caches.emplace_back(s.capacities[v]);
  RequestStreams streams(cfg.seed, s.num_requests());
  std::mt19937_64 insert_rng = auxiliary_stream(cfg.seed, kInsertStreamTag);
  std::bernoulli_distribution insert(std::clamp(cfg.insert_prob, 0.0, 1.0));
  WindowMean delay_window(cfg.delay_window);
  WindowMean dissim_window(cfg.delay_window);
  WindowMean realized_window(cfg.delay_window);

  for (long t = 1; t <= cfg.num_slots; ++t) {
    SlotRecord rec;
    rec.t = t;
    for (RequestId r = 0; r < s.num_requests(); ++r) {
      const auto g = per_cache_delivery(s, out.caches[s.requests[r].path.ingress()], r);
      const double rate = s.requests[r].rate;
      if (g) {
        rec.expected_dissimilarity += rate * s.dissimilarity(s.requests[r].content, *g);
      } else {
        rec.expected_delay += rate * full_path_delay(s, r);
      }
    }

    const auto arrivals = draw_slot_requests(s, cfg.slot_length, streams);
    std::vector<ServedRequest> served;
    double realized_delay = 0.0;
    double realized_cost = 0.0;
    long churn = 0;
    for (RequestId r : arrivals) {
      const Request& req = s.requests[r];
      LruCache& cache = out.caches[req.path.ingress()];
      ServedRequest sr{r, req.content, 0.0, 0.0};
      if (const auto g = per_cache_delivery(s, cache, r)) {
        sr.delivered = *g;
        sr.dissimilarity = s.dissimilarity(req.content, *g);
        cache.touch(*g);
      } else {
        sr.delay = full_path_delay(s, r);
      }
      realized_delay += sr.delay;
      realized_cost += sr.delay + s.alpha * sr.dissimilarity;
      served.push_back(sr);
      if (insert(insert_rng) && !cache.contains(req.content) &&
          !s.pinned(req.path.ingress(), req.content) && s.capacities[req.path.ingress()] > 0) {
        cache.insert(req.content);
        ++churn;
      }
    }

    rec.num_requests = static_cast<long>(arrivals.size());
    rec.avg_delay_window = delay_window.push(rec.expected_delay);
    rec.dissimilarity_window = dissim_window.push(rec.expected_dissimilarity);
    rec.realized_delay_window = realized_window.push(realized_delay / cfg.slot_length);
    rec.lagrangian_estimate = realized_cost / cfg.slot_length;
    rec.cache_churn = churn;
    out.slots.push_back(rec);
    out.last_slot = std::move(served);
  }
  return out;
}

}  // namespace simcache
