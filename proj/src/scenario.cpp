#include "simcache/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace simcache {

std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::kGrid: return "grid";
    case Topology::kTorus: return "torus";
    case Topology::kLine: return "line";
  }
  return "unknown";
}

Topology parse_topology(std::string_view name) {
  if (name == "grid") return Topology::kGrid;
  if (name == "torus") return Topology::kTorus;
  if (name == "line") return Topology::kLine;
  throw std::invalid_argument("unknown topology '" + std::string(name) + "'");
}

namespace {

long node_count(Topology t, long side) { return t == Topology::kLine ? side : side * side; }

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void check_gen_config(const GenConfig& g) {
  require(g.nodes_side >= 1, "nodes_side", "must be >= 1");
  require(g.topology != Topology::kTorus || g.nodes_side >= 3, "nodes_side",
          "torus needs a side of at least 3");
  require(g.num_contents >= 1, "num_contents", "must be >= 1");
  require(g.num_requests >= 1, "num_requests", "must be >= 1");
  require(g.num_origins >= 1, "num_origins", "must be >= 1");
  require(g.num_origins <= node_count(g.topology, g.nodes_side), "num_origins",
          "exceeds the number of nodes");
  require(g.capacity >= 0, "capacity", "must be >= 0");
  require(g.beta >= 0.0 && std::isfinite(g.beta), "beta", "must be >= 0");
  require(g.rho >= 0.0 && std::isfinite(g.rho), "rho", "must be >= 0");
  require(g.alpha >= 0.0 && std::isfinite(g.alpha), "alpha", "must be >= 0");
  require(g.delay_min > 0.0 && g.delay_max >= g.delay_min, "delay_min",
          "need 0 < delay_min <= delay_max");
}

std::vector<Edge> topology_edges(Topology t, long side) {
  std::vector<Edge> edges;
  auto id = [side](long row, long col) { return static_cast<NodeId>(row * side + col); };
  switch (t) {
    case Topology::kLine:
      for (long i = 0; i + 1 < side; ++i)
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 0.0});
      break;
    case Topology::kGrid:
      for (long r = 0; r < side; ++r) {
        for (long c = 0; c < side; ++c) {
          if (c + 1 < side) edges.push_back({id(r, c), id(r, c + 1), 0.0});
          if (r + 1 < side) edges.push_back({id(r, c), id(r + 1, c), 0.0});
        }
      }
      break;
    case Topology::kTorus:
      for (long r = 0; r < side; ++r) {
        for (long c = 0; c < side; ++c) {
          edges.push_back({id(r, c), id(r, (c + 1) % side), 0.0});
          edges.push_back({id(r, c), id((r + 1) % side, c), 0.0});
        }
      }
      break;
  }
  return edges;
}

std::vector<double> zipf_probabilities(std::size_t n, double rho) {
  std::vector<double> p(n);
  for (std::size_t f = 0; f < n; ++f) p[f] = std::pow(static_cast<double>(f + 1), -rho);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

Path shortest_path(const Network& net, NodeId from, NodeId to) {
  const std::size_t n = net.num_nodes();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::vector<NodeId>> route(n);
  std::vector<bool> done(n, false);

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[from] = 0.0;
  route[from] = {from};
  frontier.push({0.0, from});
  while (!frontier.empty()) {
    auto [d, u] = frontier.top();
    frontier.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == to) break;
    for (NodeId w : net.neighbors(u)) {
      if (done[w]) continue;
      const double nd = d + net.delay(u, w);
      std::vector<NodeId> candidate = route[u];
      candidate.push_back(w);
      if (nd < dist[w] || (nd == dist[w] && candidate < route[w])) {
        dist[w] = nd;
        route[w] = std::move(candidate);
        frontier.push({nd, w});
      }
    }
  }
  return Path{route[to]};
}

Scenario generate_scenario(const GenConfig& g, std::mt19937_64& rng) {
  check_gen_config(g);
  const auto num_nodes = static_cast<std::size_t>(node_count(g.topology, g.nodes_side));
  const auto num_contents = static_cast<std::size_t>(g.num_contents);

  std::vector<std::string> node_names;
  for (std::size_t v = 0; v < num_nodes; ++v) node_names.push_back("v" + std::to_string(v));

  std::vector<Edge> edges = topology_edges(g.topology, g.nodes_side);
  std::uniform_real_distribution<double> delay_dist(g.delay_min, g.delay_max);
  for (Edge& e : edges) e.delay = delay_dist(rng);

  Scenario s;
  for (std::size_t f = 0; f < num_contents; ++f) s.catalog.names.push_back("f" + std::to_string(f + 1));
  s.network = Network(std::move(node_names), std::move(edges));

  std::uniform_int_distribution<NodeId> node_dist(0, num_nodes - 1);
  s.sources.nodes.resize(num_contents);
  for (auto& src : s.sources.nodes) src = {node_dist(rng)};

  std::vector<NodeId> all(num_nodes);
  std::iota(all.begin(), all.end(), NodeId{0});
  std::vector<NodeId> origins;
  std::sample(all.begin(), all.end(), std::back_inserter(origins),
              static_cast<std::size_t>(g.num_origins), rng);

  const auto weights = zipf_probabilities(num_contents, g.rho);
  std::discrete_distribution<ContentId> content_dist(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> origin_dist(0, origins.size() - 1);
  bool any_multi_hop = false;
  for (long i = 0; i < g.num_requests; ++i) {
    const ContentId f = content_dist(rng);
    const NodeId origin = origins[origin_dist(rng)];
    Request req{f, shortest_path(s.network, origin, s.sources.nodes[f].front()), 1.0};
    any_multi_hop = any_multi_hop || req.path.size() > 1;
    s.requests.push_back(std::move(req));
  }
  if (!any_multi_hop) {
    throw std::invalid_argument("num_requests: every request starts at its source");
  }

  s.dissimilarity = DissimilarityMatrix::power_law(num_contents, g.beta);
  s.capacities.assign(num_nodes, g.capacity);
  s.alpha = g.alpha;
  return s;
}

Scenario generate_scenario(const GenConfig& g) {
  std::mt19937_64 rng(g.seed);
  return generate_scenario(g, rng);
}

}  // namespace simcache
