#include "simcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace simcache {

namespace {

constexpr double kNoEdge = std::numeric_limits<double>::quiet_NaN();

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace

Network::Network(std::vector<std::string> node_names, std::vector<Edge> edges)
    : names_(std::move(node_names)),
      edges_(std::move(edges)),
      delay_(names_.size(), names_.size(), kNoEdge),
      adjacency_(names_.size()) {
  const std::size_t n = names_.size();
  for (const Edge& e : edges_) {
    if (e.u >= n || e.v >= n || e.u == e.v) continue;
    if (std::isnan(delay_(e.u, e.v))) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    delay_(e.u, e.v) = e.delay;
    delay_(e.v, e.u) = e.delay;
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::optional<NodeId> Network::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeId>(it - names_.begin());
}

bool Network::adjacent(NodeId u, NodeId v) const noexcept {
  return u < num_nodes() && v < num_nodes() && !std::isnan(delay_(u, v));
}

double Network::delay(NodeId u, NodeId v) const noexcept {
  if (u >= num_nodes() || v >= num_nodes()) return kNoEdge;
  return delay_(u, v);
}

bool Network::connected() const {
  const std::size_t n = num_nodes();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n;
}

bool SourceMap::stores(NodeId v, ContentId f) const noexcept {
  if (f >= nodes.size()) return false;
  const auto& s = nodes[f];
  return std::find(s.begin(), s.end(), v) != s.end();
}

DissimilarityMatrix DissimilarityMatrix::power_law(std::size_t num_contents, double beta) {
  Matrix d(num_contents, num_contents);
  for (std::size_t f = 0; f < num_contents; ++f) {
    for (std::size_t g = 0; g < num_contents; ++g) {
      const double gap = std::abs(static_cast<double>(f) - static_cast<double>(g));
      d(f, g) = f == g ? 0.0 : std::pow(gap, beta);
    }
  }
  return DissimilarityMatrix(std::move(d));
}

std::size_t Scenario::availability_span(RequestId r, ContentId g) const noexcept {
  const Request& req = requests[r];
  const std::size_t len = req.path.size();
  if (availability_excludes_terminal && g != req.content && len > 0) return len - 1;
  return len;
}

std::optional<std::size_t> position_in_path(NodeId v, const Path& p) {
  auto it = std::find(p.nodes.begin(), p.nodes.end(), v);
  if (it == p.nodes.end()) return std::nullopt;
  return static_cast<std::size_t>(it - p.nodes.begin()) + 1;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyCatalog: return "EmptyCatalog";
    case ViolationKind::EdgeEndpointUndeclared: return "EdgeEndpointUndeclared";
    case ViolationKind::SelfLoopEdge: return "SelfLoopEdge";
    case ViolationKind::DuplicateEdge: return "DuplicateEdge";
    case ViolationKind::NonpositiveDelay: return "NonpositiveDelay";
    case ViolationKind::Disconnected: return "Disconnected";
    case ViolationKind::SourceMapShape: return "SourceMapShape";
    case ViolationKind::EmptySourceSet: return "EmptySourceSet";
    case ViolationKind::SourceNodeUndeclared: return "SourceNodeUndeclared";
    case ViolationKind::RequestContentUnknown: return "RequestContentUnknown";
    case ViolationKind::EmptyPath: return "EmptyPath";
    case ViolationKind::PathNodeUndeclared: return "PathNodeUndeclared";
    case ViolationKind::CyclicPath: return "CyclicPath";
    case ViolationKind::PathHopNotEdge: return "PathHopNotEdge";
    case ViolationKind::TerminalNotSource: return "TerminalNotSource";
    case ViolationKind::NegativeRate: return "NegativeRate";
    case ViolationKind::DissimilarityShape: return "DissimilarityShape";
    case ViolationKind::NonzeroSelfDissimilarity: return "NonzeroSelfDissimilarity";
    case ViolationKind::NegativeDissimilarity: return "NegativeDissimilarity";
    case ViolationKind::CapacityShape: return "CapacityShape";
    case ViolationKind::NegativeCapacity: return "NegativeCapacity";
    case ViolationKind::NegativeAlpha: return "NegativeAlpha";
  }
  return "Unknown";
}

std::vector<Violation> validate_scenario(const Scenario& s) {
  std::vector<Violation> out;
  auto report = [&out](ViolationKind k, std::string detail) {
    out.push_back({k, std::move(detail)});
  };

  const std::size_t num_nodes = s.num_nodes();
  const std::size_t num_contents = s.num_contents();

  if (num_contents == 0) report(ViolationKind::EmptyCatalog, "catalog has no contents");

  std::set<std::pair<NodeId, NodeId>> seen_edges;
  bool endpoints_ok = true;
  for (std::size_t i = 0; i < s.network.edges().size(); ++i) {
    const Edge& e = s.network.edges()[i];
    if (e.u >= num_nodes || e.v >= num_nodes) {
      endpoints_ok = false;
      report(ViolationKind::EdgeEndpointUndeclared, concat("edge ", i));
      continue;
    }
    if (e.u == e.v) report(ViolationKind::SelfLoopEdge, concat("edge ", i));
    if (!(e.delay > 0.0) || !std::isfinite(e.delay))
      report(ViolationKind::NonpositiveDelay, concat("edge ", i, " delay ", e.delay));
    auto key = std::minmax(e.u, e.v);
    if (!seen_edges.insert(key).second) report(ViolationKind::DuplicateEdge, concat("edge ", i));
  }
  if (endpoints_ok && !s.network.connected())
    report(ViolationKind::Disconnected, "network is not connected");

  if (s.sources.nodes.size() != num_contents) {
    report(ViolationKind::SourceMapShape,
           concat("source map covers ", s.sources.nodes.size(), " of ", num_contents, " contents"));
  }
  for (std::size_t f = 0; f < s.sources.nodes.size(); ++f) {
    if (s.sources.nodes[f].empty())
      report(ViolationKind::EmptySourceSet, concat("content ", f));
    for (NodeId v : s.sources.nodes[f]) {
      if (v >= num_nodes) report(ViolationKind::SourceNodeUndeclared, concat("content ", f));
    }
  }

  for (std::size_t r = 0; r < s.requests.size(); ++r) {
    const Request& req = s.requests[r];
    if (req.content >= num_contents)
      report(ViolationKind::RequestContentUnknown, concat("request ", r));
    if (!(req.rate >= 0.0) || !std::isfinite(req.rate))
      report(ViolationKind::NegativeRate, concat("request ", r));
    const auto& nodes = req.path.nodes;
    if (nodes.empty()) {
      report(ViolationKind::EmptyPath, concat("request ", r));
      continue;
    }
    bool nodes_ok = true;
    for (NodeId v : nodes) {
      if (v >= num_nodes) nodes_ok = false;
    }
    if (!nodes_ok) {
      report(ViolationKind::PathNodeUndeclared, concat("request ", r));
      continue;
    }
    std::set<NodeId> distinct(nodes.begin(), nodes.end());
    if (distinct.size() != nodes.size()) report(ViolationKind::CyclicPath, concat("request ", r));
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      if (!s.network.adjacent(nodes[k], nodes[k + 1])) {
        report(ViolationKind::PathHopNotEdge, concat("request ", r, " hop ", k));
        break;
      }
    }
    if (req.content < num_contents && !s.sources.stores(nodes.back(), req.content))
      report(ViolationKind::TerminalNotSource, concat("request ", r));
  }

  const Matrix& d = s.dissimilarity.values();
  if (d.rows() != num_contents || d.cols() != num_contents) {
    report(ViolationKind::DissimilarityShape,
           concat("dissimilarity is ", d.rows(), "x", d.cols(), ", expected ", num_contents));
  } else {
    for (std::size_t f = 0; f < num_contents; ++f) {
      if (d(f, f) != 0.0) report(ViolationKind::NonzeroSelfDissimilarity, concat("content ", f));
      for (std::size_t g = 0; g < num_contents; ++g) {
        if (!(d(f, g) >= 0.0) || !std::isfinite(d(f, g)))
          report(ViolationKind::NegativeDissimilarity, concat("pair ", f, ",", g));
      }
    }
  }

  if (s.capacities.size() != num_nodes) {
    report(ViolationKind::CapacityShape,
           concat(s.capacities.size(), " capacities for ", num_nodes, " nodes"));
  }
  for (std::size_t v = 0; v < s.capacities.size(); ++v) {
    if (s.capacities[v] < 0) report(ViolationKind::NegativeCapacity, concat("node ", v));
  }

  if (!(s.alpha >= 0.0) || !std::isfinite(s.alpha))
    report(ViolationKind::NegativeAlpha, concat("alpha ", s.alpha));

  return out;
}

}  // namespace simcache
