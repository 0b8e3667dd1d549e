#pragma once

// Problem-instance types for a multi-hop caching network with
// similarity-based delivery. Ids are dense zero-based indices; names are
// only carried for (de)serialization.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simcache/matrix.hpp"

namespace simcache {

using NodeId = std::size_t;
using ContentId = std::size_t;
using RequestId = std::size_t;

struct Catalog {
  std::vector<std::string> names;

  std::size_t size() const noexcept { return names.size(); }
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double delay = 0.0;  // tau_uv, used for both directions
};

/// Undirected network with per-edge delivery delay. Construction never
/// throws; malformed edges are kept for validate_scenario to report but are
/// left out of the adjacency index.
class Network {
 public:
  Network() = default;
  Network(std::vector<std::string> node_names, std::vector<Edge> edges);

  std::size_t num_nodes() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId v) const { return names_.at(v); }
  std::optional<NodeId> find(std::string_view name) const;

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool adjacent(NodeId u, NodeId v) const noexcept;
  /// tau_uv; NaN when (u, v) is not an edge.
  double delay(NodeId u, NodeId v) const noexcept;
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }
  bool connected() const;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  Matrix delay_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// S_f per content.
struct SourceMap {
  std::vector<std::vector<NodeId>> nodes;

  bool stores(NodeId v, ContentId f) const noexcept;
};

struct Path {
  std::vector<NodeId> nodes;

  std::size_t size() const noexcept { return nodes.size(); }
  NodeId ingress() const { return nodes.front(); }
  NodeId terminal() const { return nodes.back(); }
  bool operator==(const Path&) const = default;
};

struct Request {
  ContentId content = 0;
  Path path;
  double rate = 0.0;  // lambda, requests per second
};

class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  explicit DissimilarityMatrix(Matrix values) : values_(std::move(values)) {}

  /// d(f, g) = |f - g|^beta.
  static DissimilarityMatrix power_law(std::size_t num_contents, double beta);

  double operator()(ContentId f, ContentId g) const noexcept { return values_(f, g); }
  std::size_t size() const noexcept { return values_.rows(); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

struct Scenario {
  Catalog catalog;
  Network network;
  SourceMap sources;
  std::vector<Request> requests;
  DissimilarityMatrix dissimilarity;
  std::vector<long> capacities;  // C_v per node
  double alpha = 0.0;
  // Restricts the availability product to p_1..p_{|p|-1} for contents other
  // than the requested one (which the terminal source always serves). The
  // default (false) includes the terminal node for every content.
  bool availability_excludes_terminal = false;

  std::size_t num_nodes() const noexcept { return network.num_nodes(); }
  std::size_t num_contents() const noexcept { return catalog.size(); }
  std::size_t num_requests() const noexcept { return requests.size(); }
  bool pinned(NodeId v, ContentId f) const noexcept { return sources.stores(v, f); }
  /// Number of leading path positions entering the availability product of
  /// content g for request r.
  std::size_t availability_span(RequestId r, ContentId g) const noexcept;
};

/// 1-based position of v in p, or nullopt when v is not on p.
std::optional<std::size_t> position_in_path(NodeId v, const Path& p);

enum class ViolationKind {
  EmptyCatalog,
  EdgeEndpointUndeclared,
  SelfLoopEdge,
  DuplicateEdge,
  NonpositiveDelay,
  Disconnected,
  SourceMapShape,
  EmptySourceSet,
  SourceNodeUndeclared,
  RequestContentUnknown,
  EmptyPath,
  PathNodeUndeclared,
  CyclicPath,
  PathHopNotEdge,
  TerminalNotSource,
  NegativeRate,
  DissimilarityShape,
  NonzeroSelfDissimilarity,
  NegativeDissimilarity,
  CapacityShape,
  NegativeCapacity,
  NegativeAlpha,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

/// Empty iff every structural invariant of the instance holds.
std::vector<Violation> validate_scenario(const Scenario& s);

}  // namespace simcache
