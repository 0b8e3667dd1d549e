#pragma once

// Synthetic instance generation (grid / torus / line topologies, uniform
// link delays, Zipf request popularity, shortest-path forwarding,
// power-law dissimilarity) and the JSON scenario file format.

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "simcache/model.hpp"

namespace simcache {

enum class Topology { kGrid, kTorus, kLine };

std::string_view to_string(Topology t);
/// Throws std::invalid_argument on unknown names.
Topology parse_topology(std::string_view name);

struct GenConfig {
  long nodes_side = 5;  // side of the grid/torus, or node count for a line
  Topology topology = Topology::kGrid;
  long num_contents = 10;
  long num_requests = 40;
  long num_origins = 12;
  long capacity = 2;
  double beta = 3.0;
  double rho = 1.2;
  double alpha = 10.0;
  double delay_min = 1.0;
  double delay_max = 10.0;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument naming the first bad field.
void check_gen_config(const GenConfig& g);

/// Edges of the topology with zero delay, in generation order.
std::vector<Edge> topology_edges(Topology t, long side);

/// P(rank f) proportional to f^{-rho}, f = 1..n, normalized.
std::vector<double> zipf_probabilities(std::size_t n, double rho);

/// Minimum total-delay path from `from` to `to`; among equal-delay paths the
/// lexicographically smallest node sequence.
Path shortest_path(const Network& net, NodeId from, NodeId to);

Scenario generate_scenario(const GenConfig& g, std::mt19937_64& rng);
/// Seeds the generator from g.seed.
Scenario generate_scenario(const GenConfig& g);

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { kIo, kParse, kMissingField, kInvalidValue, kUnknownName };

  ScenarioError(Kind kind, std::string key, const std::string& message)
      : std::runtime_error(message), kind_(kind), key_(std::move(key)) {}

  Kind kind() const noexcept { return kind_; }
  /// JSON key (dotted path) the error refers to; empty for I/O errors.
  const std::string& key() const noexcept { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

std::string scenario_to_string(const Scenario& s);
Scenario scenario_from_string(std::string_view text);
void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

std::string gen_config_to_string(const GenConfig& g);
/// Missing keys keep their defaults.
GenConfig gen_config_from_string(std::string_view text);

}  // namespace simcache
