#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>

#include "simcache/scenario.hpp"
#include "support.hpp"

using namespace simcache;

namespace {

double path_delay(const Network& net, const std::vector<NodeId>& p) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) total += net.delay(p[k], p[k + 1]);
  return total;
}

// Every simple path from `from` whose prefix is never longer than the best
// prefix seen at the same node; keeps all minimum-delay paths per target.
std::vector<std::vector<std::vector<NodeId>>> all_shortest_paths(const Network& net, NodeId from) {
  const std::size_t n = net.num_nodes();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::vector<std::vector<NodeId>>> paths(n);
  std::vector<NodeId> stack{from};
  std::vector<bool> on(n, false);
  on[from] = true;
  std::function<void(double)> walk = [&](double len) {
    const NodeId u = stack.back();
    if (len > best[u] + 1e-9) return;
    if (len < best[u] - 1e-9) {
      best[u] = len;
      paths[u].clear();
    }
    paths[u].push_back(stack);
    for (NodeId w : net.neighbors(u)) {
      if (on[w]) continue;
      on[w] = true;
      stack.push_back(w);
      walk(len + net.delay(u, w));
      stack.pop_back();
      on[w] = false;
    }
  };
  walk(0.0);
  // Entries recorded before a strictly shorter path appeared were cleared,
  // but later equal-length pushes may follow longer ones; filter again.
  for (NodeId t = 0; t < n; ++t) {
    std::erase_if(paths[t], [&](const auto& p) { return path_delay(net, p) > best[t] + 1e-9; });
  }
  return paths;
}

Scenario round_trip(const Scenario& s) { return scenario_from_string(scenario_to_string(s)); }

ScenarioError::Kind error_kind(const std::string& text, std::string* key = nullptr) {
  try {
    scenario_from_string(text);
  } catch (const ScenarioError& e) {
    if (key) *key = e.key();
    return e.kind();
  }
  FAIL("no error raised");
  return ScenarioError::Kind::kIo;
}

const char* kTinyJson = R"({
  "nodes": ["a", "b"],
  "contents": ["x", "y", "z"],
  "edges": [{"u": "a", "v": "b", "delay": 1.5}],
  "sources": {"x": ["b"], "y": ["b"], "z": ["b"]},
  "capacities": {"a": 1, "b": 0},
  "requests": [{"content": "x", "path": ["a", "b"], "rate": 1}],
  "dissimilarity": {"power_law": {"beta": 3}},
  "alpha": 2.5
})";

}  // namespace

TEST_CASE("default generation") {
  const Scenario s = generate_scenario(GenConfig{});
  CHECK(s.num_nodes() == 25);
  CHECK(s.num_contents() == 10);
  CHECK(s.num_requests() == 40);
  CHECK(s.network.edges().size() == 40);
  CHECK(s.alpha == 10.0);
  std::set<NodeId> origins;
  for (const Request& r : s.requests) {
    CHECK(r.rate == 1.0);
    origins.insert(r.path.ingress());
  }
  CHECK(origins.size() <= 12);
  for (long c : s.capacities) CHECK(c == 2);
  for (ContentId f = 0; f < s.num_contents(); ++f) CHECK(s.sources.nodes[f].size() == 1);
  for (const Edge& e : s.network.edges()) CHECK((e.delay >= 1.0 && e.delay <= 10.0));
  CHECK(s.dissimilarity(0, 1) == 1.0);
  CHECK(s.dissimilarity(1, 4) == 27.0);
}

TEST_CASE("topology edge counts") {
  CHECK(topology_edges(Topology::kGrid, 5).size() == 40);
  CHECK(topology_edges(Topology::kTorus, 5).size() == 50);
  CHECK(topology_edges(Topology::kLine, 4).size() == 3);
  CHECK(parse_topology("torus") == Topology::kTorus);
  CHECK_THROWS_AS(parse_topology("ring"), std::invalid_argument);
}

TEST_CASE("generation is deterministic in the seed") {
  GenConfig g;
  g.seed = 42;
  CHECK(scenario_to_string(generate_scenario(g)) == scenario_to_string(generate_scenario(g)));
  GenConfig h = g;
  h.seed = 43;
  CHECK(scenario_to_string(generate_scenario(g)) != scenario_to_string(generate_scenario(h)));
}

TEST_CASE("a thousand seeded generations validate") {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GenConfig g;
    g.seed = seed;
    g.rho = seed % 2 ? 0.6 : 1.2;
    g.topology = seed % 3 == 0 ? Topology::kTorus : Topology::kGrid;
    const Scenario s = generate_scenario(g);
    failures += validate_scenario(s).empty() ? 0 : 1;
  }
  CHECK(failures == 0);
}

TEST_CASE("shortest paths match exhaustive search on the grid") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    GenConfig g;
    g.seed = seed;
    const Scenario s = generate_scenario(g);
    const Network& net = s.network;
    for (NodeId from = 0; from < net.num_nodes(); ++from) {
      const auto exhaustive = all_shortest_paths(net, from);
      for (NodeId to = 0; to < net.num_nodes(); ++to) {
        const Path p = shortest_path(net, from, to);
        REQUIRE(!exhaustive[to].empty());
        CHECK(p.ingress() == from);
        CHECK(p.terminal() == to);
        CHECK(std::abs(path_delay(net, p.nodes) - path_delay(net, exhaustive[to].front())) <=
              1e-9);
      }
    }
  }
}

TEST_CASE("equal-delay ties resolve to the lexicographically smallest path") {
  auto edges = topology_edges(Topology::kGrid, 4);
  for (Edge& e : edges) e.delay = 1.0;
  std::vector<std::string> names;
  for (int v = 0; v < 16; ++v) names.push_back("v" + std::to_string(v));
  const Network net(names, edges);
  for (NodeId from = 0; from < 16; ++from) {
    const auto exhaustive = all_shortest_paths(net, from);
    for (NodeId to = 0; to < 16; ++to) {
      const auto smallest = *std::min_element(exhaustive[to].begin(), exhaustive[to].end());
      CHECK(shortest_path(net, from, to).nodes == smallest);
    }
  }
}

TEST_CASE("request contents follow the Zipf law") {
  // Chi-square with 9 degrees of freedom; 21.666 is the 1% critical value.
  for (double rho : {0.6, 1.2}) {
    const auto probs = zipf_probabilities(10, rho);
    std::vector<double> counts(10, 0.0);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 250; ++seed) {
      GenConfig g;
      g.rho = rho;
      g.seed = seed;
      for (const Request& r : generate_scenario(g).requests) {
        counts[r.content] += 1.0;
        total += 1.0;
      }
    }
    double chi2 = 0.0;
    for (std::size_t f = 0; f < 10; ++f) {
      const double expected = total * probs[f];
      chi2 += (counts[f] - expected) * (counts[f] - expected) / expected;
    }
    INFO("rho = " << rho << ", chi2 = " << chi2);
    CHECK(chi2 < 21.666);
  }
}

TEST_CASE("zero exponent gives uniform popularity") {
  std::vector<double> counts(10, 0.0);
  const int seeds = 400;
  for (int seed = 0; seed < seeds; ++seed) {
    GenConfig g;
    g.rho = 0.0;
    g.seed = static_cast<std::uint64_t>(seed);
    for (const Request& r : generate_scenario(g).requests) counts[r.content] += 1.0;
  }
  // Per scenario each content count is Binomial(40, 0.1): mean 4, var 3.6.
  const double se = std::sqrt(3.6 / seeds);
  for (double c : counts) CHECK(std::abs(c / seeds - 4.0) <= 3.0 * se);
  const auto p = zipf_probabilities(4, 0.0);
  for (double v : p) CHECK(v == 0.25);
}

TEST_CASE("config checks") {
  GenConfig g;
  g.rho = -0.1;
  CHECK_THROWS_AS(check_gen_config(g), std::invalid_argument);
  g = GenConfig{};
  g.num_origins = 26;
  CHECK_THROWS_AS(check_gen_config(g), std::invalid_argument);
  g = GenConfig{};
  g.capacity = -1;
  CHECK_THROWS_AS(check_gen_config(g), std::invalid_argument);
  CHECK_NOTHROW(check_gen_config(GenConfig{}));
}

TEST_CASE("scenario round trip is exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig g;
    g.seed = seed;
    const Scenario s = generate_scenario(g);
    const Scenario back = round_trip(s);
    CHECK(scenario_to_string(back) == scenario_to_string(s));
    REQUIRE(back.network.edges().size() == s.network.edges().size());
    for (std::size_t i = 0; i < s.network.edges().size(); ++i)
      CHECK(back.network.edges()[i].delay == s.network.edges()[i].delay);
    CHECK(back.dissimilarity.values() == s.dissimilarity.values());
    CHECK(back.alpha == s.alpha);
    CHECK(back.capacities == s.capacities);
    for (RequestId r = 0; r < s.num_requests(); ++r) {
      CHECK(back.requests[r].path == s.requests[r].path);
      CHECK(back.requests[r].content == s.requests[r].content);
      CHECK(back.requests[r].rate == s.requests[r].rate);
    }
  }
}

TEST_CASE("scenario file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "simcache_test_scenario.json";
  const Scenario s = generate_scenario(GenConfig{});
  save_scenario(s, path);
  CHECK(scenario_to_string(load_scenario(path)) == scenario_to_string(s));
  std::filesystem::remove(path);
  try {
    load_scenario(path);
    FAIL("expected an error");
  } catch (const ScenarioError& e) {
    CHECK(e.kind() == ScenarioError::Kind::kIo);
  }
}

TEST_CASE("power-law dissimilarity is expanded on load") {
  const Scenario s = scenario_from_string(kTinyJson);
  CHECK(s.alpha == 2.5);
  CHECK(s.dissimilarity(0, 2) == 8.0);
  CHECK(s.network.delay(0, 1) == 1.5);
  CHECK(validate_scenario(s).empty());
  CHECK(scenario_to_string(round_trip(s)) == scenario_to_string(s));
}

TEST_CASE("parse errors name the offending key") {
  std::string text = kTinyJson;
  const auto at = text.find(",\n  \"alpha\": 2.5");
  std::string key;
  CHECK(error_kind(text.substr(0, at) + "\n}", &key) == ScenarioError::Kind::kMissingField);
  CHECK(key == "alpha");

  std::string unknown = kTinyJson;
  unknown.replace(unknown.find("\"content\": \"x\""), 14, "\"content\": \"w\"");
  CHECK(error_kind(unknown) == ScenarioError::Kind::kUnknownName);

  CHECK(error_kind("{ not json") == ScenarioError::Kind::kParse);

  std::string bad = kTinyJson;
  bad.replace(bad.find("\"alpha\": 2.5"), 12, "\"alpha\": \"high\"");
  CHECK(error_kind(bad) == ScenarioError::Kind::kInvalidValue);
}

TEST_CASE("terminal-excluding availability flag survives a round trip") {
  Scenario s = scenario_from_string(kTinyJson);
  CHECK_FALSE(s.availability_excludes_terminal);
  s.availability_excludes_terminal = true;
  CHECK(round_trip(s).availability_excludes_terminal);
}

TEST_CASE("generation config round trip") {
  GenConfig g;
  g.topology = Topology::kTorus;
  g.rho = 0.6;
  g.seed = 99;
  const GenConfig back = gen_config_from_string(gen_config_to_string(g));
  CHECK(gen_config_to_string(back) == gen_config_to_string(g));
  const GenConfig partial = gen_config_from_string(R"({"rho": 0.6})");
  CHECK(partial.rho == 0.6);
  CHECK(partial.num_requests == 40);
}
