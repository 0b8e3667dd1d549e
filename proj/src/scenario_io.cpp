#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "simcache/scenario.hpp"

namespace simcache {

using nlohmann::json;

namespace {

using Kind = ScenarioError::Kind;

[[noreturn]] void fail(Kind kind, const std::string& key, const std::string& what) {
  throw ScenarioError(kind, key, key.empty() ? what : key + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  const std::string path = where.empty() ? key : where + "." + key;
  if (!obj.is_object()) fail(Kind::kInvalidValue, where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(Kind::kMissingField, path, "missing field");
  return *it;
}

double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) fail(Kind::kInvalidValue, key, "expected a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail(Kind::kInvalidValue, key, "expected an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail(Kind::kInvalidValue, key, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& key) {
  if (!v.is_array()) fail(Kind::kInvalidValue, key, "expected an array");
  return v;
}

std::vector<std::string> string_list(const json& v, const std::string& key) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(v, key).size(); ++i)
    out.push_back(as_string(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename Lookup>
std::size_t resolve(const Lookup& lookup, const std::string& name, const std::string& key) {
  auto id = lookup(name);
  if (!id) fail(Kind::kUnknownName, key, "unknown name '" + name + "'");
  return *id;
}

json to_json(const Scenario& s) {
  const auto& nodes = s.network.names();
  const auto& contents = s.catalog.names;
  json j;
  j["nodes"] = nodes;
  j["contents"] = contents;
  json edges = json::array();
  for (const Edge& e : s.network.edges())
    edges.push_back({{"u", nodes.at(e.u)}, {"v", nodes.at(e.v)}, {"delay", e.delay}});
  j["edges"] = std::move(edges);
  json sources = json::object();
  for (std::size_t f = 0; f < s.sources.nodes.size(); ++f) {
    json list = json::array();
    for (NodeId v : s.sources.nodes[f]) list.push_back(nodes.at(v));
    sources[contents.at(f)] = std::move(list);
  }
  j["sources"] = std::move(sources);
  json caps = json::object();
  for (std::size_t v = 0; v < s.capacities.size(); ++v) caps[nodes.at(v)] = s.capacities[v];
  j["capacities"] = std::move(caps);
  json requests = json::array();
  for (const Request& r : s.requests) {
    json path = json::array();
    for (NodeId v : r.path.nodes) path.push_back(nodes.at(v));
    requests.push_back({{"content", contents.at(r.content)}, {"path", std::move(path)}, {"rate", r.rate}});
  }
  j["requests"] = std::move(requests);
  json d = json::array();
  const Matrix& dm = s.dissimilarity.values();
  for (std::size_t f = 0; f < dm.rows(); ++f) {
    auto row = dm.row(f);
    d.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["dissimilarity"] = std::move(d);
  j["alpha"] = s.alpha;
  if (s.availability_excludes_terminal) j["availability_excludes_terminal"] = true;
  return j;
}

Scenario from_json(const json& j) {
  if (!j.is_object()) fail(Kind::kInvalidValue, "", "scenario document must be an object");
  Scenario s;

  auto node_names = string_list(field(j, "nodes", ""), "nodes");
  s.catalog.names = string_list(field(j, "contents", ""), "contents");
  auto node_of = [&node_names](const std::string& n) -> std::optional<NodeId> {
    auto it = std::find(node_names.begin(), node_names.end(), n);
    if (it == node_names.end()) return std::nullopt;
    return static_cast<NodeId>(it - node_names.begin());
  };
  const auto& contents = s.catalog.names;
  auto content_of = [&contents](const std::string& n) -> std::optional<ContentId> {
    auto it = std::find(contents.begin(), contents.end(), n);
    if (it == contents.end()) return std::nullopt;
    return static_cast<ContentId>(it - contents.begin());
  };

  std::vector<Edge> edges;
  const json& je = as_array(field(j, "edges", ""), "edges");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string at = "edges[" + std::to_string(i) + "]";
    Edge e;
    e.u = resolve(node_of, as_string(field(je[i], "u", at), at + ".u"), at + ".u");
    e.v = resolve(node_of, as_string(field(je[i], "v", at), at + ".v"), at + ".v");
    e.delay = as_real(field(je[i], "delay", at), at + ".delay");
    edges.push_back(e);
  }
  s.network = Network(node_names, std::move(edges));

  const json& js = field(j, "sources", "");
  if (!js.is_object()) fail(Kind::kInvalidValue, "sources", "expected an object");
  s.sources.nodes.resize(contents.size());
  for (auto it = js.begin(); it != js.end(); ++it) {
    const std::string at = "sources." + it.key();
    const ContentId f = resolve(content_of, it.key(), at);
    for (const std::string& n : string_list(it.value(), at))
      s.sources.nodes[f].push_back(resolve(node_of, n, at));
  }

  const json& jc = field(j, "capacities", "");
  if (!jc.is_object()) fail(Kind::kInvalidValue, "capacities", "expected an object");
  s.capacities.assign(node_names.size(), 0);
  for (auto it = jc.begin(); it != jc.end(); ++it) {
    const std::string at = "capacities." + it.key();
    s.capacities[resolve(node_of, it.key(), at)] = as_integer(it.value(), at);
  }

  const json& jr = as_array(field(j, "requests", ""), "requests");
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const std::string at = "requests[" + std::to_string(i) + "]";
    Request r;
    r.content = resolve(content_of, as_string(field(jr[i], "content", at), at + ".content"),
                        at + ".content");
    for (const std::string& n : string_list(field(jr[i], "path", at), at + ".path"))
      r.path.nodes.push_back(resolve(node_of, n, at + ".path"));
    r.rate = as_real(field(jr[i], "rate", at), at + ".rate");
    s.requests.push_back(std::move(r));
  }

  const json& jd = field(j, "dissimilarity", "");
  if (jd.is_object()) {
    const json& pl = field(jd, "power_law", "dissimilarity");
    const double beta = as_real(field(pl, "beta", "dissimilarity.power_law"),
                                "dissimilarity.power_law.beta");
    s.dissimilarity = DissimilarityMatrix::power_law(contents.size(), beta);
  } else {
    as_array(jd, "dissimilarity");
    Matrix d(jd.size(), jd.empty() ? 0 : jd[0].size());
    for (std::size_t f = 0; f < jd.size(); ++f) {
      const std::string at = "dissimilarity[" + std::to_string(f) + "]";
      if (!jd[f].is_array() || jd[f].size() != d.cols())
        fail(Kind::kInvalidValue, at, "rows must be arrays of equal length");
      for (std::size_t g = 0; g < d.cols(); ++g) d(f, g) = as_real(jd[f][g], at);
    }
    s.dissimilarity = DissimilarityMatrix(std::move(d));
  }

  s.alpha = as_real(field(j, "alpha", ""), "alpha");
  if (auto it = j.find("availability_excludes_terminal"); it != j.end()) {
    if (!it->is_boolean()) fail(Kind::kInvalidValue, "availability_excludes_terminal", "expected a boolean");
    s.availability_excludes_terminal = it->get<bool>();
  }
  return s;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Kind::kParse, "", e.what());
  }
}

}  // namespace

std::string scenario_to_string(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

Scenario scenario_from_string(std::string_view text) { return from_json(parse_document(text)); }

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(Kind::kIo, "", "cannot open " + path.string() + " for writing");
  out << scenario_to_string(s);
  if (!out) fail(Kind::kIo, "", "failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Kind::kIo, "", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_string(buf.str());
}

std::string gen_config_to_string(const GenConfig& g) {
  json j{{"nodes_side", g.nodes_side},     {"topology", std::string(to_string(g.topology))},
         {"num_contents", g.num_contents}, {"num_requests", g.num_requests},
         {"num_origins", g.num_origins},   {"capacity", g.capacity},
         {"beta", g.beta},                 {"rho", g.rho},
         {"alpha", g.alpha},               {"delay_min", g.delay_min},
         {"delay_max", g.delay_max},       {"seed", g.seed}};
  return j.dump(2) + "\n";
}

GenConfig gen_config_from_string(std::string_view text) {
  const json j = parse_document(text);
  if (!j.is_object()) fail(Kind::kInvalidValue, "", "config document must be an object");
  GenConfig g;
  auto integer = [&j](const char* key, long& out) {
    if (auto it = j.find(key); it != j.end()) out = as_integer(*it, key);
  };
  auto real = [&j](const char* key, double& out) {
    if (auto it = j.find(key); it != j.end()) out = as_real(*it, key);
  };
  integer("nodes_side", g.nodes_side);
  integer("num_contents", g.num_contents);
  integer("num_requests", g.num_requests);
  integer("num_origins", g.num_origins);
  integer("capacity", g.capacity);
  real("beta", g.beta);
  real("rho", g.rho);
  real("alpha", g.alpha);
  real("delay_min", g.delay_min);
  real("delay_max", g.delay_max);
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) fail(Kind::kInvalidValue, "seed", "expected a nonnegative integer");
    g.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("topology"); it != j.end()) {
    try {
      g.topology = parse_topology(as_string(*it, "topology"));
    } catch (const std::invalid_argument& e) {
      fail(Kind::kInvalidValue, "topology", e.what());
    }
  }
  return g;
}

}  // namespace simcache
