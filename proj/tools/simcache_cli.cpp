// Command-line harness: scenario generation, offline solves, parameter
// sweeps and online runs. Every command that writes results also writes a
// manifest.json holding what is needed to reproduce them.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "simcache/baselines.hpp"
#include "simcache/csv.hpp"
#include "simcache/hibsa.hpp"
#include "simcache/online.hpp"
#include "simcache/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace simcache;

namespace {

constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

struct LoadedScenario {
  Scenario scenario;
  std::string path;
  std::string hash;
};

LoadedScenario load(const std::string& path) {
  const std::string text = read_text(path);
  return {scenario_from_string(text), path, hex(fnv1a(text))};
}

json manifest(std::string_view command, std::uint64_t seed, json config) {
  json m;
  m["command"] = command;
  m["version"] = SIMCACHE_VERSION;
  m["seed"] = seed;
  m["config"] = std::move(config);
  return m;
}

// ---- options shared by several commands ----------------------------------

struct GenOptions {
  GenConfig cfg;
  std::string topology = "grid";
  std::string config_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON generation config; flags override it");
    cmd->add_option("--nodes-side", cfg.nodes_side, "Grid/torus side, or line length");
    cmd->add_option("--topology", topology, "grid, torus or line");
    cmd->add_option("--contents", cfg.num_contents);
    cmd->add_option("--requests", cfg.num_requests);
    cmd->add_option("--origins", cfg.num_origins, "Distinct request starting nodes");
    cmd->add_option("--capacity", cfg.capacity);
    cmd->add_option("--beta", cfg.beta, "Dissimilarity exponent");
    cmd->add_option("--rho", cfg.rho, "Zipf exponent");
    cmd->add_option("--alpha", cfg.alpha);
    cmd->add_option("--delay-min", cfg.delay_min);
    cmd->add_option("--delay-max", cfg.delay_max);
    cmd->add_option("--seed", cfg.seed);
  }

  // File values first, then any flag given on the command line.
  GenConfig resolve(const CLI::App* cmd) const {
    GenConfig g = cfg;
    if (!config_file.empty()) {
      GenConfig file = gen_config_from_string(read_text(config_file));
      auto given = [&](const char* name) { return cmd->count(name) > 0; };
      if (!given("--nodes-side")) g.nodes_side = file.nodes_side;
      if (!given("--topology")) g.topology = file.topology;
      if (!given("--contents")) g.num_contents = file.num_contents;
      if (!given("--requests")) g.num_requests = file.num_requests;
      if (!given("--origins")) g.num_origins = file.num_origins;
      if (!given("--capacity")) g.capacity = file.capacity;
      if (!given("--beta")) g.beta = file.beta;
      if (!given("--rho")) g.rho = file.rho;
      if (!given("--alpha")) g.alpha = file.alpha;
      if (!given("--delay-min")) g.delay_min = file.delay_min;
      if (!given("--delay-max")) g.delay_max = file.delay_max;
      if (!given("--seed")) g.seed = file.seed;
      if (cmd->count("--topology")) g.topology = parse_topology(topology);
    } else {
      g.topology = parse_topology(topology);
    }
    check_gen_config(g);
    return g;
  }
};

struct SolverOptions {
  SolverConfig cfg;
  std::string perturbation = "shrink";
  bool random_init = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta-s", cfg.eta_s, "Primal step size");
    cmd->add_option("--eta-mu", cfg.eta_mu, "Dual step size");
    cmd->add_option("--delta", cfg.delta, "Stop when |L(n) - L(n-1)| <= delta");
    cmd->add_option("--max-iters", cfg.max_iters);
    cmd->add_option("--perturbation", perturbation, "Dual perturbation sign: shrink or amplify")
        ->check(CLI::IsMember({"shrink", "amplify"}));
    cmd->add_flag("--random-init", random_init, "Random feasible start seeded by --seed");
  }

  SolverConfig resolve(std::uint64_t seed) const {
    SolverConfig c = cfg;
    c.perturbation = perturbation == "amplify" ? DualPerturbation::kAmplify : DualPerturbation::kShrink;
    c.random_init = random_init;
    c.seed = seed;
    if (!(c.eta_s > 0.0) || !(c.eta_mu > 0.0) || !(c.delta >= 0.0) || c.max_iters < 1)
      throw UsageError("step sizes must be positive, delta nonnegative, max-iters >= 1");
    return c;
  }

  json to_json(const SolverConfig& c) const {
    return {{"eta_s", c.eta_s},         {"eta_mu", c.eta_mu},
            {"delta", c.delta},         {"max_iters", c.max_iters},
            {"perturbation", to_string(c.perturbation)},
            {"random_init", c.random_init}};
  }
};

// ---- offline summaries -----------------------------------------------------

struct Summary {
  std::string scheme;
  double alpha = 0.0;
  double expected_delay = 0.0;
  double dissimilarity_cost = 0.0;
  double objective = 0.0;
  double fractional_objective = 0.0;
  double gap_vs_fractional = 0.0;
  long iterations = 0;
  std::string stop;
};

Summary summarize(const Scenario& s, const OfflineResult& res, std::string scheme) {
  Summary out;
  out.scheme = std::move(scheme);
  out.alpha = s.alpha;
  out.expected_delay = expected_delay(s, res.rounded);
  out.dissimilarity_cost = dissimilarity_cost(s, res.rounded);
  out.objective = objective(s, res.rounded);
  out.fractional_objective = objective(s, res.fractional);
  out.gap_vs_fractional = out.fractional_objective > 0.0
                              ? (out.objective - out.fractional_objective) / out.fractional_objective
                              : 0.0;
  out.iterations = res.trace.iterations;
  out.stop = std::string(to_string(res.trace.stop));
  return out;
}

const char* const kSummaryColumns =
    "scheme,alpha,expected_delay,dissimilarity_cost,objective,fractional_objective,"
    "gap_vs_fractional,iterations,stop";

std::string summary_fields(const Summary& s) {
  using csv::format_real;
  std::ostringstream out;
  csv::write_row(out, {s.scheme, format_real(s.alpha), format_real(s.expected_delay),
                       format_real(s.dissimilarity_cost), format_real(s.objective),
                       format_real(s.fractional_objective), format_real(s.gap_vs_fractional),
                       std::to_string(s.iterations), s.stop});
  std::string row = out.str();
  row.pop_back();
  return row;
}

OfflineResult run_scheme(const Scenario& s, const SolverConfig& cfg, bool adaptive) {
  return adaptive ? solve_adaptive_caching(s, cfg) : solve_offline(s, cfg);
}

json solution_json(const Scenario& s, const OfflineResult& res) {
  json caches = json::object();
  for (NodeId v = 0; v < s.num_nodes(); ++v) {
    json held = json::array();
    for (ContentId f = 0; f < s.num_contents(); ++f)
      if (res.rounded.x(v, f) == 1.0 && !s.pinned(v, f)) held.push_back(s.catalog.names[f]);
    caches[s.network.name(v)] = held;
  }
  json deliveries = json::array();
  for (RequestId r = 0; r < s.num_requests(); ++r) {
    ContentId g = 0;
    for (ContentId f = 0; f < s.num_contents(); ++f)
      if (res.rounded.q(r, f) == 1.0) g = f;
    deliveries.push_back({{"request", r},
                          {"content", s.catalog.names[s.requests[r].content]},
                          {"delivered", s.catalog.names[g]}});
  }
  auto rows = [](const Matrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto row = m.row(i);
      out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
  };
  return {{"caches", caches},
          {"deliveries", deliveries},
          {"fractional", {{"x", rows(res.fractional.x)}, {"q", rows(res.fractional.q)}}}};
}

// ---- commands --------------------------------------------------------------

int cmd_generate(const CLI::App* cmd, const GenOptions& gen, const std::string& out) {
  const GenConfig g = gen.resolve(cmd);
  const Scenario s = generate_scenario(g);
  const std::string text = scenario_to_string(s);
  write_text(out, text);
  json cfg = json::parse(gen_config_to_string(g));
  json m = manifest("generate", g.seed, cfg);
  m["output"] = {{"scenario", out}, {"fnv1a", hex(fnv1a(text))}};
  fs::path mpath = out;
  mpath.replace_extension(".manifest.json");
  write_text(mpath, m.dump(2) + "\n");

  const auto violations = validate_scenario(s);
  std::cout << "wrote " << out << ": " << s.num_nodes() << " nodes, "
            << s.network.edges().size() << " edges, " << s.num_contents() << " contents, "
            << s.num_requests() << " requests, topology " << to_string(g.topology) << "\n"
            << (violations.empty() ? "valid" : "INVALID") << "\n";
  return violations.empty() ? 0 : kExitViolations;
}

int cmd_solve(const std::string& scenario_path, const fs::path& out, std::optional<double> alpha,
              const SolverOptions& solver, std::uint64_t seed, const std::string& baseline) {
  LoadedScenario in = load(scenario_path);
  if (alpha) in.scenario.alpha = *alpha;
  const SolverConfig cfg = solver.resolve(seed);
  const bool adaptive = baseline == "adaptive";
  const OfflineResult res = run_scheme(in.scenario, cfg, adaptive);
  const Summary sum = summarize(in.scenario, res, adaptive ? "adaptive" : "similarity");

  ensure_dir(out);
  std::ostringstream trace;
  write_trace_csv(trace, res.trace);
  write_text(out / "trace.csv", trace.str());
  write_text(out / "summary.csv", std::string(kSummaryColumns) + "\n" + summary_fields(sum) + "\n");
  write_text(out / "solution.json", solution_json(in.scenario, res).dump(2) + "\n");

  json cfgj = solver.to_json(cfg);
  cfgj["alpha"] = in.scenario.alpha;
  cfgj["scheme"] = sum.scheme;
  json m = manifest("solve", seed, cfgj);
  m["scenario"] = {{"path", in.path}, {"fnv1a", in.hash}};
  write_text(out / "manifest.json", m.dump(2) + "\n");

  std::cout << kSummaryColumns << "\n" << summary_fields(sum) << "\n";
  return 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad value in list: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

int cmd_sweep(const CLI::App* cmd, const GenOptions& gen, const SolverOptions& solver,
              const std::string& param, const std::string& values_text,
              const std::vector<std::uint64_t>& seeds, const fs::path& out, unsigned jobs) {
  const GenConfig base = gen.resolve(cmd);
  const std::vector<double> values = parse_values(values_text);
  if (param == "capacity") {
    for (double v : values)
      if (v < 0.0 || v != static_cast<double>(static_cast<long>(v)))
        throw UsageError("capacity values must be nonnegative integers");
  }
  const SolverConfig cfg = solver.resolve(0);
  const char* schemes[] = {"similarity", "adaptive"};

  struct Task {
    double value;
    std::uint64_t seed;
    int scheme;
  };
  std::vector<Task> tasks;
  for (double v : values)
    for (std::uint64_t sd : seeds)
      for (int k = 0; k < 2; ++k) tasks.push_back({v, sd, k});

  std::vector<std::string> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      GenConfig g = base;
      g.seed = t.seed;
      if (param == "capacity") g.capacity = static_cast<long>(t.value);
      std::string fields;
      std::string error;
      try {
        Scenario s = generate_scenario(g);
        if (param == "alpha") s.alpha = t.value;
        const OfflineResult res = run_scheme(s, cfg, t.scheme == 1);
        fields = summary_fields(summarize(s, res, schemes[t.scheme]));
      } catch (const std::exception& e) {
        error = e.what();
        std::replace(error.begin(), error.end(), ',', ';');
        fields = std::string(schemes[t.scheme]) + ",,,,,,,,";
      }
      rows[i] = param + "," + csv::format_real(t.value) + "," + std::to_string(t.seed) + "," +
                fields + "," + error + "\n";
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  ensure_dir(out);
  std::string text = std::string("param,value,seed,") + kSummaryColumns + ",error\n";
  for (const auto& r : rows) text += r;
  write_text(out / "sweep.csv", text);

  json cfgj = solver.to_json(cfg);
  cfgj["generation"] = json::parse(gen_config_to_string(base));
  cfgj["param"] = param;
  cfgj["values"] = values;
  cfgj["seeds"] = seeds;
  write_text(out / "manifest.json", manifest("sweep", base.seed, cfgj).dump(2) + "\n");
  std::cout << "wrote " << (out / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
  return 0;
}

struct OnlineOptions {
  OnlineConfig cfg;
  PerCacheConfig per_cache;
  std::string estimator = "all";
  std::string perturbation = "shrink";

  void attach(CLI::App* cmd) {
    cmd->add_option("--slots", cfg.num_slots);
    cmd->add_option("--slot-length", cfg.slot_length, "T");
    cmd->add_option("--eta-x", cfg.eta_x);
    cmd->add_option("--eta-q", cfg.eta_q);
    cmd->add_option("--eta-mu", cfg.eta_mu);
    cmd->add_option("--window", cfg.delay_window, "Averaging window in slots");
    cmd->add_option("--estimator", estimator, "Gradient estimate support: all or delivered")
        ->check(CLI::IsMember({"all", "delivered"}));
    cmd->add_option("--perturbation", perturbation)->check(CLI::IsMember({"shrink", "amplify"}));
    cmd->add_option("--insert-prob", per_cache.insert_prob, "Per-cache insertion probability");
  }
};

int cmd_online(const std::string& scenario_path, const fs::path& out, std::uint64_t seed,
               OnlineOptions opts, const SolverOptions& solver, const std::string& baseline,
               std::optional<double> alpha) {
  LoadedScenario in = load(scenario_path);
  if (alpha) in.scenario.alpha = *alpha;
  const Scenario& s = in.scenario;
  OnlineConfig& cfg = opts.cfg;
  cfg.seed = seed;
  cfg.support = opts.estimator == "delivered" ? EstimatorSupport::kDeliveredOnly
                                              : EstimatorSupport::kAllContents;
  cfg.perturbation =
      opts.perturbation == "amplify" ? DualPerturbation::kAmplify : DualPerturbation::kShrink;
  if (!(cfg.slot_length > 0.0) || !(cfg.eta_x > 0.0) || !(cfg.eta_q > 0.0) ||
      !(cfg.eta_mu > 0.0) || cfg.num_slots < 1 || cfg.delay_window < 1)
    throw UsageError("slot length, steps, slots and window must be positive");
  if (opts.per_cache.insert_prob < 0.0 || opts.per_cache.insert_prob > 1.0)
    throw UsageError("insert-prob must lie in [0, 1]");

  const SolverConfig offline_cfg = solver.resolve(seed);
  const OfflineResult offline = solve_offline(s, offline_cfg);
  const double reference = expected_delay(s, offline.rounded);

  std::vector<SlotRecord> records;
  json cfgj;
  if (baseline == "per-cache") {
    PerCacheConfig pc = opts.per_cache;
    pc.num_slots = cfg.num_slots;
    pc.seed = seed;
    pc.slot_length = cfg.slot_length;
    pc.delay_window = cfg.delay_window;
    records = run_per_cache_baseline(s, pc).slots;
    cfgj = {{"scheme", "per-cache (simplified)"},
            {"insert_prob", pc.insert_prob},
            {"slots", pc.num_slots},
            {"slot_length", pc.slot_length},
            {"window", pc.delay_window}};
  } else {
    records = slot_records(run_online(s, cfg).slots);
    cfgj = {{"scheme", "similarity"},
            {"slots", cfg.num_slots},
            {"slot_length", cfg.slot_length},
            {"eta_x", cfg.eta_x},
            {"eta_q", cfg.eta_q},
            {"eta_mu", cfg.eta_mu},
            {"window", cfg.delay_window},
            {"estimator", opts.estimator},
            {"perturbation", opts.perturbation}};
  }
  cfgj["alpha"] = s.alpha;
  cfgj["offline_reference"] = solver.to_json(offline_cfg);

  ensure_dir(out);
  std::ostringstream log;
  write_slot_log_csv(log, records, reference);
  write_text(out / "slot_log.csv", log.str());
  json m = manifest("online", seed, cfgj);
  m["scenario"] = {{"path", in.path}, {"fnv1a", in.hash}};
  write_text(out / "manifest.json", m.dump(2) + "\n");

  const SlotRecord& last = records.back();
  std::cout << "slots " << records.size() << ", windowed delay " << last.avg_delay_window
            << ", offline reference " << reference << "\n";
  return 0;
}

int cmd_validate(const std::string& scenario_path) {
  const LoadedScenario in = load(scenario_path);
  const auto violations = validate_scenario(in.scenario);
  for (const Violation& v : violations) std::cout << to_string(v.kind) << ": " << v.detail << "\n";
  std::cout << (violations.empty() ? "valid" : std::to_string(violations.size()) + " violation(s)")
            << "\n";
  return violations.empty() ? 0 : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similarity caching: joint cache placement and soft-hit delivery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SIMCACHE_VERSION);

  GenOptions gen;
  std::string gen_out;
  CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic scenario file");
  gen.attach(generate);
  generate->add_option("--out", gen_out, "Scenario file to write")->required();

  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::string baseline;
  SolverOptions solver;
  CLI::App* solve = app.add_subcommand("solve", "Offline solve with greedy rounding");
  solve->add_option("--scenario", scenario_path)->required();
  solve->add_option("--out", out_dir, "Output directory")->required();
  solve->add_option("--alpha", alpha, "Override the scenario's alpha");
  solve->add_option("--seed", seed, "Seed for --random-init");
  solve->add_option("--baseline", baseline, "adaptive: optimize caching only")
      ->check(CLI::IsMember({"adaptive"}));
  solver.attach(solve);

  GenOptions sweep_gen;
  SolverOptions sweep_solver;
  std::string param;
  std::string values;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
  CLI::App* sweep = app.add_subcommand("sweep", "Multi-seed sweep over alpha or capacity");
  sweep_gen.attach(sweep);
  sweep_solver.attach(sweep);
  sweep->add_option("--param", param)->required()->check(CLI::IsMember({"alpha", "capacity"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--seeds", seeds, "Generation seeds")->delimiter(',');
  sweep->add_option("--jobs", jobs, "Worker threads");
  sweep->add_option("--out", out_dir, "Output directory")->required();

  OnlineOptions online_opts;
  SolverOptions online_solver;
  CLI::App* online = app.add_subcommand("online", "Slotted online run or per-cache baseline");
  online->add_option("--scenario", scenario_path)->required();
  online->add_option("--out", out_dir, "Output directory")->required();
  online->add_option("--seed", seed);
  online->add_option("--alpha", alpha, "Override the scenario's alpha");
  online->add_option("--baseline", baseline, "per-cache: simplified per-cache scheme")
      ->check(CLI::IsMember({"per-cache"}));
  online_opts.attach(online);
  online->add_option("--eta-s", online_solver.cfg.eta_s, "Offline reference step size");
  online->add_option("--delta", online_solver.cfg.delta, "Offline reference tolerance");
  online->add_option("--max-iters", online_solver.cfg.max_iters, "Offline reference iterations");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("--scenario", scenario_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(generate, gen, gen_out);
    if (*solve) return cmd_solve(scenario_path, out_dir, alpha, solver, seed, baseline);
    if (*sweep) return cmd_sweep(sweep, sweep_gen, sweep_solver, param, values, seeds, out_dir, jobs);
    if (*online)
      return cmd_online(scenario_path, out_dir, seed, online_opts, online_solver, baseline, alpha);
    if (*validate) return cmd_validate(scenario_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
