// SPDX-License-Identifier: Apache-2.0
#include "hosgns/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hosgns/common.hpp"
#include "hosgns/cooccurrence.hpp"
#include "hosgns/embedding.hpp"
#include "hosgns/eval.hpp"
#include "hosgns/hosgns.hpp"
#include "hosgns/supra_adjacency.hpp"
#include "hosgns/temporal_graph.hpp"

#ifndef HOSGNS_VERSION
#define HOSGNS_VERSION "unknown"
#endif

namespace hosgns {

std::string_view version() { return HOSGNS_VERSION; }

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Thrown for invalid argument combinations discovered after parsing.
class UsageError : public Error {
  using Error::Error;
};

// Options registered on a subcommand that can also come from a JSON config
// file. Flags given on the command line win over the file.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON config file (flags override it)");
  }

  template <typename T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    auto* opt = app_->add_option("--" + dashed(key), var, help)->capture_default_str();
    entries_.push_back({key, opt, [&var](const json& j) { var = j.get<T>(); },
                        [&var](json& o, const std::string& k) { o[k] = var; }});
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& var, const std::string& help) {
    auto* opt = app_->add_flag("--" + dashed(key), var, help);
    entries_.push_back({key, opt, [&var](const json& j) { var = j.get<bool>(); },
                        [&var](json& o, const std::string& k) { o[k] = var; }});
    return opt;
  }

  void apply_config() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw Error("cannot open config file '" + config_path_ + "'");
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error("config file '" + config_path_ + "': " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(),
                             [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) throw UsageError("unknown config key '" + key + "'");
      if (it->option->count() == 0) {
        try {
          it->load(value);
        } catch (const json::exception&) {
          throw UsageError("config key '" + key + "' has the wrong type");
        }
      }
    }
  }

  json resolved() const {
    json o = json::object();
    for (const auto& e : entries_) e.dump(o, e.key);
    return o;
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<void(json&, const std::string&)> dump;
  };

  static std::string dashed(std::string s) {
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
  }

  CLI::App* app_;
  std::string config_path_;
  std::vector<Entry> entries_;
};

int default_threads() {
  if (const char* env = std::getenv("HOSGNS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

void write_json(const fs::path& p, const json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("'" + p.string() + "': " + e.what());
  }
}

TimeVaryingGraph load_graph(const std::string& graph, const std::string& input, std::int64_t window) {
  if (!graph.empty() && !input.empty()) throw UsageError("give either --graph or --input, not both");
  if (!graph.empty()) return graph_from_json(read_json(graph));
  if (input.empty()) throw UsageError("--graph or --input is required");
  if (window <= 0) throw UsageError("--window-seconds must be positive");
  std::ifstream in(input);
  if (!in) throw Error("cannot open input '" + input + "'");
  return parse_contact_lines(in, window);
}

std::string model_name(const std::string& tensor) {
  return "HOSGNS(" + std::string(tensor == "statdyn" ? "stat|dyn" : tensor) + ")";
}

// ingest ------------------------------------------------------------------

struct IngestArgs {
  std::string input;
  std::int64_t window_seconds = 600;
  std::string output;
  std::string stats_output;
};

int cmd_ingest(const IngestArgs& a, const json& config, std::ostream& out) {
  if (a.input.empty()) throw UsageError("--input is required");
  if (a.window_seconds <= 0) throw UsageError("--window-seconds must be positive");
  const auto g = load_graph("", a.input, a.window_seconds);
  json s = stats_to_json(stats(g));
  if (!a.output.empty()) {
    json j = graph_to_json(g);
    j["provenance"] = {{"config", config}, {"version", version()}};
    write_json(a.output, j);
  }
  if (!a.stats_output.empty()) {
    json j = s;
    j["provenance"] = {{"config", config}, {"version", version()}};
    write_json(a.stats_output, j);
  }
  out << s.dump(2) << '\n';
  return 0;
}

// train -------------------------------------------------------------------

struct TrainArgs {
  std::string graph;
  std::string input;
  std::int64_t window_seconds = 600;
  std::string tensor = "stat";
  int window = 10;
  std::string dyn_mode = "exact";
  int walks_per_node = 10;
  int walk_length = 80;
  std::size_t dyn_budget = kDefaultDynEntryBudget;
  int dim = 128;
  double kappa = 5.0;
  int batch = 50000;
  double lr = 0.05;
  int iterations = 10000;
  double init_scale = 0.5;
  std::string optimizer = "adam";
  std::string precision = "float";
  int checkpoint_every = 100;
  std::uint64_t seed = 1;
  int runs = 1;
  int threads = 1;
  bool nondeterministic = false;
  std::string output = "embeddings";
  std::string tensor_out;
  std::string supra_out;
};

CooccurrenceTensor build_tensor(const TimeVaryingGraph& g, const std::string& kind, int window,
                                const std::string& dyn_mode, const WalkConfig& walks,
                                std::size_t budget, const std::string& supra_out) {
  if (kind != "stat" && kind != "dyn" && kind != "statdyn")
    throw UsageError("--tensor must be one of: stat, dyn, statdyn");
  if (dyn_mode != "exact" && dyn_mode != "sampled")
    throw UsageError("--dyn-mode must be one of: exact, sampled");
  if (kind == "stat" && supra_out.empty()) return stat_tensor(g);
  const auto s = build_supra(g);
  if (!supra_out.empty()) {
    auto edges = open_out(supra_out + ".edges");
    write_supra_edges(edges, s);
    write_json(supra_out + ".json", supra_index_json(s));
  }
  if (kind == "stat") return stat_tensor(g);
  auto dyn = dyn_mode == "exact" ? dyn_tensor(s, window, budget) : dyn_tensor_sampled(s, walks);
  if (kind == "dyn") return dyn;
  return statdyn_tensor(stat_tensor(g), dyn);
}

template <typename Scalar>
LossReport train_one(const CooccurrenceTensor& t, const TrainConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  auto log = open_out(dir / "train_log.jsonl");
  auto result = train<Scalar>(t, cfg);
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    const json line{{"iteration", result.checkpoints[c].iteration},
                    {"loss", result.checkpoints[c].total},
                    {"lr", result.checkpoint_lr[c]}};
    log << line.dump() << '\n';
  }
  const auto& e = result.embeddings;
  for (int n = 0; n < e.order(); ++n) {
    const Role r = e.roles[static_cast<std::size_t>(n)];
    auto f = open_out(dir / (std::string(1, role_letter(r)) + ".tsv"));
    write_factor_tsv(f, e.factors[static_cast<std::size_t>(n)], r, cfg.kappa, cfg.seed);
  }
  return result.checkpoints.back();
}

int cmd_train(const TrainArgs& a, const json& config, std::ostream& out) {
  if (a.runs < 1) throw UsageError("--runs must be >= 1");
  if (a.threads < 1) throw UsageError("--threads must be >= 1");
  if (a.precision != "float" && a.precision != "double")
    throw UsageError("--precision must be one of: float, double");
  if (a.optimizer != "adam" && a.optimizer != "sgd")
    throw UsageError("--optimizer must be one of: adam, sgd");
  TrainConfig base;
  base.dim = a.dim;
  base.kappa = a.kappa;
  base.batch = a.batch;
  base.lr_start = a.lr;
  base.iterations = a.iterations;
  base.init_scale = a.init_scale;
  base.optimizer = a.optimizer == "adam" ? Optimizer::Adam : Optimizer::Sgd;
  base.checkpoint_every = a.checkpoint_every;
  base.deterministic = !a.nondeterministic;
  base.threads = a.threads;
  base.validate();
  WalkConfig walks;
  walks.window = a.window;
  walks.walks_per_node = a.walks_per_node;
  walks.walk_length = a.walk_length;
  walks.seed = derive_seed(a.seed, "walks");
  walks.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const auto g = load_graph(a.graph, a.input, a.window_seconds);
  const auto tensor = build_tensor(g, a.tensor, a.window, a.dyn_mode, walks, a.dyn_budget, a.supra_out);
  if (!a.tensor_out.empty()) {
    auto coo = open_out(a.tensor_out + ".coo");
    write_tensor_coo(coo, tensor);
    write_json(a.tensor_out + ".json", tensor_sidecar_json(tensor));
  }
  const auto t1 = std::chrono::steady_clock::now();

  const fs::path root(a.output);
  fs::create_directories(root);
  std::vector<LossReport> finals(static_cast<std::size_t>(a.runs));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(a.runs));
  for (int r = 0; r < a.runs; ++r)
    seeds[static_cast<std::size_t>(r)] = derive_seed(a.seed, "run", static_cast<std::uint64_t>(r));

  auto run = [&](int r) {
    TrainConfig cfg = base;
    cfg.seed = seeds[static_cast<std::size_t>(r)];
    const fs::path dir = root / ("run_" + std::to_string(r));
    finals[static_cast<std::size_t>(r)] =
        a.precision == "float" ? train_one<float>(tensor, cfg, dir) : train_one<double>(tensor, cfg, dir);
  };
  // Each run is single-threaded and seeded independently, so running them
  // side by side leaves every output unchanged.
  const int parallel_runs = base.deterministic ? std::min(a.threads, a.runs) : 1;
  if (parallel_runs <= 1) {
    for (int r = 0; r < a.runs; ++r) run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(a.runs));
    std::vector<std::thread> pool;
    for (int w = 0; w < parallel_runs; ++w)
      pool.emplace_back([&] {
        for (int r; (r = next++) < a.runs;) {
          try {
            run(r);
          } catch (...) {
            failures[static_cast<std::size_t>(r)] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  const auto t2 = std::chrono::steady_clock::now();

  json runs = json::array();
  for (int r = 0; r < a.runs; ++r) {
    const auto& f = finals[static_cast<std::size_t>(r)];
    runs.push_back({{"run", r},
                    {"seed", seeds[static_cast<std::size_t>(r)]},
                    {"final_loss", f.total},
                    {"final_iteration", f.iteration}});
  }
  json sidecar = tensor_sidecar_json(tensor);
  const json report{{"version", version()},
                    {"config", config},
                    {"model", model_name(a.tensor)},
                    {"tensor", sidecar},
                    {"graph", stats_to_json(stats(g))},
                    {"runs", runs}};
  write_json(root / "train_report.json", report);

  out << model_name(a.tensor) << ": tensor nnz " << tensor.nnz() << " built in "
      << std::chrono::duration<double>(t1 - t0).count() << " s; " << a.runs << " run(s) of "
      << a.iterations << " iterations in " << std::chrono::duration<double>(t2 - t1).count() << " s\n";
  for (int r = 0; r < a.runs; ++r)
    out << "  run " << r << ": final batch loss " << finals[static_cast<std::size_t>(r)].total << '\n';
  return 0;
}

// eval --------------------------------------------------------------------

struct EvalArgs {
  std::string graph;
  std::string input;
  std::int64_t window_seconds = 600;
  std::string embeddings = "embeddings";
  std::string task = "reconstruct";
  std::string op = "hadamard";
  int splits = 10;
  double fraction = 0.7;
  std::vector<std::string> sir{"0.25:0.002"};
  std::uint64_t seed = 1;
  std::string dataset;
  std::string output = "eval_report.json";
  std::size_t max_samples = 1'000'000;
};

std::vector<EmbeddingSet<double>> read_runs(const fs::path& root) {
  std::vector<std::pair<int, fs::path>> dirs;
  if (!fs::is_directory(root)) throw Error("embedding directory '" + root.string() + "' not found");
  for (const auto& entry : fs::directory_iterator(root)) {
    const auto name = entry.path().filename().string();
    if (entry.is_directory() && name.rfind("run_", 0) == 0) {
      try {
        dirs.emplace_back(std::stoi(name.substr(4)), entry.path());
      } catch (const std::exception&) {
      }
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw Error("no run_<r> directories under '" + root.string() + "'");
  std::vector<EmbeddingSet<double>> runs;
  for (const auto& [_, dir] : dirs) {
    EmbeddingSet<double> e;
    for (Role r : {Role::Node, Role::Context, Role::Time, Role::ContextTime}) {
      const auto p = dir / (std::string(1, role_letter(r)) + ".tsv");
      if (!fs::exists(p)) continue;
      std::ifstream in(p);
      auto f = read_factor_tsv(in);
      e.roles.push_back(f.role);
      e.factors.push_back(std::move(f.matrix));
    }
    if (e.factors.empty()) throw Error("no factor files in '" + dir.string() + "'");
    for (const auto& f : e.factors)
      if (f.cols() != e.dim()) throw DimensionError("factor dimensions differ in '" + dir.string() + "'");
    runs.push_back(std::move(e));
  }
  return runs;
}

std::pair<double, double> parse_sir_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("SIR parameters must read beta:mu, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("SIR parameters must read beta:mu, got '" + s + "'");
  }
}

json pmi_check_embeddings(const TimeVaryingGraph& g, const std::vector<EmbeddingSet<double>>& runs,
                          const json& train_report, std::size_t max_samples, std::uint64_t seed) {
  const auto& cfg = train_report.at("config");
  const std::string kind = cfg.value("tensor", std::string("stat"));
  WalkConfig walks;
  walks.window = cfg.value("window", 10);
  walks.walks_per_node = cfg.value("walks_per_node", 10);
  walks.walk_length = cfg.value("walk_length", 80);
  walks.seed = derive_seed(cfg.value("seed", std::uint64_t{1}), "walks");
  const double kappa = cfg.value("kappa", 5.0);
  const auto tensor = build_tensor(g, kind, walks.window, cfg.value("dyn_mode", std::string("exact")),
                                   walks, cfg.value("dyn_budget", kDefaultDynEntryBudget), "");
  json per_run = json::array();
  std::vector<double> r2;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto rec = reconstruct_spmi(runs[r], tensor, kappa, max_samples,
                                      derive_seed(seed, "pmi-check", r));
    r2.push_back(rec.r2);
    per_run.push_back({{"run", r}, {"r2", rec.r2}, {"max_abs_error", rec.max_abs_error},
                       {"n_samples", rec.spmi.size()}});
  }
  const auto [mean, sd] = mean_std(r2);
  return {{"task", "pmi-check"}, {"model", model_name(kind)}, {"kappa", kappa},
          {"r2_mean", mean}, {"r2_std", sd}, {"runs", per_run}};
}

int cmd_eval(const EvalArgs& a, const json& config, std::ostream& out) {
  if (a.task != "classify" && a.task != "reconstruct" && a.task != "pmi-check")
    throw UsageError("--task must be one of: classify, reconstruct, pmi-check");
  Operator op;
  try {
    op = operator_from_name(a.op);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (a.splits < 1) throw UsageError("--splits must be >= 1");
  std::vector<std::pair<double, double>> grid;
  for (const auto& s : a.sir) grid.push_back(parse_sir_pair(s));
  if (a.task == "classify" && grid.empty()) throw UsageError("--sir needs at least one beta:mu pair");

  const auto g = load_graph(a.graph, a.input, a.window_seconds);
  const fs::path root(a.embeddings);
  const auto runs = read_runs(root);
  json train_report = json::object();
  if (fs::exists(root / "train_report.json")) train_report = read_json(root / "train_report.json");
  const std::string model = train_report.value("model", std::string("HOSGNS"));
  std::string dataset = a.dataset;
  if (dataset.empty()) dataset = fs::path(!a.graph.empty() ? a.graph : a.input).stem().string();

  const json provenance{{"config", config}, {"version", version()}};
  if (a.task == "pmi-check") {
    if (!train_report.contains("config")) throw Error("pmi-check needs train_report.json next to the runs");
    json report = pmi_check_embeddings(g, runs, train_report, a.max_samples, a.seed);
    report["dataset"] = dataset;
    report.update(provenance);
    write_json(a.output, report);
    out << report.at("model").get<std::string>() << " pmi-check on " << dataset << ": R^2 "
        << report.at("r2_mean").get<double>() << " +- " << report.at("r2_std").get<double>() << '\n';
    return 0;
  }

  const auto split_list = make_splits(g, a.splits, a.fraction, derive_seed(a.seed, "splits"));
  std::vector<std::uint64_t> split_seeds;
  for (const auto& s : split_list.splits) split_seeds.push_back(s.seed);
  json reports = json::array();
  auto finish = [&](EvalReport& r, json extra) {
    r.dataset = dataset;
    r.model = model;
    r.seeds = split_seeds;
    extra["split_resamples"] = split_list.resamples;
    extra.update(provenance);
    r.extra = std::move(extra);
    out << r.model << ' ' << r.task << " on " << dataset << " (" << r.op;
    if (r.beta) out << ", beta=" << *r.beta << ", mu=" << *r.mu;
    out << "): Macro-F1 " << r.macro_f1_mean << " +- " << r.macro_f1_std << '\n';
    reports.push_back(report_to_json(r));
  };

  if (a.task == "reconstruct") {
    std::vector<std::vector<EventKey>> negatives;
    for (std::size_t r = 0; r < runs.size(); ++r)
      negatives.push_back(negative_events(g, derive_seed(a.seed, "negatives", r)));
    auto rep = run_reconstruction(g, runs, negatives, split_list.splits, op);
    finish(rep, {{"n_negatives", g.num_events()}});
  } else {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      std::vector<SirTrajectory> sir;
      std::vector<int> attempts;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        SirConfig sc;
        sc.beta = grid[p].first;
        sc.mu = grid[p].second;
        sc.seed = derive_seed(derive_seed(a.seed, "sir", p), "run", r);
        auto c = sir_simulate_conditioned(g, sc);
        sir.push_back(std::move(c.trajectory));
        attempts.push_back(c.attempts);
      }
      auto rep = run_classification(g, runs, sir, split_list.splits, op);
      rep.beta = grid[p].first;
      rep.mu = grid[p].second;
      finish(rep, {{"sir_infection", "1-(1-beta)^weight per event"}, {"sir_attempts", attempts}});
    }
  }
  write_json(a.output, reports.size() == 1 ? reports.front() : reports);
  return 0;
}

// pmi-check ---------------------------------------------------------------

struct PmiArgs {
  bool planted = false;
  std::string mode_sizes = "4,5,3";
  int rank = 2;
  double amplitude = 3.0;
  int dim = 4;
  double kappa = 1.0;
  int batch = 5000;
  double lr = 0.03;
  int iterations = 8000;
  std::uint64_t seed = 1;
  int runs = 5;
  std::string graph;
  std::string input;
  std::int64_t window_seconds = 600;
  std::string embeddings;
  std::size_t max_samples = 1'000'000;
  std::string output = "pmi_check.json";
};

int cmd_pmi_check(const PmiArgs& a, const json& config, std::ostream& out) {
  json report;
  if (a.planted) {
    std::vector<int> sizes;
    std::stringstream ss(a.mode_sizes);
    for (std::string tok; std::getline(ss, tok, ',');) {
      try {
        sizes.push_back(std::stoi(tok));
      } catch (const std::exception&) {
        throw UsageError("--mode-sizes must be comma-separated integers");
      }
    }
    if (a.runs < 1) throw UsageError("--runs must be >= 1");
    json per_run = json::array();
    std::vector<double> r2;
    double worst = 0.0;
    for (int r = 0; r < a.runs; ++r) {
      const auto seed = derive_seed(a.seed, "run", static_cast<std::uint64_t>(r));
      const auto planted = planted_cp_tensor(sizes, a.rank, a.amplitude, derive_seed(seed, "planted"));
      TrainConfig cfg;
      cfg.dim = a.dim;
      cfg.kappa = a.kappa;
      cfg.batch = a.batch;
      cfg.lr_start = a.lr;
      cfg.iterations = a.iterations;
      cfg.seed = seed;
      const auto trained = train<double>(planted.tensor, cfg);
      const auto rec = reconstruct_spmi(trained.embeddings, planted.tensor, a.kappa);
      r2.push_back(rec.r2);
      worst = std::max(worst, rec.max_abs_error);
      per_run.push_back({{"run", r}, {"seed", seed}, {"r2", rec.r2}, {"max_abs_error", rec.max_abs_error},
                         {"fixed_point_residual", planted.fixed_point_residual}});
    }
    const auto [mean, sd] = mean_std(r2);
    report = {{"task", "pmi-check"}, {"model", "planted"}, {"mode_sizes", sizes},
              {"r2_mean", mean}, {"r2_std", sd}, {"r2_min", *std::min_element(r2.begin(), r2.end())},
              {"max_abs_error", worst}, {"runs", per_run}};
  } else {
    if (a.embeddings.empty()) throw UsageError("pmi-check needs --planted or --embeddings");
    const auto g = load_graph(a.graph, a.input, a.window_seconds);
    const fs::path root(a.embeddings);
    report = pmi_check_embeddings(g, read_runs(root), read_json(root / "train_report.json"),
                                  a.max_samples, a.seed);
  }
  report["config"] = config;
  report["version"] = version();
  write_json(a.output, report);
  out << "pmi-check (" << report.at("model").get<std::string>() << "): R^2 "
      << report.at("r2_mean").get<double>() << " +- " << report.at("r2_std").get<double>() << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order skip-gram embeddings of time-varying graphs", "hosgns"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Parse a contact list and print graph statistics");
  Options io(ingest);
  io.add("input", ia.input, "Contact list (`timestamp id1 id2` per line)");
  io.add("window_seconds", ia.window_seconds, "Aggregation window in seconds");
  io.add("output", ia.output, "Graph JSON output path");
  io.add("stats_output", ia.stats_output, "Statistics JSON output path");

  TrainArgs ta;
  ta.threads = default_threads();
  auto* trainc = app.add_subcommand("train", "Build a co-occurrence tensor and train embeddings");
  Options to(trainc);
  to.add("graph", ta.graph, "Graph JSON from `ingest`");
  to.add("input", ta.input, "Contact list, parsed on the fly");
  to.add("window_seconds", ta.window_seconds, "Aggregation window for --input");
  to.add("tensor", ta.tensor, "stat | dyn | statdyn");
  to.add("window", ta.window, "Random-walk context window T");
  to.add("dyn_mode", ta.dyn_mode, "exact | sampled");
  to.add("walks_per_node", ta.walks_per_node, "Walks per supra node (sampled mode)");
  to.add("walk_length", ta.walk_length, "Steps per walk (sampled mode)");
  to.add("dyn_budget", ta.dyn_budget, "Maximum stored entries of the dyn tensor");
  to.add("dim", ta.dim, "Embedding dimension d");
  to.add("kappa", ta.kappa, "Negative-sampling constant");
  to.add("batch", ta.batch, "Positive tuples per batch");
  to.add("lr", ta.lr, "Initial learning rate (decays linearly)");
  to.add("iterations", ta.iterations, "Optimizer steps");
  to.add("init_scale", ta.init_scale, "Uniform init half-width times d");
  to.add("optimizer", ta.optimizer, "adam | sgd");
  to.add("precision", ta.precision, "float | double");
  to.add("checkpoint_every", ta.checkpoint_every, "Loss logging interval");
  to.add("seed", ta.seed, "Master seed");
  to.add("runs", ta.runs, "Independent training runs");
  to.add("threads", ta.threads, "Worker threads (default: $HOSGNS_THREADS or 1)");
  to.flag("nondeterministic", ta.nondeterministic, "Multi-threaded gradients, not bit-reproducible");
  to.add("output", ta.output, "Output directory");
  to.add("tensor_out", ta.tensor_out, "Export the tensor as <prefix>.coo + <prefix>.json");
  to.add("supra_out", ta.supra_out, "Export the supra graph as <prefix>.edges + <prefix>.json");

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Evaluate trained embeddings on a downstream task");
  Options eo(evalc);
  eo.add("graph", ea.graph, "Graph JSON from `ingest`");
  eo.add("input", ea.input, "Contact list, parsed on the fly");
  eo.add("window_seconds", ea.window_seconds, "Aggregation window for --input");
  eo.add("embeddings", ea.embeddings, "Directory written by `train`");
  eo.add("task", ea.task, "classify | reconstruct | pmi-check");
  eo.add("operator", ea.op, "average | hadamard | weighted_l1 | weighted_l2 | concat");
  eo.add("splits", ea.splits, "Train/test splits per run");
  eo.add("fraction", ea.fraction, "Train fraction of nodes and of times");
  eo.add("sir", ea.sir, "SIR parameter pairs beta:mu")->expected(1, -1);
  eo.add("seed", ea.seed, "Master seed");
  eo.add("dataset", ea.dataset, "Dataset name in the report");
  eo.add("max_samples", ea.max_samples, "Support entries sampled by pmi-check");
  eo.add("output", ea.output, "Report path");

  PmiArgs pa;
  auto* pmic = app.add_subcommand("pmi-check", "Compare inner products against shifted PMI");
  Options po(pmic);
  po.flag("planted", pa.planted, "Use a planted low-rank tensor");
  po.add("mode_sizes", pa.mode_sizes, "Planted tensor mode sizes, comma-separated");
  po.add("rank", pa.rank, "Planted CP rank");
  po.add("amplitude", pa.amplitude, "Planted factor amplitude");
  po.add("dim", pa.dim, "Embedding dimension d");
  po.add("kappa", pa.kappa, "Negative-sampling constant");
  po.add("batch", pa.batch, "Positive tuples per batch");
  po.add("lr", pa.lr, "Initial learning rate");
  po.add("iterations", pa.iterations, "Optimizer steps");
  po.add("seed", pa.seed, "Master seed");
  po.add("runs", pa.runs, "Planted instances");
  po.add("graph", pa.graph, "Graph JSON (embedding mode)");
  po.add("input", pa.input, "Contact list (embedding mode)");
  po.add("window_seconds", pa.window_seconds, "Aggregation window for --input");
  po.add("embeddings", pa.embeddings, "Directory written by `train`");
  po.add("max_samples", pa.max_samples, "Support entries sampled");
  po.add("output", pa.output, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      io.apply_config();
      return cmd_ingest(ia, io.resolved(), out);
    }
    if (*trainc) {
      to.apply_config();
      return cmd_train(ta, to.resolved(), out);
    }
    if (*evalc) {
      eo.apply_config();
      return cmd_eval(ea, eo.resolved(), out);
    }
    if (*pmic) {
      po.apply_config();
      return cmd_pmi_check(pa, po.resolved(), out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace hosgns
