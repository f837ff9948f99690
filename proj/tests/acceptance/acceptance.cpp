// Acceptance checks. Prints one line per criterion:
//   criterion <n> <PASS|FAIL> <name>: <detail> [<seconds> s]
// Arguments select criteria by number; default is all of them.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hosgns/cli.hpp"
#include "hosgns/cooccurrence.hpp"
#include "hosgns/eval.hpp"
#include "hosgns/hosgns.hpp"
#include "hosgns/supra_adjacency.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hosgns;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 3) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string lh10_contacts() { return std::string(HOSGNS_DATA_DIR) + "/lh10/contacts.txt"; }

TimeVaryingGraph lh10() {
  std::ifstream in(lh10_contacts());
  return parse_contact_lines(in, 600);
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "hosgns");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << "hosgns " << args[1] << " exited " << code << ": " << e.str();
  return code;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("hosgns_accept_" + std::to_string(::getpid()) + "_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string threads_arg() { return std::to_string(std::max(1u, std::thread::hardware_concurrency())); }

// 1 -----------------------------------------------------------------------

Outcome gradient_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(1, 4), dim(1, 3), kap(1, 5);
  double worst = 0.0;
  int count = 0;
  for (int order : {2, 3, 4}) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<int> sizes;
      for (int n = 0; n < order; ++n) sizes.push_back(size(rng));
      const auto t = oracle::random_tensor(rng, sizes, 0.5);
      const int d = dim(rng);
      const double kappa = kap(rng);
      const auto e = EmbeddingSet<double>::uniform(t.mode_sizes(), t.roles(), d, 2.0 * d, rng());
      BatchSampler sampler(t, rng(), 8, static_cast<int>(kappa));
      Batch b;
      sampler.sample(0, b);
      const auto g = gradients(e, b, kappa);
      std::vector<FactorMatrix<double>> analytic;
      for (std::size_t n = 0; n < e.factors.size(); ++n)
        analytic.push_back(g.dense(n, e.factors[n].rows(), e.dim()));
      const auto numeric = oracle::fd_gradient(
          e, [&](const EmbeddingSet<double>& x) { return oracle::batch_loss(x, b, kappa); });
      worst = std::max(worst, oracle::relative_error(analytic, numeric));
      ++count;
    }
  }
  return {worst < 1e-4, std::to_string(count) + " instances, max relative error " + fmt(worst)};
}

// 2 -----------------------------------------------------------------------

Outcome zero_embedding() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int order : {2, 3, 4}) {
    const auto t = oracle::random_tensor(rng, std::vector<int>(static_cast<std::size_t>(order), 3), 0.4);
    const auto zero = EmbeddingSet<double>::zeros(t.mode_sizes(), t.roles(), 3);
    for (double kappa : {1.0, 5.0})
      worst = std::max(worst, std::abs(exact_loss(zero, t, kappa).total - (1.0 + kappa) * std::log(2.0)));
  }
  return {worst < 1e-9, "max |loss - (1+kappa) log 2| = " + fmt(worst)};
}

// 3 -----------------------------------------------------------------------

Outcome spmi_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> sizes{4, 5, 3};
  double worst_err = 0.0, worst_r2 = 1.0;
  bool all = true;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const auto seed = derive_seed(1, "run", r);
    const auto planted = planted_cp_tensor(sizes, 2, 3.0, derive_seed(seed, "planted"));
    TrainConfig cfg;
    cfg.dim = 4;
    cfg.kappa = 1.0;
    cfg.batch = 5000;
    cfg.lr_start = 0.03;
    cfg.iterations = 8000;
    cfg.seed = seed;
    const auto trained = train<double>(planted.tensor, cfg);
    const auto rec = reconstruct_spmi(trained.embeddings, planted.tensor, 1.0);
    worst_err = std::max(worst_err, rec.max_abs_error);
    worst_r2 = std::min(worst_r2, rec.r2);
    all = all && rec.max_abs_error < 0.05 && rec.r2 > 0.99;
  }
  const double secs = seconds_since(t0);
  return {all && secs < 60.0, "5 seeds, max error " + fmt(worst_err) + ", min R^2 " + fmt(worst_r2, 5) +
                                  ", " + fmt(secs) + " s (limit 60)"};
}

// 4 -----------------------------------------------------------------------

// Plain SGNS with Adam on word/context matrices, written without the
// library's trainer.
std::vector<double> hand_sgns(const CooccurrenceTensor& t, const TrainConfig& cfg) {
  const auto init = EmbeddingSet<double>::uniform(t.mode_sizes(), t.roles(), cfg.dim, cfg.init_scale,
                                                  derive_seed(cfg.seed, "init"));
  const int d = cfg.dim;
  std::vector<std::vector<double>> W(static_cast<std::size_t>(t.mode_sizes()[0]), std::vector<double>(d));
  std::vector<std::vector<double>> C(static_cast<std::size_t>(t.mode_sizes()[1]), std::vector<double>(d));
  for (std::size_t i = 0; i < W.size(); ++i)
    for (int r = 0; r < d; ++r) W[i][r] = init.factors[0](static_cast<Eigen::Index>(i), r);
  for (std::size_t j = 0; j < C.size(); ++j)
    for (int r = 0; r < d; ++r) C[j][r] = init.factors[1](static_cast<Eigen::Index>(j), r);
  auto mW = W, vW = W, mC = C, vC = C;
  for (auto* m : {&mW, &vW, &mC, &vC})
    for (auto& row : *m) std::fill(row.begin(), row.end(), 0.0);

  BatchSampler sampler(t, derive_seed(cfg.seed, "batches"), cfg.batch, cfg.negatives_per_positive());
  Batch b;
  std::vector<double> losses;
  double b1t = 1.0, b2t = 1.0;
  for (int it = 0; it < cfg.iterations; ++it) {
    sampler.sample(it, b);
    const double lr = cfg.lr_start * (1.0 - static_cast<double>(it) / cfg.iterations);
    auto gW = W, gC = C;
    for (auto* m : {&gW, &gC})
      for (auto& row : *m) std::fill(row.begin(), row.end(), 0.0);
    const double np = static_cast<double>(b.positives.size() / 2);
    const double nn = static_cast<double>(b.negatives.size() / 2);
    double pos = 0.0, neg = 0.0;
    auto visit = [&](const std::vector<int>& tuples, bool positive) {
      for (std::size_t q = 0; q < tuples.size(); q += 2) {
        const int i = tuples[q], j = tuples[q + 1];
        double dot = 0.0;
        for (int r = 0; r < d; ++r) dot += W[i][r] * C[j][r];
        const double s = 1.0 / (1.0 + std::exp(-dot));
        double coeff;
        if (positive) {
          pos -= oracle::log_sigmoid(dot) / np;
          coeff = -(1.0 - s) / np;
        } else {
          neg -= cfg.kappa * oracle::log_sigmoid(-dot) / nn;
          coeff = cfg.kappa * s / nn;
        }
        for (int r = 0; r < d; ++r) {
          gW[i][r] += coeff * C[j][r];
          gC[j][r] += coeff * W[i][r];
        }
      }
    };
    visit(b.positives, true);
    visit(b.negatives, false);
    losses.push_back(pos + neg);
    b1t *= cfg.adam_beta1;
    b2t *= cfg.adam_beta2;
    auto adam = [&](std::vector<std::vector<double>>& x, std::vector<std::vector<double>>& g,
                    std::vector<std::vector<double>>& m, std::vector<std::vector<double>>& v) {
      for (std::size_t a = 0; a < x.size(); ++a)
        for (int r = 0; r < d; ++r) {
          m[a][r] = cfg.adam_beta1 * m[a][r] + (1.0 - cfg.adam_beta1) * g[a][r];
          v[a][r] = cfg.adam_beta2 * v[a][r] + (1.0 - cfg.adam_beta2) * g[a][r] * g[a][r];
          const double mh = m[a][r] / (1.0 - b1t);
          const double vh = v[a][r] / (1.0 - b2t);
          x[a][r] -= lr * mh / (std::sqrt(vh) + cfg.adam_eps);
        }
    };
    adam(W, gW, mW, vW);
    adam(C, gC, mC, vC);
  }
  return losses;
}

Outcome sgns_reduction() {
  std::mt19937_64 rng(404);
  // node-context co-occurrences of a static graph
  const auto g = oracle::to_graph(oracle::random_events(rng, 12, 1, 0.4));
  const auto stat = stat_tensor(g);
  std::vector<std::int32_t> idx;
  std::vector<double> w;
  for (std::size_t e = 0; e < stat.nnz(); ++e) {
    auto x = stat.index(e);
    idx.push_back(x[0]);
    idx.push_back(x[1]);
    w.push_back(stat.value(e));
  }
  const int n = g.num_nodes();
  const auto pairs = CooccurrenceTensor::from_weights({n, n}, {Role::Node, Role::Context}, idx, w);
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.kappa = 5.0;
  cfg.batch = 256;
  cfg.iterations = 300;
  cfg.lr_start = 0.05;
  cfg.seed = 77;
  std::vector<double> lib;
  train<double>(pairs, cfg, [&](const StepInfo& s) { lib.push_back(s.loss->total); }, true);
  const auto hand = hand_sgns(pairs, cfg);
  double worst = 0.0;
  for (std::size_t k = 0; k < lib.size(); ++k) worst = std::max(worst, std::abs(lib[k] - hand[k]));
  const bool same_len = lib.size() == hand.size() && lib.size() == static_cast<std::size_t>(cfg.iterations);
  return {same_len && worst < 1e-9, std::to_string(lib.size()) + " steps, max |loss difference| " + fmt(worst) +
                                        ", loss " + fmt(lib.front(), 5) + " -> " + fmt(lib.back(), 5)};
}

// 5 -----------------------------------------------------------------------

Outcome tensor_correctness() {
  double sum_err = 0.0, path_err = 0.0, pmi_err = 0.0;
  std::size_t path_checked = 0, pmi_checked = 0, tensors = 0;
  auto mass = [&](const CooccurrenceTensor& t) {
    double s = 0.0;
    for (std::size_t e = 0; e < t.nnz(); ++e) s += t.value(e);
    sum_err = std::max(sum_err, std::abs(s - 1.0));
    ++tensors;
  };
  mass(stat_tensor(lh10()));
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::mt19937_64 rng(seed);
    const auto g = oracle::to_graph(oracle::random_events(rng, 3 + seed % 4, 2 + seed % 4, 0.4));
    const auto s = build_supra(g);
    mass(stat_tensor(g));
    if (s.volume() == 0.0) continue;
    for (int window : {1, 3}) {
      const auto dyn = dyn_tensor(s, window);
      mass(dyn);
      mass(statdyn_tensor(stat_tensor(g), dyn));
      if (s.size() <= 20) {
        for (const auto& [idx, v] : oracle::dyn_by_paths(oracle::dense_walk(g), window)) {
          path_err = std::max(path_err, std::abs(dyn.at(idx) - v));
          ++path_checked;
        }
      }
      const auto p = stationary_distribution(s).p;
      for (std::size_t e = 0; e < dyn.nnz(); ++e) {
        auto idx = dyn.index(e);
        const int a = s.flat(idx[0], idx[2]);
        const int b = s.flat(idx[1], idx[3]);
        const double lhs = std::log(dyn.value(e) / (p[a] * p[b]));
        pmi_err = std::max(pmi_err, std::abs(lhs - deepwalk_expected_pmi(s.adjacency(), a, b, window)));
        ++pmi_checked;
      }
    }
  }
  const bool pass = sum_err < 1e-9 && path_err < 1e-9 && pmi_err < 1e-9 && path_checked > 0 && pmi_checked > 0;
  return {pass, std::to_string(tensors) + " tensors, max |sum - 1| " + fmt(sum_err) + "; " +
                    std::to_string(path_checked) + " path entries, max error " + fmt(path_err) + "; " +
                    std::to_string(pmi_checked) + " PMI entries, max error " + fmt(pmi_err)};
}

// 6 -----------------------------------------------------------------------

Outcome monte_carlo() {
  std::mt19937_64 rng(606);
  const auto t = oracle::random_tensor(rng, {4, 5, 3}, 0.5);
  const auto e = EmbeddingSet<double>::uniform(t.mode_sizes(), t.roles(), 3, 4.0, 9);
  const double kappa = 5.0;
  BatchSampler sampler(t, 10, 1000, 5);
  Batch b;
  std::vector<double> xs;
  for (int it = 0; it < 200; ++it) {
    sampler.sample(it, b);
    xs.push_back(batch_loss(e, b, kappa).total);
  }
  double mean = 0.0, var = 0.0;
  for (double x : xs) mean += x / static_cast<double>(xs.size());
  for (double x : xs) var += (x - mean) * (x - mean) / static_cast<double>(xs.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(xs.size()));
  const double exact = oracle::exact_loss(e, oracle::dense(t), kappa);
  const double z = std::abs(mean - exact) / se;
  return {z < 3.0, "mean " + fmt(mean, 6) + " vs exact " + fmt(exact, 6) + ", " + fmt(z) + " standard errors"};
}

// 7 -----------------------------------------------------------------------

Outcome supra_rules() {
  std::mt19937_64 rng(707);
  int bad_graphs = 0, bad_walk_steps = 0;
  std::size_t edges = 0, steps = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = oracle::to_graph(oracle::random_events(rng, 3 + rep % 6, 2 + rep % 7, 0.35));
    const auto s = build_supra(g);
    std::map<oracle::SupraKey, double> lib;
    for (int a = 0; a < s.adjacency().outerSize(); ++a)
      for (SparseMatrix::InnerIterator it(s.adjacency(), a); it; ++it) {
        const auto& na = s.unflat(a);
        const auto& nb = s.unflat(static_cast<int>(it.col()));
        if (a < it.col()) lib[oracle::unordered({na.node, na.time}, {nb.node, nb.time})] = it.value();
      }
    const auto expected = oracle::supra_edges(g);
    edges += lib.size();
    if (lib.size() != expected.size()) {
      ++bad_graphs;
    } else {
      for (const auto& [k, v] : expected) {
        auto it = lib.find(k);
        if (it == lib.end() || std::abs(it->second - v) > 1e-12) {
          ++bad_graphs;
          break;
        }
      }
    }
    if (s.volume() == 0.0) continue;
    WalkConfig wc;
    wc.walks_per_node = 2;
    wc.walk_length = 20;
    wc.seed = rng();
    for (const auto& w : sample_walks(s, wc))
      for (std::size_t n = 1; n < w.size(); ++n) {
        ++steps;
        if (s.unflat(w[n]).time == s.unflat(w[n - 1]).time) ++bad_walk_steps;
      }
  }
  return {bad_graphs == 0 && bad_walk_steps == 0 && steps > 0,
          "100 graphs, " + std::to_string(edges) + " edges, " + std::to_string(bad_graphs) +
              " mismatching graphs; " + std::to_string(steps) + " walk steps, " + std::to_string(bad_walk_steps) +
              " without a time change"};
}

// 8 -----------------------------------------------------------------------

Outcome lh10_reconstruction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = scratch("c8");
  const std::string emb = (dir / "stat").string();
  if (cli({"train", "--input", lh10_contacts(), "--tensor", "stat", "--dim", "192", "--runs", "5", "--seed", "1",
           "--threads", threads_arg(), "--output", emb}) != 0)
    return {false, "train failed"};
  if (cli({"eval", "--input", lh10_contacts(), "--embeddings", emb, "--task", "reconstruct", "--operator",
           "hadamard", "--splits", "10", "--seed", "1", "--output", (dir / "report.json").string()}) != 0)
    return {false, "eval failed"};
  const auto rep = load_json(dir / "report.json");
  const double secs = seconds_since(t0);
  fs::remove_all(dir);
  const double f1 = rep.at("macro_f1_mean").get<double>();
  return {f1 >= 0.95 && secs < 1800.0,
          "Macro-F1 " + fmt(f1, 4) + " +- " + fmt(rep.at("macro_f1_std").get<double>(), 2) + " over " +
              std::to_string(rep.at("n_runs").get<int>()) + " runs x " + std::to_string(rep.at("n_splits").get<int>()) +
              " splits (need >= 0.95); " + fmt(secs, 4) + " s with " + threads_arg() + " thread(s) (limit 1800)"};
}

// 9 -----------------------------------------------------------------------

Outcome lh10_classification() {
  const auto dir = scratch("c9");
  std::map<std::string, double> f1;
  for (const std::string tensor : {"dyn", "stat"}) {
    const std::string emb = (dir / tensor).string();
    if (cli({"train", "--input", lh10_contacts(), "--tensor", tensor, "--dim", "128", "--window", "10", "--runs", "5",
             "--seed", "1", "--threads", threads_arg(), "--output", emb}) != 0)
      return {false, "train " + tensor + " failed"};
    const auto report = dir / (tensor + ".json");
    if (cli({"eval", "--input", lh10_contacts(), "--embeddings", emb, "--task", "classify", "--operator", "hadamard",
             "--sir", "0.25:0.002", "--splits", "10", "--seed", "1", "--output", report.string()}) != 0)
      return {false, "eval " + tensor + " failed"};
    f1[tensor] = load_json(report).at("macro_f1_mean").get<double>();
  }
  fs::remove_all(dir);
  const double gap = f1["dyn"] - f1["stat"];
  return {gap >= 0.05, "dyn " + fmt(f1["dyn"], 4) + " vs stat " + fmt(f1["stat"], 4) + ", gap " + fmt(gap, 3) +
                           " (need >= 0.05)"};
}

// 10 ----------------------------------------------------------------------

Outcome sir_invariants() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto big = lh10();
  int violations = 0, trajectories = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const bool use_big = rep % 10 == 0;
    const auto g = use_big ? big : oracle::to_graph(oracle::random_events(rng, 3 + rep % 10, 2 + rep % 12, 0.3));
    SirConfig cfg;
    cfg.beta = u(rng);
    cfg.mu = u(rng) * 0.5;
    cfg.seed = rng();
    const auto s = sir_simulate(g, cfg);
    ++trajectories;
    for (int k = 0; k < g.num_times(); ++k) {
      int total = 0;
      for (int v = 0; v < g.num_nodes(); ++v) {
        const auto now = s.state(v, k);
        total += now == SirState::S || now == SirState::I || now == SirState::R;
        if (k > 0) {
          const auto before = s.state(v, k - 1);
          const bool ok = before == now || (before == SirState::S && now != SirState::S) ||
                          (before == SirState::I && now == SirState::R);
          violations += !ok;
        }
      }
      violations += total != g.num_nodes();
    }
  }
  return {violations == 0, std::to_string(trajectories) + " trajectories, " + std::to_string(violations) +
                               " violations"};
}

// 11 ----------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& f : fs::recursive_directory_iterator(root)) {
    if (!f.is_regular_file()) continue;
    std::ifstream in(f.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(f.path(), root).string()] = s.str();
  }
  return files;
}

Outcome determinism() {
  const auto dir = scratch("c11");
  const auto work = dir / "work";
  const std::string contacts = lh10_contacts();
  auto p = [&](const std::string& name) { return (work / name).string(); };
  const std::vector<std::pair<std::string, std::vector<std::string>>> stages = {
      {"ingest", {"ingest", "--input", contacts, "--output", p("g.json"), "--stats-output", p("stats.json")}},
      {"train stat", {"train", "--graph", p("g.json"), "--tensor", "stat", "--dim", "8", "--iterations", "200",
                      "--batch", "2000", "--runs", "2", "--threads", "2", "--tensor-out", p("stat_tensor"),
                      "--output", p("stat")}},
      {"train statdyn", {"train", "--graph", p("g.json"), "--tensor", "statdyn", "--window", "2", "--dim", "8",
                         "--iterations", "100", "--batch", "2000", "--runs", "2", "--tensor-out", p("sd_tensor"),
                         "--supra-out", p("supra"), "--output", p("statdyn")}},
      {"train dyn sampled", {"train", "--graph", p("g.json"), "--tensor", "dyn", "--dyn-mode", "sampled",
                             "--walks-per-node", "2", "--walk-length", "20", "--dim", "4", "--iterations", "50",
                             "--batch", "1000", "--output", p("sampled")}},
      {"eval reconstruct", {"eval", "--graph", p("g.json"), "--embeddings", p("stat"), "--task", "reconstruct",
                            "--splits", "3", "--output", p("rec.json")}},
      {"eval classify", {"eval", "--graph", p("g.json"), "--embeddings", p("statdyn"), "--task", "classify",
                         "--splits", "3", "--sir", "0.25:0.002", "0.5:0.01", "--output", p("cls.json")}},
      {"eval pmi-check", {"eval", "--graph", p("g.json"), "--embeddings", p("stat"), "--task", "pmi-check",
                          "--output", p("pmi_eval.json")}},
      {"pmi-check planted", {"pmi-check", "--planted", "--runs", "2", "--iterations", "300", "--output",
                             p("planted.json")}},
  };
  std::vector<std::map<std::string, std::string>> rounds;
  for (int round = 0; round < 2; ++round) {
    fs::remove_all(work);
    fs::create_directories(work);
    for (const auto& [name, args] : stages)
      if (cli(args) != 0) return {false, "stage '" + name + "' failed"};
    rounds.push_back(snapshot(work));
  }
  std::vector<std::string> differing;
  for (const auto& [file, bytes] : rounds[0]) {
    auto it = rounds[1].find(file);
    if (it == rounds[1].end() || it->second != bytes) differing.push_back(file);
  }
  const bool same_set = rounds[0].size() == rounds[1].size();
  fs::remove_all(dir);
  std::string detail = std::to_string(stages.size()) + " stages, " + std::to_string(rounds[0].size()) +
                       " files compared, " + std::to_string(differing.size()) + " differ";
  for (const auto& f : differing) detail += " " + f;
  return {same_set && differing.empty(), detail};
}

struct Criterion {
  int number;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gradient oracle", gradient_oracle},
      {2, "zero-embedding loss", zero_embedding},
      {3, "SPMI recovery", spmi_recovery},
      {4, "SGNS reduction", sgns_reduction},
      {5, "tensor correctness", tensor_correctness},
      {6, "Monte Carlo consistency", monte_carlo},
      {7, "supra-adjacency rules", supra_rules},
      {8, "LH10 event reconstruction", lh10_reconstruction},
      {9, "LH10 node classification ordering", lh10_classification},
      {10, "SIR invariants", sir_invariants},
      {11, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::stoi(argv[a]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << c.number << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << c.name << ": " << o.detail
              << " [" << fmt(seconds_since(t0), 4) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
