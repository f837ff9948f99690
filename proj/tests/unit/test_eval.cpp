#include <doctest.h>

#include <array>
#include <fstream>
#include <random>
#include <set>

#include "hosgns/eval.hpp"
#include "oracles.hpp"

using namespace hosgns;

namespace {

bool valid_trajectory(const TimeVaryingGraph& g, const SirTrajectory& s) {
  for (int k = 0; k < g.num_times(); ++k) {
    if (s.count(k, SirState::S) + s.count(k, SirState::I) + s.count(k, SirState::R) != g.num_nodes()) return false;
    if (k > 0 && s.count(k, SirState::R) < s.count(k - 1, SirState::R)) return false;
  }
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int k = 1; k < g.num_times(); ++k)
      if (static_cast<int>(s.state(v, k)) < static_cast<int>(s.state(v, k - 1))) return false;
  return true;
}

// Two groups of six nodes that only meet within their group, every slice;
// complete inside each group at slice 0.
TimeVaryingGraph two_groups(int slices) {
  std::vector<Event> ev;
  for (int g = 0; g < 2; ++g)
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) ev.push_back({6 * g + a, 6 * g + b, 0, 1.0});
  for (int k = 1; k < slices; ++k)
    for (int g = 0; g < 2; ++g)
      for (int a = 0; a < 6; ++a) ev.push_back({6 * g + a, 6 * g + (a + 1 + k % 5) % 6, k, 1.0});
  return TimeVaryingGraph::from_events(ev);
}

EmbeddingSet<double> one_hot_groups() {
  EmbeddingSet<double> e;
  e.roles = {Role::Node, Role::Context, Role::Time};
  FactorMatrix<double> w = FactorMatrix<double>::Zero(12, 2);
  for (int v = 0; v < 12; ++v) w(v, v / 6) = 1.0;
  e.factors = {w, FactorMatrix<double>::Ones(12, 2), FactorMatrix<double>::Ones(20, 2)};
  return e;
}

}  // namespace

TEST_CASE("beta = 0 leaves everyone but the seed susceptible") {
  std::mt19937_64 rng(1);
  const auto g = oracle::to_graph(oracle::random_events(rng, 8, 10, 0.3));
  SirConfig cfg;
  cfg.beta = 0.0;
  cfg.mu = 0.1;
  cfg.seed = 4;
  const auto s = sir_simulate(g, cfg);
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int k = 0; k < g.num_times(); ++k)
      if (v != s.seed_node()) CHECK(s.state(v, k) == SirState::S);
}

TEST_CASE("mu = 0 never recovers") {
  std::mt19937_64 rng(2);
  const auto g = oracle::to_graph(oracle::random_events(rng, 8, 10, 0.3));
  SirConfig cfg;
  cfg.beta = 0.7;
  cfg.mu = 0.0;
  const auto s = sir_simulate(g, cfg);
  for (int k = 0; k < g.num_times(); ++k) CHECK(s.count(k, SirState::R) == 0);
}

TEST_CASE("beta = 1 front advances one hop per slice along a path") {
  // 0-1 at t0, 1-2 at t1, 2-3 at t2, then 0-3 at t3
  const auto g = TimeVaryingGraph::from_events({{0, 1, 0, 1.0}, {1, 2, 1, 1.0}, {2, 3, 2, 1.0}, {0, 3, 3, 1.0}});
  SirConfig cfg;
  cfg.beta = 1.0;
  cfg.mu = 0.0;
  cfg.initial_infected = 0;
  const auto s = sir_simulate(g, cfg);
  const std::array<std::array<SirState, 4>, 4> expected{{
      {SirState::I, SirState::I, SirState::S, SirState::S},
      {SirState::I, SirState::I, SirState::I, SirState::S},
      {SirState::I, SirState::I, SirState::I, SirState::I},
      {SirState::I, SirState::I, SirState::I, SirState::I},
  }};
  for (int k = 0; k < 4; ++k)
    for (int v = 0; v < 4; ++v) CHECK(s.state(v, k) == expected[k][v]);
  // infection travels forward in time only
  cfg.initial_infected = 3;
  const auto back = sir_simulate(g, cfg);
  CHECK(back.state(0, 1) == SirState::S);
  CHECK(back.state(2, 2) == SirState::I);
  CHECK(back.state(1, 2) == SirState::S);
}

TEST_CASE("SIR trajectories conserve nodes and move S -> I -> R") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto g = oracle::to_graph(oracle::random_events(rng, 3 + rep % 8, 2 + rep % 9, 0.3));
    SirConfig cfg;
    cfg.beta = (rep % 5) / 4.0;
    cfg.mu = (rep % 3) / 4.0;
    cfg.seed = rng();
    const auto s = sir_simulate(g, cfg);
    CHECK(valid_trajectory(g, s));
    const auto again = sir_simulate(g, cfg);
    for (int k = 0; k < g.num_times(); ++k)
      for (int v = 0; v < g.num_nodes(); ++v) CHECK(s.state(v, k) == again.state(v, k));
  }
  SirConfig bad;
  bad.beta = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("conditioned SIR keeps an infection alive at half time") {
  const auto g = two_groups(20);
  SirConfig cfg;
  cfg.beta = 0.3;
  cfg.mu = 0.3;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto c = sir_simulate_conditioned(g, cfg);
    CHECK(c.trajectory.count(10, SirState::I) >= 1);
  }
  cfg.mu = 1.0;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(sir_simulate_conditioned(g, cfg, 5), DegenerateError);
}

TEST_CASE("operators follow the published table") {
  EmbeddingSet<double> e;
  e.roles = {Role::Node, Role::Context, Role::Time};
  FactorMatrix<double> w(1, 2), c(2, 2), t(1, 2);
  w << 1, 2;
  c << 3, 4, 5, 6;
  t << 7, 8;
  e.factors = {w, c, t};
  auto v = [&](Operator op, Target tg, std::vector<int> idx) { return combine(op, e, tg, idx); };
  const auto cls = Target::Classification;
  const auto rec = Target::Reconstruction;
  CHECK(v(Operator::Hadamard, cls, {0, 0}) == Eigen::Vector2d(21, 64));
  CHECK(v(Operator::Average, cls, {0, 0}) == Eigen::Vector2d(4, 5));
  CHECK(v(Operator::WeightedL1, cls, {0, 0}) == Eigen::Vector2d(6, 6));
  CHECK(v(Operator::WeightedL2, cls, {0, 0}) == Eigen::Vector2d(36, 36));
  CHECK(v(Operator::Concat, cls, {0, 0}).size() == 4);
  CHECK(v(Operator::Hadamard, rec, {0, 1, 0}) == Eigen::Vector2d(35, 96));
  CHECK(v(Operator::Average, rec, {0, 1, 0}).isApprox(Eigen::Vector2d(13.0 / 3, 16.0 / 3)));
  CHECK(v(Operator::WeightedL1, rec, {0, 1, 0}).isApprox(Eigen::Vector2d((6 + 4 + 2) / 3.0, (6 + 4 + 2) / 3.0)));
  CHECK(v(Operator::WeightedL2, rec, {0, 1, 0}).isApprox(Eigen::Vector2d((36 + 16 + 4) / 3.0, (36 + 16 + 4) / 3.0)));
  const Eigen::VectorXd cat = v(Operator::Concat, rec, {0, 1, 0});
  CHECK(cat.size() == 6);
  CHECK(cat[2] == 5);

  // order 4: node classification drops the context, reconstruction adds s_k
  EmbeddingSet<double> e4 = e;
  e4.roles.push_back(Role::ContextTime);
  FactorMatrix<double> s(1, 2);
  s << 2, 3;
  e4.factors.push_back(s);
  CHECK(combine(Operator::Hadamard, e4, cls, std::vector<int>{0, 0}) == Eigen::Vector2d(7, 16));
  CHECK(combine(Operator::Hadamard, e4, rec, std::vector<int>{0, 1, 0}) == Eigen::Vector2d(70, 288));

  // an order-2 embedding has no time factor
  EmbeddingSet<double> e2;
  e2.roles = {Role::Node, Role::Context};
  e2.factors = {w, c};
  CHECK_THROWS_AS(combine(Operator::Average, e2, cls, std::vector<int>{0, 0}), DomainError);
}

TEST_CASE("operator properties") {
  EmbeddingSet<double> e;
  e.roles = {Role::Node, Role::Context, Role::Time};
  FactorMatrix<double> w = FactorMatrix<double>::Random(3, 64);
  e.factors = {w, FactorMatrix<double>::Ones(3, 64), w};
  const Eigen::VectorXd h = combine(Operator::Hadamard, e, Target::Reconstruction, std::vector<int>{1, 2, 0});
  CHECK(h.isApprox((w.row(1).array() * w.row(0).array()).matrix().transpose()));
  CHECK(combine(Operator::WeightedL1, e, Target::Classification, std::vector<int>{2, 2}).isZero());
  CHECK(combine(Operator::Concat, e, Target::Reconstruction, std::vector<int>{0, 1, 2}).size() == 192);
  CHECK(feature_dim(Operator::Concat, e, Target::Reconstruction) == 192);
  CHECK(operator_from_name("weighted_l2") == Operator::WeightedL2);
  CHECK_THROWS_WITH_AS(operator_from_name("dot"), doctest::Contains("hadamard"), DomainError);
}

TEST_CASE("splits are exhaustive, disjoint and leakage free") {
  std::ifstream in(HOSGNS_DATA_DIR "/lh10/contacts.txt");
  const auto g = parse_contact_lines(in, 600);
  const auto list = make_splits(g, 10, 0.7, 1);
  REQUIRE(list.splits.size() == 10);
  std::set<std::vector<bool>> distinct;
  const auto negatives = negative_events(g, 1);
  for (const auto& s : list.splits) {
    distinct.insert(s.node_train);
    CHECK(std::count(s.node_train.begin(), s.node_train.end(), true) == 53);
    CHECK(std::count(s.time_train.begin(), s.time_train.end(), true) == 307);
    const auto tr = classification_instances(g, s, true);
    const auto ts = classification_instances(g, s, false);
    for (const auto& [i, k] : tr) CHECK((s.node_train[i] && s.time_train[k]));
    for (const auto& [i, k] : ts) CHECK((!s.node_train[i] && !s.time_train[k]));
    std::set<int> train_nodes, test_nodes;
    for (const auto& x : tr) train_nodes.insert(x.first);
    for (const auto& x : ts) test_nodes.insert(x.first);
    for (int v : train_nodes) CHECK_FALSE(test_nodes.count(v));
    for (const auto& x : reconstruction_instances(g, negatives, s, true))
      CHECK((s.node_train[x.key.i] && s.node_train[x.key.j] && s.time_train[x.key.k]));
    for (const auto& x : reconstruction_instances(g, negatives, s, false))
      CHECK((!s.node_train[x.key.i] && !s.node_train[x.key.j] && !s.time_train[x.key.k]));
  }
  CHECK(distinct.size() == 10);
  CHECK_THROWS_AS(make_split(g, 1.0, 3), DegenerateError);
}

TEST_CASE("negative events avoid E and respect activity") {
  std::ifstream in(HOSGNS_DATA_DIR "/lh10/contacts.txt");
  const auto g = parse_contact_lines(in, 600);
  const auto neg = negative_events(g, 5);
  CHECK(neg.size() == g.num_events());
  std::set<EventKey> seen(neg.begin(), neg.end());
  CHECK(seen.size() == neg.size());
  for (const auto& e : neg) {
    CHECK(e.i < e.j);
    CHECK(g.weight(e.i, e.j, e.k) == 0.0);
    CHECK(g.is_active(e.i, e.k));
    CHECK(g.is_active(e.j, e.k));
  }
  CHECK(negative_events(g, 5) == neg);

  // complete interaction in every slice leaves no room
  const auto full = TimeVaryingGraph::from_events({{0, 1, 0, 1.0}, {0, 2, 0, 1.0}, {1, 2, 0, 1.0}});
  CHECK_THROWS_WITH_AS(negative_events(full, 1), doctest::Contains("deficit 3"), InfeasibleError);
  // barely feasible: the exhaustive fill finds the single candidate
  const auto tight = TimeVaryingGraph::from_events({{0, 1, 0, 1.0}, {1, 2, 0, 1.0}});
  CHECK_THROWS_AS(negative_events(tight, 1), InfeasibleError);
  const auto one = TimeVaryingGraph::from_events({{0, 1, 0, 1.0}, {2, 3, 0, 1.0}});
  CHECK(negative_events(one, 2).size() == 2);
}

TEST_CASE("logistic regression fixtures") {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  const std::vector<int> y{0, 1};
  const auto m = logreg_fit(x, y);
  CHECK(logreg_predict(m, x) == y);

  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(5, 3);
  const std::vector<int> yz{2, 2, 7, 2, 7};
  CHECK(logreg_predict(logreg_fit(zeros, yz), zeros) == std::vector<int>(5, 2));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.5);
  auto blobs = [&](int n, Eigen::MatrixXd& f, std::vector<int>& lab) {
    const double centers[3][2] = {{0, 0}, {4, 0}, {0, 4}};
    f.resize(3 * n, 2);
    lab.clear();
    for (int c = 0; c < 3; ++c)
      for (int s = 0; s < n; ++s) {
        f(c * n + s, 0) = centers[c][0] + noise(rng);
        f(c * n + s, 1) = centers[c][1] + noise(rng);
        lab.push_back(c);
      }
  };
  Eigen::MatrixXd ftr, fts;
  std::vector<int> ltr, lts;
  blobs(100, ftr, ltr);
  blobs(100, fts, lts);
  const auto model = logreg_fit(ftr, ltr);
  const auto pred = logreg_predict(model, fts);
  int correct = 0;
  for (std::size_t n = 0; n < pred.size(); ++n) correct += pred[n] == lts[n];
  CHECK(correct / 300.0 > 0.95);
  for (std::size_t n = 1; n < model.loss_history.size(); ++n)
    CHECK(model.loss_history[n] <= model.loss_history[n - 1]);
  CHECK(model.epochs <= 500);

  CHECK_THROWS_AS(logreg_fit(x, std::vector<int>{1, 1}), DegenerateError);
}

TEST_CASE("macro F1") {
  const std::vector<int> t{0, 1, 2, 1};
  CHECK(macro_f1(t, t) == 1.0);
  CHECK(macro_f1(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 0}) == doctest::Approx(1.0 / 3.0));
  const std::vector<int> p{0, 2, 2, 1};
  const std::vector<int> t2{5, 6, 7, 6}, p2{5, 7, 7, 6};
  CHECK(macro_f1(t, p) == doctest::Approx(macro_f1(t2, p2)));
  const double f = macro_f1(t, p);
  CHECK(f >= 0.0);
  CHECK(f < 1.0);
}

TEST_CASE("one-hot features classify perfectly") {
  const auto g = two_groups(20);
  SirConfig cfg;
  cfg.beta = 1.0;
  cfg.mu = 0.0;
  cfg.initial_infected = 0;
  const auto s = sir_simulate(g, cfg);
  for (int v = 0; v < 12; ++v) CHECK(s.state(v, 0) == (v < 6 ? SirState::I : SirState::S));
  const std::vector<EmbeddingSet<double>> runs{one_hot_groups(), one_hot_groups()};
  const std::vector<SirTrajectory> sir{s, s};
  const auto splits = make_splits(g, 4, 0.7, 3);
  // keep only splits with both groups on both sides
  std::vector<SplitSpec> usable;
  for (const auto& sp : splits.splits) {
    int tr[2] = {0, 0}, ts[2] = {0, 0};
    for (int v = 0; v < 12; ++v) (sp.node_train[v] ? tr : ts)[v / 6]++;
    if (tr[0] && tr[1] && ts[0] && ts[1]) usable.push_back(sp);
  }
  REQUIRE_FALSE(usable.empty());
  const auto r = run_classification(g, runs, sir, usable, Operator::Hadamard);
  CHECK(r.macro_f1_mean == 1.0);
  CHECK(r.macro_f1_std == 0.0);
  const auto j = report_to_json(r);
  CHECK(j.at("task") == "classify");
  CHECK(j.at("n_runs") == 2);
}

TEST_CASE("random features reconstruct at chance level") {
  std::ifstream in(HOSGNS_DATA_DIR "/lh10/contacts.txt");
  const auto g = parse_contact_lines(in, 600);
  EmbeddingSet<double> e;
  e.roles = {Role::Node, Role::Context, Role::Time};
  std::srand(1);
  e.factors = {FactorMatrix<double>::Random(g.num_nodes(), 8), FactorMatrix<double>::Random(g.num_nodes(), 8),
               FactorMatrix<double>::Random(g.num_times(), 8)};
  const std::vector<EmbeddingSet<double>> runs{e};
  const std::vector<std::vector<EventKey>> neg{negative_events(g, 1)};
  const auto splits = make_splits(g, 3, 0.7, 2);
  const auto r = run_reconstruction(g, runs, neg, splits.splits, Operator::Hadamard);
  CHECK(r.macro_f1_mean > 0.35);
  CHECK(r.macro_f1_mean < 0.65);
}

TEST_CASE("mean and sample standard deviation") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto [m, s] = mean_std(x);
  CHECK(m == doctest::Approx(2.5));
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0)));
}
