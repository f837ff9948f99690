// SPDX-License-Identifier: Apache-2.0
//
// Higher-order skip-gram with negative sampling: exact and mini-batch
// objectives, analytic gradients and the Adam/SGD training loop.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iterator>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "hosgns/cooccurrence.hpp"
#include "hosgns/embedding.hpp"

namespace hosgns {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}

/// log(sigmoid(x)) without overflow.
inline double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

struct LossReport {
  std::int64_t iteration = 0;
  double positive_term = 0.0;
  double negative_term = 0.0;
  double total = 0.0;
};

/// Default cap on the dense index grid visited by exact_loss().
inline constexpr std::size_t kExactLossGridBudget = std::size_t{1} << 24;

/// Full objective
///   -sum_idx [ P_D log s(m) + kappa P_N log s(-m) ]
/// over the dense index grid. Oracle for small instances only.
template <typename Scalar>
LossReport exact_loss(const EmbeddingSet<Scalar>& e, const CooccurrenceTensor& t, double kappa,
                      std::size_t grid_budget = kExactLossGridBudget) {
  const int order = t.order();
  if (e.order() != order) throw DimensionError("embedding order does not match tensor order");
  long double grid = 1.0L;
  for (int n = 0; n < order; ++n) {
    if (e.factors[static_cast<std::size_t>(n)].rows() != t.mode_sizes()[static_cast<std::size_t>(n)])
      throw DimensionError("factor rows do not match tensor mode size");
    grid *= t.mode_sizes()[static_cast<std::size_t>(n)];
  }
  if (grid > static_cast<long double>(grid_budget))
    throw ResourceError("exact loss grid of " + std::to_string(static_cast<double>(grid)) +
                        " points exceeds the oracle budget");

  std::vector<int> idx(static_cast<std::size_t>(order), 0);
  std::size_t support = 0;  // entries are in lexicographic order, as is the odometer
  LossReport r;
  const auto total = static_cast<std::size_t>(grid);
  for (std::size_t g = 0; g < total; ++g) {
    const double m = static_cast<double>(tuple_inner(e, idx.data()));
    double pd = 0.0;
    if (support < t.nnz()) {
      auto s = t.index(support);
      if (std::equal(s.begin(), s.end(), idx.begin())) pd = t.value(support++);
    }
    if (pd > 0.0) r.positive_term -= pd * log_sigmoid(m);
    r.negative_term -= kappa * t.noise(idx) * log_sigmoid(-m);
    for (int n = order - 1; n >= 0; --n) {
      auto& v = idx[static_cast<std::size_t>(n)];
      if (++v < t.mode_sizes()[static_cast<std::size_t>(n)]) break;
      v = 0;
    }
  }
  r.total = r.positive_term + r.negative_term;
  return r;
}

/// One mini-batch: `positives` holds B tuples, `negatives` holds the noise
/// tuples (row-major, `order` ints per tuple).
struct Batch {
  int order = 0;
  std::vector<int> positives;
  std::vector<int> negatives;

  std::size_t num_positives() const noexcept {
    return order ? positives.size() / static_cast<std::size_t>(order) : 0;
  }
  std::size_t num_negatives() const noexcept {
    return order ? negatives.size() / static_cast<std::size_t>(order) : 0;
  }
};

/// Weights of the two sums of the mini-batch objective: 1/B for positives,
/// kappa/|negatives| for negatives. With B negatives this is the usual
/// (1/B)[... + kappa ...] form; with kappa negatives per positive it keeps the
/// estimate unbiased for exact_loss().
struct BatchWeights {
  double positive;
  double negative;
};

inline BatchWeights batch_weights(const Batch& b, double kappa) {
  const auto np = b.num_positives();
  const auto nn = b.num_negatives();
  if (np == 0) throw DomainError("batch has no positive tuples");
  return {1.0 / static_cast<double>(np), nn ? kappa / static_cast<double>(nn) : 0.0};
}

/// Mini-batch estimate of the objective.
template <typename Scalar>
LossReport batch_loss(const EmbeddingSet<Scalar>& e, const Batch& b, double kappa) {
  const auto w = batch_weights(b, kappa);
  LossReport r;
  const auto order = static_cast<std::size_t>(b.order);
  for (std::size_t p = 0; p < b.num_positives(); ++p)
    r.positive_term -= w.positive * log_sigmoid(static_cast<double>(tuple_inner(e, b.positives.data() + p * order)));
  for (std::size_t q = 0; q < b.num_negatives(); ++q)
    r.negative_term -= w.negative * log_sigmoid(-static_cast<double>(tuple_inner(e, b.negatives.data() + q * order)));
  r.total = r.positive_term + r.negative_term;
  return r;
}

namespace detail {

/// Adds coeff * prod_{n' != n} A^(n')[idx_n'] to grads[n].row(idx_n) for all n.
template <typename Scalar>
inline void scatter_tuple(const EmbeddingSet<Scalar>& e, const int* idx, Scalar coeff,
                          std::vector<FactorMatrix<Scalar>>& grads) {
  const auto& f = e.factors;
  switch (e.order()) {
    case 2:
      grads[0].row(idx[0]) += coeff * f[1].row(idx[1]);
      grads[1].row(idx[1]) += coeff * f[0].row(idx[0]);
      return;
    case 3: {
      auto a = f[0].row(idx[0]).array();
      auto b = f[1].row(idx[1]).array();
      auto c = f[2].row(idx[2]).array();
      grads[0].row(idx[0]).array() += coeff * b * c;
      grads[1].row(idx[1]).array() += coeff * a * c;
      grads[2].row(idx[2]).array() += coeff * a * b;
      return;
    }
    case 4: {
      auto a = f[0].row(idx[0]).array();
      auto b = f[1].row(idx[1]).array();
      auto c = f[2].row(idx[2]).array();
      auto d = f[3].row(idx[3]).array();
      grads[0].row(idx[0]).array() += coeff * b * c * d;
      grads[1].row(idx[1]).array() += coeff * a * c * d;
      grads[2].row(idx[2]).array() += coeff * a * b * d;
      grads[3].row(idx[3]).array() += coeff * a * b * c;
      return;
    }
    default: {
      const int order = e.order();
      Eigen::Array<Scalar, 1, Eigen::Dynamic> prod(e.dim());
      for (int n = 0; n < order; ++n) {
        prod.setConstant(coeff);
        for (int o = 0; o < order; ++o)
          if (o != n) prod *= f[static_cast<std::size_t>(o)].row(idx[o]).array();
        grads[static_cast<std::size_t>(n)].row(idx[n]).array() += prod;
      }
    }
  }
}

template <typename Scalar>
inline void check_finite(Scalar m) {
  if (!std::isfinite(static_cast<double>(m))) throw DomainError("non-finite inner product");
}

}  // namespace detail

/// Accumulates the mini-batch gradient into dense per-factor buffers
/// (which the caller zeroes). Positive tuples contribute
/// -(1 - s(m)) / B, negative tuples +s(m) * kappa / |negatives|, each times
/// the product of the other factors' rows. Tuple ranges [pos_begin, pos_end)
/// and [neg_begin, neg_end) allow splitting a batch across workers.
template <typename Scalar>
void accumulate_gradients(const EmbeddingSet<Scalar>& e, const Batch& b, double kappa,
                          std::vector<FactorMatrix<Scalar>>& grads, std::size_t pos_begin,
                          std::size_t pos_end, std::size_t neg_begin, std::size_t neg_end) {
  const auto w = batch_weights(b, kappa);
  const auto order = static_cast<std::size_t>(b.order);
  for (std::size_t p = pos_begin; p < pos_end; ++p) {
    const int* idx = b.positives.data() + p * order;
    const Scalar m = tuple_inner(e, idx);
    detail::check_finite(m);
    const auto coeff = static_cast<Scalar>(-(1.0 - sigmoid(static_cast<double>(m))) * w.positive);
    detail::scatter_tuple(e, idx, coeff, grads);
  }
  for (std::size_t q = neg_begin; q < neg_end; ++q) {
    const int* idx = b.negatives.data() + q * order;
    const Scalar m = tuple_inner(e, idx);
    detail::check_finite(m);
    const auto coeff = static_cast<Scalar>(sigmoid(static_cast<double>(m)) * w.negative);
    detail::scatter_tuple(e, idx, coeff, grads);
  }
}

template <typename Scalar>
void accumulate_gradients(const EmbeddingSet<Scalar>& e, const Batch& b, double kappa,
                          std::vector<FactorMatrix<Scalar>>& grads) {
  accumulate_gradients(e, b, kappa, grads, 0, b.num_positives(), 0, b.num_negatives());
}

/// Gradient restricted to the rows a batch touches.
template <typename Scalar>
struct SparseGradient {
  struct Row {
    int index;
    RowVector<Scalar> value;
  };
  std::vector<std::vector<Row>> factors;  ///< per factor, rows in increasing order

  /// Dense matrix of factor n with the given number of rows.
  FactorMatrix<Scalar> dense(std::size_t n, Eigen::Index rows, Eigen::Index dim) const {
    FactorMatrix<Scalar> m = FactorMatrix<Scalar>::Zero(rows, dim);
    for (const auto& r : factors[n]) m.row(r.index) = r.value;
    return m;
  }
};

template <typename Scalar>
SparseGradient<Scalar> gradients(const EmbeddingSet<Scalar>& e, const Batch& b, double kappa) {
  if (b.order != e.order()) throw DimensionError("batch order does not match embedding order");
  std::vector<FactorMatrix<Scalar>> dense;
  for (const auto& f : e.factors) dense.push_back(FactorMatrix<Scalar>::Zero(f.rows(), f.cols()));
  accumulate_gradients(e, b, kappa, dense);
  SparseGradient<Scalar> g;
  g.factors.resize(dense.size());
  const auto order = static_cast<std::size_t>(b.order);
  for (std::size_t n = 0; n < dense.size(); ++n) {
    std::vector<int> rows;
    for (const auto* tuples : {&b.positives, &b.negatives})
      for (std::size_t t = n; t < tuples->size(); t += order) rows.push_back((*tuples)[t]);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    for (int r : rows) g.factors[n].push_back({r, dense[n].row(r)});
  }
  return g;
}

/// Deterministic mini-batch generator. Positives are drawn from P_D; each
/// positive is followed by `negatives_per_positive` noise tuples that keep
/// its mode-0 index and redraw every other mode from its marginal. The
/// batch is cut into fixed chunks, chunk c of iteration t drawing from its
/// own stream seeded by (seed, t, c).
class BatchSampler {
 public:
  BatchSampler(const CooccurrenceTensor& t, std::uint64_t seed, int batch_size,
               int negatives_per_positive, int chunk_size = 1024)
      : tables_(t), seed_(seed), batch_(batch_size), negatives_(negatives_per_positive),
        chunk_(chunk_size) {
    if (batch_size < 1) throw DomainError("batch size must be >= 1");
    if (negatives_per_positive < 0) throw DomainError("negatives per positive must be >= 0");
    if (chunk_size < 1) throw DomainError("chunk size must be >= 1");
  }

  int order() const noexcept { return tables_.tensor->order(); }
  int batch_size() const noexcept { return batch_; }
  int negatives_per_positive() const noexcept { return negatives_; }

  void sample(std::int64_t iteration, Batch& out) const {
    const auto order = static_cast<std::size_t>(this->order());
    out.order = static_cast<int>(order);
    out.positives.resize(static_cast<std::size_t>(batch_) * order);
    out.negatives.resize(static_cast<std::size_t>(batch_) * static_cast<std::size_t>(negatives_) * order);
    const auto& tensor = *tables_.tensor;
    for (int c0 = 0, chunk = 0; c0 < batch_; c0 += chunk_, ++chunk) {
      std::mt19937_64 rng(derive_seed(seed_, static_cast<std::uint64_t>(iteration),
                                      static_cast<std::uint64_t>(chunk)));
      const int c1 = std::min(batch_, c0 + chunk_);
      for (int p = c0; p < c1; ++p) {
        int* pos = out.positives.data() + static_cast<std::size_t>(p) * order;
        const auto entry = tables_.entries(rng);
        auto idx = tensor.index(entry);
        std::copy(idx.begin(), idx.end(), pos);
        for (int q = 0; q < negatives_; ++q) {
          int* neg = out.negatives.data() +
                     (static_cast<std::size_t>(p) * static_cast<std::size_t>(negatives_) +
                      static_cast<std::size_t>(q)) * order;
          neg[0] = pos[0];
          for (std::size_t n = 1; n < order; ++n) neg[n] = static_cast<int>(tables_.modes[n](rng));
        }
      }
    }
  }

 private:
  TensorSamplingTables tables_;
  std::uint64_t seed_;
  int batch_;
  int negatives_;
  int chunk_;
};

enum class Optimizer { Adam, Sgd };

struct TrainConfig {
  int dim = 128;
  double kappa = 5.0;
  int batch = 50000;
  double lr_start = 0.05;
  int iterations = 10000;
  std::uint64_t seed = 1;
  double init_scale = 0.5;
  Optimizer optimizer = Optimizer::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool deterministic = true;
  int threads = 1;
  int checkpoint_every = 100;

  /// round(kappa), at least one.
  int negatives_per_positive() const { return std::max(1, static_cast<int>(std::lround(kappa))); }

  void validate() const {
    if (dim < 1) throw DomainError("dim must be >= 1");
    if (!(kappa >= 1.0)) throw DomainError("kappa must be >= 1");
    if (batch < 1) throw DomainError("batch must be >= 1");
    if (!(lr_start > 0.0)) throw DomainError("lr_start must be positive");
    if (iterations < 1) throw DomainError("iterations must be >= 1");
    if (!(init_scale > 0.0)) throw DomainError("init_scale must be positive");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0))
      throw DomainError("adam betas must lie in (0, 1)");
    if (!(adam_eps > 0.0)) throw DomainError("adam_eps must be positive");
    if (threads < 1) throw DomainError("threads must be >= 1");
    if (checkpoint_every < 0) throw DomainError("checkpoint_every must be >= 0");
  }
};

/// Linearly decaying learning rate: lr_start * (1 - t / iterations).
inline double learning_rate(const TrainConfig& cfg, std::int64_t iteration) {
  return cfg.lr_start * (1.0 - static_cast<double>(iteration) / cfg.iterations);
}

struct StepInfo {
  std::int64_t iteration;
  double lr;
  const Batch* batch;
  /// Loss of this step's batch before the update; null unless computed.
  const LossReport* loss;
};

using StepObserver = std::function<void(const StepInfo&)>;

template <typename Scalar>
struct TrainResult {
  EmbeddingSet<Scalar> embeddings;
  std::vector<LossReport> checkpoints;
  std::vector<double> checkpoint_lr;
};

/// Standard roles of an order-N tensor factorization when the tensor does
/// not carry them: W, C, T, S.
inline std::vector<Role> default_roles(int order) {
  static constexpr Role all[] = {Role::Node, Role::Context, Role::Time, Role::ContextTime};
  std::vector<Role> r;
  for (int n = 0; n < order; ++n) r.push_back(all[std::min(n, 3)]);
  return r;
}

/// Trains factor matrices on `t`. The observer, when set, sees every step;
/// `loss_every_step` forces a batch-loss evaluation on each step (otherwise
/// only at checkpoints).
template <typename Scalar>
TrainResult<Scalar> train(const CooccurrenceTensor& t, const TrainConfig& cfg,
                          const StepObserver& observer = {}, bool loss_every_step = false) {
  cfg.validate();
  const int order = t.order();
  TrainResult<Scalar> result;
  result.embeddings = EmbeddingSet<Scalar>::uniform(t.mode_sizes(), t.roles(), cfg.dim, cfg.init_scale,
                                                    derive_seed(cfg.seed, "init"));
  auto& e = result.embeddings;
  BatchSampler sampler(t, derive_seed(cfg.seed, "batches"), cfg.batch, cfg.negatives_per_positive());

  std::vector<FactorMatrix<Scalar>> grads, m1, m2;
  for (const auto& f : e.factors) {
    grads.push_back(FactorMatrix<Scalar>::Zero(f.rows(), f.cols()));
    m1.push_back(FactorMatrix<Scalar>::Zero(f.rows(), f.cols()));
    m2.push_back(FactorMatrix<Scalar>::Zero(f.rows(), f.cols()));
  }
  const int workers = cfg.deterministic ? 1 : cfg.threads;
  std::vector<std::vector<FactorMatrix<Scalar>>> partial(static_cast<std::size_t>(workers > 1 ? workers : 0), grads);

  Batch batch;
  double beta1_pow = 1.0, beta2_pow = 1.0;
  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    const double lr = learning_rate(cfg, it);
    sampler.sample(it, batch);

    LossReport loss;
    const bool checkpoint = cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0;
    const bool want_loss = loss_every_step || checkpoint || it + 1 == cfg.iterations;
    if (want_loss) {
      loss = batch_loss(e, batch, cfg.kappa);
      loss.iteration = it;
      if (!std::isfinite(loss.total)) throw DivergenceError(it, lr);
      if (checkpoint || it + 1 == cfg.iterations) {
        result.checkpoints.push_back(loss);
        result.checkpoint_lr.push_back(lr);
      }
    }
    if (observer) observer(StepInfo{it, lr, &batch, want_loss ? &loss : nullptr});

    for (auto& g : grads) g.setZero();
    try {
      if (workers == 1) {
        accumulate_gradients(e, batch, cfg.kappa, grads);
      } else {
        const auto np = batch.num_positives();
        const auto nn = batch.num_negatives();
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            const auto uw = static_cast<std::size_t>(w);
            const auto uk = static_cast<std::size_t>(workers);
            try {
              auto& local = partial[uw];
              for (auto& g : local) g.setZero();
              accumulate_gradients(e, batch, cfg.kappa, local, np * uw / uk, np * (uw + 1) / uk,
                                   nn * uw / uk, nn * (uw + 1) / uk);
            } catch (...) {
              failures[uw] = std::current_exception();
            }
          });
        }
        for (auto& th : pool) th.join();
        for (auto& f : failures)
          if (f) std::rethrow_exception(f);
        for (const auto& local : partial)
          for (std::size_t n = 0; n < grads.size(); ++n) grads[n] += local[n];
      }
    } catch (const DomainError&) {
      throw DivergenceError(it, lr);
    }

    if (cfg.optimizer == Optimizer::Sgd) {
      for (int n = 0; n < order; ++n)
        e.factors[static_cast<std::size_t>(n)] -= static_cast<Scalar>(lr) * grads[static_cast<std::size_t>(n)];
      continue;
    }
    beta1_pow *= cfg.adam_beta1;
    beta2_pow *= cfg.adam_beta2;
    const auto b1 = static_cast<Scalar>(cfg.adam_beta1);
    const auto b2 = static_cast<Scalar>(cfg.adam_beta2);
    const auto step = static_cast<Scalar>(lr / (1.0 - beta1_pow));
    const auto v_scale = static_cast<Scalar>(1.0 / (1.0 - beta2_pow));
    const auto eps = static_cast<Scalar>(cfg.adam_eps);
    for (std::size_t n = 0; n < grads.size(); ++n) {
      auto g = grads[n].array();
      m1[n].array() = b1 * m1[n].array() + (Scalar(1) - b1) * g;
      m2[n].array() = b2 * m2[n].array() + (Scalar(1) - b2) * g.square();
      e.factors[n].array() -= step * m1[n].array() / ((m2[n].array() * v_scale).sqrt() + eps);
    }
  }
  if (!e.all_finite()) throw DivergenceError(cfg.iterations, learning_rate(cfg, cfg.iterations - 1));
  return result;
}

double pearson_r2(std::span<const double> x, std::span<const double> y);

struct SpmiReconstruction {
  std::vector<double> spmi;
  std::vector<double> inner;
  double r2 = 0.0;
  double max_abs_error = 0.0;
};

/// Pairs (SPMI_kappa(idx), [[...]](idx)) over support entries: all of them
/// when nnz <= max_samples, else a uniform sample without replacement.
template <typename Scalar>
SpmiReconstruction reconstruct_spmi(const EmbeddingSet<Scalar>& e, const CooccurrenceTensor& t,
                                    double kappa, std::size_t max_samples = 1'000'000,
                                    std::uint64_t seed = 1) {
  if (e.order() != t.order()) throw DimensionError("embedding order does not match tensor order");
  std::vector<std::size_t> entries(t.nnz());
  for (std::size_t k = 0; k < entries.size(); ++k) entries[k] = k;
  if (entries.size() > max_samples) {
    std::vector<std::size_t> picked;
    picked.reserve(max_samples);
    std::mt19937_64 rng(seed);
    std::sample(entries.begin(), entries.end(), std::back_inserter(picked), max_samples, rng);
    entries.swap(picked);
  }
  SpmiReconstruction r;
  r.spmi.reserve(entries.size());
  r.inner.reserve(entries.size());
  std::vector<int> idx(static_cast<std::size_t>(t.order()));
  for (auto k : entries) {
    auto s = t.index(k);
    std::copy(s.begin(), s.end(), idx.begin());
    r.spmi.push_back(spmi(t, idx, {kappa}));
    r.inner.push_back(static_cast<double>(tuple_inner(e, idx.data())));
    r.max_abs_error = std::max(r.max_abs_error, std::abs(r.spmi.back() - r.inner.back()));
  }
  r.r2 = pearson_r2(r.spmi, r.inner);
  return r;
}

struct SgnsReductionReport {
  double max_abs_error = 0.0;
  double r2 = 0.0;
  std::size_t num_entries = 0;
  EmbeddingSet<double> embeddings;
};

/// Trains an order-2 tensor and compares W C^T with SPMI_kappa on the support.
SgnsReductionReport sgns_reduction_check(const CooccurrenceTensor& pairs, const TrainConfig& cfg);

struct PlantedTensor {
  CooccurrenceTensor tensor;
  EmbeddingSet<double> planted;  ///< factors whose CP product is the log-linear part
  double fixed_point_residual = 0.0;
};

/// Full-support probability tensor with log(P / prod_n P_n) = [[planted]]
/// exactly. The random starting factors are adjusted together with the
/// marginals by Gauss-Newton until the identity holds to round-off; the
/// start is redrawn when a solve stalls. Throws DegenerateError when no
/// start converges (typical with two modes of size 2).
PlantedTensor planted_cp_tensor(std::span<const int> mode_sizes, int rank, double amplitude,
                                std::uint64_t seed);

}  // namespace hosgns
