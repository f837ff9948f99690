// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "hosgns/common.hpp"
#include "hosgns/eval.hpp"

namespace hosgns {

namespace {

constexpr std::array<std::pair<Operator, std::string_view>, 5> kOperators{{
    {Operator::Average, "average"},
    {Operator::Hadamard, "hadamard"},
    {Operator::WeightedL1, "weighted_l1"},
    {Operator::WeightedL2, "weighted_l2"},
    {Operator::Concat, "concat"},
}};

using Row = Eigen::RowVectorXd;

Row row(const EmbeddingSet<double>& e, Role r, int index) {
  const auto& f = e.factor(r);
  if (index < 0 || index >= f.rows())
    throw DimensionError("index " + std::to_string(index) + " outside factor '" +
                         std::string(role_name(r)) + "'");
  return f.row(index);
}

}  // namespace

std::string_view operator_name(Operator op) {
  for (auto [o, n] : kOperators)
    if (o == op) return n;
  return "unknown";
}

Operator operator_from_name(std::string_view name) {
  std::string valid;
  for (auto [o, n] : kOperators) {
    if (n == name) return o;
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw DomainError("unknown operator '" + std::string(name) + "' (valid: " + valid + ")");
}

int feature_dim(Operator op, const EmbeddingSet<double>& e, Target target) {
  if (op != Operator::Concat) return e.dim();
  return e.dim() * (target == Target::Classification ? 2 : 3);
}

Eigen::VectorXd combine(Operator op, const EmbeddingSet<double>& e, Target target,
                        std::span<const int> idx) {
  const int order = e.order();
  if (target == Target::Classification) {
    if (idx.size() != 2) throw DimensionError("classification features take (i, k)");
    const int i = idx[0], k = idx[1];
    const Row w = row(e, Role::Node, i);
    const Row t = row(e, Role::Time, k);
    switch (op) {
      case Operator::Average: return (0.5 * (w + t)).transpose();
      case Operator::Hadamard:
        if (order == 3) return w.cwiseProduct(row(e, Role::Context, i)).cwiseProduct(t).transpose();
        return w.cwiseProduct(t).transpose();
      case Operator::WeightedL1: return (w - t).cwiseAbs().transpose();
      case Operator::WeightedL2: return (w - t).array().square().matrix().transpose();
      case Operator::Concat: {
        Eigen::VectorXd out(w.size() + t.size());
        out << w.transpose(), t.transpose();
        return out;
      }
    }
  } else {
    if (idx.size() != 3) throw DimensionError("reconstruction features take (i, j, k)");
    const int i = idx[0], j = idx[1], k = idx[2];
    const Row w = row(e, Role::Node, i);
    const Row c = row(e, Role::Context, j);
    const Row t = row(e, Role::Time, k);
    switch (op) {
      case Operator::Average: return ((w + c + t) / 3.0).transpose();
      case Operator::Hadamard: {
        Row h = w.cwiseProduct(c).cwiseProduct(t);
        if (order == 4) h = h.cwiseProduct(row(e, Role::ContextTime, k));
        return h.transpose();
      }
      case Operator::WeightedL1:
        return (((w - t).cwiseAbs() + (w - c).cwiseAbs() + (c - t).cwiseAbs()) / 3.0).transpose();
      case Operator::WeightedL2:
        return (((w - t).array().square() + (w - c).array().square() + (c - t).array().square()) / 3.0)
            .matrix()
            .transpose();
      case Operator::Concat: {
        Eigen::VectorXd out(w.size() + c.size() + t.size());
        out << w.transpose(), c.transpose(), t.transpose();
        return out;
      }
    }
  }
  throw DomainError("unknown operator");
}

// Logistic regression -----------------------------------------------------

namespace {

struct Objective {
  double value;
  Eigen::MatrixXd grad_w;
  Eigen::RowVectorXd grad_b;
};

// Mean cross-entropy plus (l2/2)|W|^2; the bias is not penalized.
Objective evaluate(const Eigen::MatrixXd& X, const std::vector<int>& y, const Eigen::MatrixXd& W,
                   const Eigen::RowVectorXd& b, double l2, bool want_grad) {
  const double n = static_cast<double>(X.rows());
  Eigen::MatrixXd Z = X * W;
  Z.rowwise() += b;
  double loss = 0.0;
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    const double m = Z.row(r).maxCoeff();
    Z.row(r).array() = (Z.row(r).array() - m).exp();
    const double s = Z.row(r).sum();
    Z.row(r) /= s;
    loss -= std::log(std::max(Z(r, y[static_cast<std::size_t>(r)]), 1e-300));
  }
  Objective o;
  o.value = loss / n + 0.5 * l2 * W.squaredNorm();
  if (want_grad) {
    for (Eigen::Index r = 0; r < Z.rows(); ++r) Z(r, y[static_cast<std::size_t>(r)]) -= 1.0;
    o.grad_w = X.transpose() * Z / n + l2 * W;
    o.grad_b = Z.colwise().sum() / n;
  }
  return o;
}

}  // namespace

LogRegModel logreg_fit(const Eigen::MatrixXd& features, std::span<const int> labels,
                       const LogRegConfig& cfg) {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw DimensionError("features and labels differ in length");
  LogRegModel m;
  m.classes.assign(labels.begin(), labels.end());
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  if (m.classes.size() < 2) throw DegenerateError("training labels contain a single class");

  std::vector<int> y(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r)
    y[r] = static_cast<int>(std::lower_bound(m.classes.begin(), m.classes.end(), labels[r]) -
                            m.classes.begin());

  const Eigen::Index p = features.cols();
  const Eigen::Index K = static_cast<Eigen::Index>(m.classes.size());
  m.mean = Eigen::RowVectorXd::Zero(p);
  m.scale = Eigen::RowVectorXd::Ones(p);
  if (cfg.standardize) {
    m.mean = features.colwise().mean();
    for (Eigen::Index c = 0; c < p; ++c) {
      const double sd =
          std::sqrt((features.col(c).array() - m.mean(c)).square().mean());
      m.scale(c) = sd > 1e-12 ? sd : 1.0;
    }
  }
  const Eigen::MatrixXd X =
      (features.rowwise() - m.mean).array().rowwise() / m.scale.array();

  m.weights = Eigen::MatrixXd::Zero(p, K);
  m.bias = Eigen::RowVectorXd::Zero(K);
  Objective cur = evaluate(X, y, m.weights, m.bias, cfg.l2, true);
  double step = 1.0;
  for (m.epochs = 0; m.epochs < cfg.max_epochs; ++m.epochs) {
    const double g2 = cur.grad_w.squaredNorm() + cur.grad_b.squaredNorm();
    m.grad_norm = std::sqrt(g2);
    if (m.grad_norm < cfg.grad_tol) break;
    bool accepted = false;
    while (step > 1e-20) {
      Eigen::MatrixXd W = m.weights - step * cur.grad_w;
      Eigen::RowVectorXd b = m.bias - step * cur.grad_b;
      const double f = evaluate(X, y, W, b, cfg.l2, false).value;
      if (f <= cur.value - 1e-4 * step * g2) {
        m.weights = std::move(W);
        m.bias = std::move(b);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    cur = evaluate(X, y, m.weights, m.bias, cfg.l2, true);
    m.loss_history.push_back(cur.value);
    step *= 2.0;
  }
  m.grad_norm = std::sqrt(cur.grad_w.squaredNorm() + cur.grad_b.squaredNorm());
  return m;
}

std::vector<int> logreg_predict(const LogRegModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.weights.rows())
    throw DimensionError("feature width does not match the classifier");
  const Eigen::MatrixXd X =
      (features.rowwise() - model.mean).array().rowwise() / model.scale.array();
  Eigen::MatrixXd Z = X * model.weights;
  Z.rowwise() += model.bias;
  std::vector<int> out(static_cast<std::size_t>(Z.rows()));
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    Eigen::Index best;
    Z.row(r).maxCoeff(&best);
    out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

double macro_f1(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("label vectors differ in length");
  if (truth.empty()) throw DimensionError("macro_f1 of an empty label set");
  struct Counts { std::size_t tp = 0, fp = 0, fn = 0; };
  std::map<int, Counts> per;
  for (int t : truth) per[t];
  for (std::size_t r = 0; r < truth.size(); ++r) {
    if (truth[r] == predicted[r]) {
      ++per[truth[r]].tp;
    } else {
      ++per[truth[r]].fn;
      if (auto it = per.find(predicted[r]); it != per.end()) ++it->second.fp;
    }
  }
  double sum = 0.0;
  for (const auto& [_, c] : per) {
    const double denom = 2.0 * c.tp + c.fp + c.fn;
    sum += denom > 0 ? 2.0 * c.tp / denom : 0.0;
  }
  return sum / static_cast<double>(per.size());
}

}  // namespace hosgns
