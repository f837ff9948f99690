// SPDX-License-Identifier: Apache-2.0
#include "hosgns/hosgns.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/QR>

namespace hosgns {

double pearson_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson_r2: length mismatch");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

SgnsReductionReport sgns_reduction_check(const CooccurrenceTensor& pairs, const TrainConfig& cfg) {
  if (pairs.order() != 2) throw DimensionError("sgns reduction needs an order-2 tensor");
  auto trained = train<double>(pairs, cfg);
  auto rec = reconstruct_spmi(trained.embeddings, pairs, cfg.kappa, pairs.nnz());
  SgnsReductionReport r;
  r.max_abs_error = rec.max_abs_error;
  r.r2 = rec.r2;
  r.num_entries = rec.spmi.size();
  r.embeddings = std::move(trained.embeddings);
  return r;
}

namespace {

// Unknowns: factor entries and log-marginals u_n. P = exp([[F]] + sum_n u_n)
// must have mode marginals exp(u_n) and unit mass. Underdetermined, solved
// by minimum-norm Gauss-Newton steps. Returns the final residual norm.
double solve_planted(std::span<const int> mode_sizes, const std::vector<std::int32_t>& indices,
                     EmbeddingSet<double>& planted, std::vector<double>& p) {
  const auto order = mode_sizes.size();
  const int rank = planted.dim();
  const std::size_t grid = indices.size() / order;
  std::vector<Eigen::Index> row0(order), fcol0(order), ucol0(order);
  Eigen::Index rows = 0, cols = 0;
  for (std::size_t n = 0; n < order; ++n) {
    row0[n] = rows;
    rows += mode_sizes[n];
  }
  const Eigen::Index total_row = rows++;
  // sum of squares of [[F]] stays at its initial value, which rules out the
  // trivial solution with a vanishing factor
  const Eigen::Index energy_row = rows++;
  for (std::size_t n = 0; n < order; ++n) {
    fcol0[n] = cols;
    cols += static_cast<Eigen::Index>(mode_sizes[n]) * rank;
  }
  for (std::size_t n = 0; n < order; ++n) {
    ucol0[n] = cols;
    cols += mode_sizes[n];
  }
  std::vector<Eigen::VectorXd> u(order);
  for (std::size_t n = 0; n < order; ++n)
    u[n] = Eigen::VectorXd::Constant(mode_sizes[n], -std::log(static_cast<double>(mode_sizes[n])));

  double energy0 = 0.0;
  for (std::size_t g = 0; g < grid; ++g) energy0 += std::pow(tuple_inner(planted, indices.data() + g * order), 2);
  p.assign(grid, 0.0);
  auto evaluate = [&](Eigen::VectorXd& r) {
    r = Eigen::VectorXd::Zero(rows);
    double mass = 0.0, energy = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
      const std::int32_t* x = indices.data() + g * order;
      double m = tuple_inner(planted, x);
      energy += m * m;
      for (std::size_t n = 0; n < order; ++n) m += u[n][x[n]];
      p[g] = std::exp(m);
      mass += p[g];
      for (std::size_t n = 0; n < order; ++n) r[row0[n] + x[n]] += p[g];
    }
    for (std::size_t n = 0; n < order; ++n)
      for (int i = 0; i < mode_sizes[n]; ++i) r[row0[n] + i] = std::log(r[row0[n] + i]) - u[n][i];
    r[total_row] = std::log(mass);
    r[energy_row] = energy / energy0 - 1.0;
    return r.norm();
  };

  Eigen::VectorXd r;
  double res = evaluate(r);
  for (int it = 0; it < 2000 && res > 1e-14; ++it) {
    Eigen::VectorXd marg = Eigen::VectorXd::Zero(total_row + 1);
    for (std::size_t g = 0; g < grid; ++g) {
      const std::int32_t* x = indices.data() + g * order;
      for (std::size_t n = 0; n < order; ++n) marg[row0[n] + x[n]] += p[g];
      marg[total_row] += p[g];
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd dlogp(cols);
    std::vector<Eigen::Index> touched;
    for (std::size_t g = 0; g < grid; ++g) {
      const std::int32_t* x = indices.data() + g * order;
      touched.clear();
      for (std::size_t m = 0; m < order; ++m) {
        for (int c = 0; c < rank; ++c) {
          double prod = 1.0;
          for (std::size_t l = 0; l < order; ++l)
            if (l != m) prod *= planted.factors[l](x[l], c);
          const Eigen::Index col = fcol0[m] + static_cast<Eigen::Index>(x[m]) * rank + c;
          dlogp[col] = prod;
          touched.push_back(col);
        }
        const Eigen::Index col = ucol0[m] + x[m];
        dlogp[col] = 1.0;
        touched.push_back(col);
      }
      for (std::size_t n = 0; n <= order; ++n) {
        const Eigen::Index row = n < order ? row0[n] + x[n] : total_row;
        const double w = p[g] / marg[row];
        for (auto col : touched) J(row, col) += w * dlogp[col];
      }
      const double m2 = 2.0 * tuple_inner(planted, x) / energy0;
      for (auto col : touched)
        if (col < ucol0[0]) J(energy_row, col) += m2 * dlogp[col];
    }
    for (std::size_t n = 0; n < order; ++n)
      for (int i = 0; i < mode_sizes[n]; ++i) J(row0[n] + i, ucol0[n] + i) -= 1.0;

    const Eigen::VectorXd step = -J.completeOrthogonalDecomposition().solve(r);
    const auto keep_f = planted.factors;
    const auto keep_u = u;
    double t = 1.0;
    for (; t > 1e-6; t *= 0.5) {
      for (std::size_t n = 0; n < order; ++n) {
        for (int i = 0; i < mode_sizes[n]; ++i) {
          for (int c = 0; c < rank; ++c)
            planted.factors[n](i, c) = keep_f[n](i, c) + t * step[fcol0[n] + static_cast<Eigen::Index>(i) * rank + c];
          u[n][i] = keep_u[n][i] + t * step[ucol0[n] + i];
        }
      }
      Eigen::VectorXd trial;
      const double tr = evaluate(trial);
      if (std::isfinite(tr) && tr < res) {
        res = tr;
        r = trial;
        break;
      }
    }
    if (t <= 1e-6) {
      planted.factors = keep_f;
      u = keep_u;
      res = evaluate(r);
      break;
    }
  }
  return res;
}

}  // namespace

PlantedTensor planted_cp_tensor(std::span<const int> mode_sizes, int rank, double amplitude,
                                std::uint64_t seed) {
  const auto order = mode_sizes.size();
  if (order < 2) throw DimensionError("planted tensor needs order >= 2");
  if (rank < 1) throw DomainError("rank must be >= 1");
  const double scale = std::pow(amplitude, 1.0 / static_cast<double>(order));
  std::size_t grid = 1;
  for (int m : mode_sizes) grid *= static_cast<std::size_t>(m);
  std::vector<std::int32_t> indices(grid * order);
  {
    std::vector<int> idx(order, 0);
    for (std::size_t g = 0; g < grid; ++g) {
      std::copy(idx.begin(), idx.end(), indices.begin() + static_cast<std::ptrdiff_t>(g * order));
      for (std::size_t n = order; n-- > 0;) {
        if (++idx[n] < mode_sizes[n]) break;
        idx[n] = 0;
      }
    }
  }

  PlantedTensor out;
  std::vector<double> p;
  const auto roles = default_roles(static_cast<int>(order));
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    out.planted = EmbeddingSet<double>::uniform(mode_sizes, roles, rank, scale * rank,
                                                derive_seed(seed, "planted-factors", attempt));
    // mean-free columns keep the one-mode conditional means of [[F]] at zero,
    // so uniform marginals already solve the system to first order
    for (auto& f : out.planted.factors) f.rowwise() -= f.colwise().mean();
    out.fixed_point_residual = solve_planted(mode_sizes, indices, out.planted, p);
    if (out.fixed_point_residual < 1e-9) break;
  }
  if (!(out.fixed_point_residual < 1e-9)) throw DegenerateError("planted tensor system did not converge");
  std::vector<int> sizes(mode_sizes.begin(), mode_sizes.end());
  out.tensor = CooccurrenceTensor::from_weights(std::move(sizes), roles, std::move(indices), std::move(p));
  return out;
}

}  // namespace hosgns
