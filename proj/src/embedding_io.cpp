// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <sstream>
#include <string>

#include "hosgns/embedding.hpp"

namespace hosgns {

namespace {

template <typename Scalar>
void write_tsv(std::ostream& out, const FactorMatrix<Scalar>& f, Role role, double kappa,
               std::uint64_t seed, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", kappa);
  out << '#' << role_letter(role) << " dim=" << f.cols() << " kappa=" << buf << " seed=" << seed << '\n';
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    out << r;
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
      std::snprintf(buf, sizeof buf, fmt, static_cast<double>(f(r, c)));
      out << (c == 0 ? '\t' : ' ') << buf;
    }
    out << '\n';
  }
}

}  // namespace

void write_factor_tsv(std::ostream& out, const FactorMatrix<double>& f, Role role, double kappa,
                      std::uint64_t seed) {
  write_tsv(out, f, role, kappa, seed, "%.17g");
}

void write_factor_tsv(std::ostream& out, const FactorMatrix<float>& f, Role role, double kappa,
                      std::uint64_t seed) {
  write_tsv(out, f, role, kappa, seed, "%.9g");
}

FactorFile read_factor_tsv(std::istream& in) {
  FactorFile file;
  std::string line;
  if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
    throw ParseError(1, "missing factor header `#<role> dim=d kappa=k seed=s`");
  {
    std::istringstream h(line.substr(1));
    std::string tag;
    h >> tag;
    file.role = role_from_name(tag);
    std::string kv;
    while (h >> kv) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(1, "bad header field '" + kv + "'");
      const auto key = kv.substr(0, eq);
      const auto val = kv.substr(eq + 1);
      if (key == "dim") file.dim = std::stoi(val);
      else if (key == "kappa") file.kappa = std::stod(val);
      else if (key == "seed") file.seed = std::stoull(val);
    }
    if (file.dim < 1) throw ParseError(1, "header lacks a positive dim");
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long index = -1;
    if (!(fields >> index) || index != static_cast<long>(rows.size()))
      throw ParseError(lineno, "rows must be listed in index order");
    std::vector<double> v(static_cast<std::size_t>(file.dim));
    for (auto& x : v)
      if (!(fields >> x)) throw ParseError(lineno, "row has fewer than dim values");
    std::string extra;
    if (fields >> extra) throw ParseError(lineno, "row has more than dim values");
    rows.push_back(std::move(v));
  }
  file.matrix.resize(static_cast<Eigen::Index>(rows.size()), file.dim);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < file.dim; ++c) file.matrix(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  return file;
}

}  // namespace hosgns
