#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "errml/analyzer.hpp"

namespace errml::analyze {

DenseMatrix generator_matrix(const Ctmc& ctmc) {
  DenseMatrix q(ctmc.num_states, std::vector<double>(ctmc.num_states, 0.0));
  for (const auto& t : ctmc.transitions) {
    q[t.source][t.destination] += t.rate;
    q[t.source][t.source] -= t.rate;
  }
  return q;
}

DenseMatrix dense_expm_reference(const DenseMatrix& generator, double t) {
  const std::size_t n = generator.size();
  if (n > 64) {
    throw Error(ErrorCode::size_limit,
                fmt::format("dense reference is limited to 64 states, got {}", n));
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (generator[i].size() != n) throw Error(ErrorCode::invalid_argument, "matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = generator[i][j] * t;
    }
  }

  // Scale so that ||A / 2^s||_1 <= 1/2.
  double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a /= std::ldexp(1.0, s);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd term = sum;
  for (int k = 1; k < 60; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;

  DenseMatrix out(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out[i][j] = sum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

}  // namespace errml::analyze
