// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "becgs/bec.hpp"
#include "becgs/model.hpp"

namespace becgs::testing {

// Dense matrix of a linear action, column by column. Independent route used
// as the oracle for matrix-free applies.
template <typename Apply>
Eigen::MatrixXd assemble_dense(std::size_t n, Apply&& apply) {
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    e[j] = 0.0;
  }
  return a;
}

inline Eigen::MatrixXd assemble_dense(const SymmetricOperator& op) {
  return assemble_dense(op.size(),
                        [&](const std::vector<double>& x, std::vector<double>& y) {
                          op.apply(x, y);
                        });
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n, bool positive) {
  std::vector<double> x = random_vector(rng, n, positive ? 0.05 : -1.0, 1.0);
  double s = 0.0;
  for (double v : x) s += v * v;
  s = std::sqrt(s);
  for (double& v : x) v /= s;
  return x;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& x) {
  return std::vector<double>(x.data(), x.data() + x.size());
}

// Dense A_v(u) = b11 diag(u^2) + A1 + b12 diag(v^2) built from the dense
// operator matrix.
inline Eigen::MatrixXd dense_coupled(const Eigen::MatrixXd& a1, double b11, double b12,
                                     const std::vector<double>& u, const std::vector<double>& v) {
  Eigen::MatrixXd m = a1;
  for (long i = 0; i < m.rows(); ++i) m(i, i) += b11 * u[i] * u[i] + b12 * v[i] * v[i];
  return m;
}

}  // namespace becgs::testing
