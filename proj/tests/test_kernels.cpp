// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <vector>

#include "becgs/kernels.hpp"
#include "test_helpers.hpp"

using namespace becgs;

namespace {

struct ThreadGuard {
  explicit ThreadGuard(int n) { kernels::set_max_threads(n); }
  ~ThreadGuard() {
    kernels::set_max_threads(0);
    kernels::force_serial(false);
  }
};

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
  ThreadGuard guard(4);
  std::mt19937_64 rng(7);
  for (std::size_t n : {std::size_t{1000}, std::size_t{100000}}) {
    const std::vector<double> a = testing::random_vector(rng, n, 0.1, 2.0);
    const std::vector<double> b = testing::random_vector(rng, n, -1.0, 1.0);

    CHECK(kernels::dot(a, b) == doctest::Approx(kernels::serial::dot(a, b)).epsilon(1e-13));
    CHECK(kernels::nrm2sq(a) == doctest::Approx(kernels::serial::nrm2sq(a)).epsilon(1e-13));
    CHECK(kernels::sum_pow4(a) == doctest::Approx(kernels::serial::sum_pow4(a)).epsilon(1e-13));
    CHECK(kernels::sum_sq_prod(a, b) ==
          doctest::Approx(kernels::serial::sum_sq_prod(a, b)).epsilon(1e-13));
    CHECK(kernels::min_element(b) == kernels::serial::min_element(b));
    CHECK(kernels::min_ratio(b, a).value ==
          doctest::Approx(kernels::serial::min_ratio(b, a).value).epsilon(1e-14));

    std::vector<double> y1(n, 0.5), y2(n, 0.5);
    kernels::axpy(0.7, a, y1);
    kernels::serial::axpy(0.7, a, y2);
    for (std::size_t i = 0; i < n; i += n / 17 + 1) CHECK(y1[i] == y2[i]);

    std::vector<double> w1(n), w2(n);
    kernels::add_shifted_diag_product(a, 3.0, b, 1.5, a, -0.25, b, w1);
    kernels::serial::add_shifted_diag_product(a, 3.0, b, 1.5, a, -0.25, b, w2);
    for (std::size_t i = 0; i < n; i += n / 13 + 1) CHECK(w1[i] == doctest::Approx(w2[i]));
  }
}

TEST_CASE("parallel reductions are deterministic run to run") {
  ThreadGuard guard(4);
  std::mt19937_64 rng(11);
  const std::vector<double> a = testing::random_vector(rng, 200000);
  const std::vector<double> b = testing::random_vector(rng, 200000);
  const double first = kernels::dot(a, b);
  for (int rep = 0; rep < 5; ++rep) CHECK(kernels::dot(a, b) == first);
}

TEST_CASE("min_ratio flags nonpositive denominators") {
  std::vector<double> numer{1.0, 2.0};
  std::vector<double> denom{0.5, 0.0};
  CHECK(kernels::min_ratio(numer, denom).nonpositive);
  denom[1] = -0.3;
  CHECK(kernels::min_ratio(numer, denom).nonpositive);
  denom[1] = 0.25;
  const auto r = kernels::min_ratio(numer, denom);
  CHECK_FALSE(r.nonpositive);
  CHECK(r.value == doctest::Approx(2.0));
}

TEST_CASE("FD stencil applies match dense assembly") {
  ThreadGuard guard(4);
  std::mt19937_64 rng(3);

  SUBCASE("1d") {
    const std::size_t n = 9;
    const double diag = 2.0, off = -0.5;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, i) = diag;
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = off;
    }
    const std::vector<double> x = testing::random_vector(rng, n);
    std::vector<double> y(n);
    kernels::fd_apply_1d(n, diag, off, x.data(), y.data());
    const Eigen::VectorXd ref = a * testing::to_eigen(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(ref(i)).epsilon(1e-14));
  }

  SUBCASE("3d against nested serial loops") {
    const int c = 5;
    const std::size_t n = static_cast<std::size_t>(c) * c * c;
    const std::vector<double> x = testing::random_vector(rng, n);
    std::vector<double> y(n), yref(n);
    kernels::serial::fd_apply_3d(c, c, c, 6.0, -1.0, -0.5, -0.25, x.data(), yref.data());
    kernels::fd_apply_3d(c, c, c, 6.0, -1.0, -0.5, -0.25, x.data(), y.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == yref[i]);

    // Row-major neighbour strides: along the last axis the stride is 1.
    const std::size_t center = (2 * c + 2) * c + 2;
    std::vector<double> e(n, 0.0);
    e[center] = 1.0;
    kernels::fd_apply_3d(c, c, c, 6.0, -1.0, -0.5, -0.25, e.data(), y.data());
    CHECK(y[center] == doctest::Approx(6.0));
    CHECK(y[center + 1] == doctest::Approx(-0.25));
    CHECK(y[center + c] == doctest::Approx(-0.5));
    CHECK(y[center + c * c] == doctest::Approx(-1.0));
  }
}

TEST_CASE("normalize returns the original norm and yields a unit vector") {
  std::vector<double> x{3.0, 4.0};
  CHECK(kernels::normalize(x) == doctest::Approx(5.0));
  CHECK(kernels::nrm2(x) == doctest::Approx(1.0));
}
