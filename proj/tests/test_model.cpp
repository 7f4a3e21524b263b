// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "becgs/bec.hpp"
#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"
#include "becgs/model.hpp"
#include "test_helpers.hpp"

using namespace becgs;
using becgs::testing::assemble_dense;
using becgs::testing::dense_coupled;
using becgs::testing::to_eigen;

namespace {

// A1 = A2 = I up to 1e-16: a huge spacing makes the stencil couplings
// negligible and the potential supplies the unit diagonal.
CoupledProblem identity_problem(std::size_t n, double b11, double b22, double b12) {
  const double big = 1e8;
  const Domain dom = Domain::box(1, 0.0, big * (static_cast<double>(n) + 1.0));
  std::vector<int> counts{static_cast<int>(n) + 1};
  const PotentialSpec pot = PotentialSpec::custom_fn([big](std::span<const double>) {
    return 1.0 - 1.0 / (big * big);
  });
  CoupledProblem p = build_custom(dom, counts, Scheme::FD, pot, b11, b22, b12);
  return p;
}

CoupledProblem small_fd_problem(std::size_t interior, double b11, double b22, double b12,
                                double lo = -4.0, double hi = 4.0) {
  const Domain dom = Domain::box(1, lo, hi);
  std::vector<int> counts{static_cast<int>(interior) + 1};
  const double w[1] = {1.0};
  return build_custom(dom, counts, Scheme::FD,
                      PotentialSpec::harmonic(std::span<const double>(w, 1)), b11, b22, b12);
}

std::vector<double> unit(std::size_t n, std::size_t k) {
  std::vector<double> e(n, 0.0);
  e[k] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("energy closed forms") {
  SUBCASE("first unit vectors with identity operators") {
    const CoupledProblem p = identity_problem(3, 2.0, 2.0, 1.0);
    const std::vector<double> e1 = unit(3, 0);
    // (b11/2) + u'u + (b22/2) + v'v + b12 = 1 + 1 + 1 + 1 + 1
    CHECK(energy(p, e1, e1) == doctest::Approx(5.0).epsilon(1e-9));
  }
  SUBCASE("zero coupling splits into the two half energies") {
    std::mt19937_64 rng(5);
    const CoupledProblem p = small_fd_problem(6, 1.5, 2.5, 0.0);
    const std::vector<double> u = testing::random_unit(rng, 6, false);
    const std::vector<double> v = testing::random_unit(rng, 6, false);
    const CoupledProblem ps = swapped(p);
    CHECK(energy(p, u, v) ==
          doctest::Approx(half_energy(p, u, v) + half_energy(ps, v, u)).epsilon(1e-13));
  }
  SUBCASE("random instance against direct dense summation") {
    std::mt19937_64 rng(9);
    const CoupledProblem p = small_fd_problem(5, 1.2, 0.8, 0.4);
    const std::vector<double> u = testing::random_unit(rng, 5, false);
    const std::vector<double> v = testing::random_unit(rng, 5, false);
    const Eigen::MatrixXd a = assemble_dense(*p.a1);
    double expected = 0.0;
    for (int i = 0; i < 5; ++i) {
      expected += 0.5 * p.beta11 * std::pow(u[i], 4) + 0.5 * p.beta22 * std::pow(v[i], 4) +
                  p.beta12 * u[i] * u[i] * v[i] * v[i];
    }
    expected += to_eigen(u).dot(a * to_eigen(u)) + to_eigen(v).dot(a * to_eigen(v));
    CHECK(energy(p, u, v) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("half energy") {
  SUBCASE("unit vector closed form") {
    const CoupledProblem p = identity_problem(3, 2.0, 2.0, 1.0);
    const std::vector<double> e1 = unit(3, 0);
    CHECK(half_energy(p, e1, e1) == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("difference to the full energy does not depend on u") {
    std::mt19937_64 rng(13);
    const CoupledProblem p = small_fd_problem(7, 1.0, 2.0, 0.7);
    const std::vector<double> v = testing::random_unit(rng, 7, false);
    const std::vector<double> u0 = testing::random_unit(rng, 7, false);
    const double base = energy(p, u0, v) - half_energy(p, u0, v);
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<double> u = testing::random_unit(rng, 7, false);
      CHECK(energy(p, u, v) - half_energy(p, u, v) == doctest::Approx(base).epsilon(1e-11));
    }
  }
}

TEST_CASE("coupled operator apply") {
  std::mt19937_64 rng(21);
  SUBCASE("gradient identity: 2 A_v(u) u equals the finite-difference gradient") {
    const CoupledProblem p = small_fd_problem(8, 1.3, 1.0, 0.6);
    const std::vector<double> u = testing::random_unit(rng, 8, false);
    const std::vector<double> v = testing::random_unit(rng, 8, false);
    const std::vector<double> g = apply_coupled(p, u, v, u);
    const double eps = 1e-6;
    std::vector<double> up(u);
    for (std::size_t i = 0; i < 8; ++i) {
      up[i] = u[i] + eps;
      const double fp = half_energy(p, up, v);
      up[i] = u[i] - eps;
      const double fm = half_energy(p, up, v);
      up[i] = u[i];
      CHECK(2.0 * g[i] == doctest::Approx((fp - fm) / (2.0 * eps)).epsilon(1e-6));
    }
  }
  SUBCASE("zero betas reduce to the bare operator") {
    const CoupledProblem p = small_fd_problem(6, 1e-300, 1e-300, 0.0);
    const std::vector<double> u = testing::random_unit(rng, 6, false);
    const std::vector<double> v = testing::random_unit(rng, 6, false);
    const std::vector<double> x = testing::random_vector(rng, 6);
    const std::vector<double> ax = apply_coupled(p, u, v, x);
    std::vector<double> ref(6);
    p.a1->apply(x, ref);
    for (int i = 0; i < 6; ++i) CHECK(ax[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
  SUBCASE("dense oracle") {
    const CoupledProblem p = small_fd_problem(4, 0.9, 1.1, 0.5);
    const std::vector<double> u = testing::random_unit(rng, 4, false);
    const std::vector<double> v = testing::random_unit(rng, 4, false);
    const std::vector<double> x = testing::random_vector(rng, 4);
    const Eigen::MatrixXd m = dense_coupled(assemble_dense(*p.a1), p.beta11, p.beta12, u, v);
    const Eigen::VectorXd ref = m * to_eigen(x);
    const std::vector<double> got = apply_coupled(p, u, v, x);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(ref(i)).epsilon(1e-12));
  }
}

TEST_CASE("residual") {
  std::mt19937_64 rng(31);
  const CoupledProblem p = small_fd_problem(4, 1.0, 1.0, 0.3);
  const std::vector<double> u = testing::random_unit(rng, 4, false);
  const std::vector<double> v = testing::random_unit(rng, 4, false);

  SUBCASE("u'r vanishes at the Rayleigh shift") {
    const std::vector<double> r = residual(p, u, v, rayleigh(p, u, v));
    CHECK(std::abs(kernels::dot(u, r)) < 1e-12);
  }
  SUBCASE("dense oracle") {
    const double lambda = 0.37;
    const Eigen::MatrixXd m = dense_coupled(assemble_dense(*p.a1), p.beta11, p.beta12, u, v);
    const Eigen::VectorXd ref = m * to_eigen(u) - lambda * to_eigen(u);
    const std::vector<double> r = residual(p, u, v, lambda);
    for (int i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(ref(i)).epsilon(1e-12));
  }
}

TEST_CASE("Jacobian identity J u = r + 2 b11 u^3") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const CoupledProblem p = small_fd_problem(6, 0.5 + trial * 0.3, 1.0, 0.2 * trial);
    const std::vector<double> u = testing::random_unit(rng, 6, false);
    const std::vector<double> v = testing::random_unit(rng, 6, false);
    const double lambda = -0.5 + 0.17 * trial;
    std::vector<double> ju(6);
    apply_jacobian(p, u, v, lambda, u, ju);
    const std::vector<double> r = residual(p, u, v, lambda);
    for (int i = 0; i < 6; ++i)
      CHECK(std::abs(ju[i] - r[i] - 2.0 * p.beta11 * u[i] * u[i] * u[i]) < 1e-12);
  }
}

TEST_CASE("Jacobian is the derivative of the residual") {
  std::mt19937_64 rng(41);
  const CoupledProblem p = small_fd_problem(8, 1.1, 1.0, 0.4);
  const std::vector<double> u = testing::random_unit(rng, 8, false);
  const std::vector<double> v = testing::random_unit(rng, 8, false);
  std::vector<double> x = testing::random_unit(rng, 8, false);
  const double lambda = 0.21;
  const double eps = 1e-6;

  std::vector<double> up(8), jx(8);
  kernels::combine(u, eps, x, up);
  const std::vector<double> rp = residual(p, up, v, lambda);
  const std::vector<double> r0 = residual(p, u, v, lambda);
  apply_jacobian(p, u, v, lambda, x, jx);
  double err = 0.0;
  for (int i = 0; i < 8; ++i) err = std::max(err, std::abs((rp[i] - r0[i]) / eps - jx[i]));
  CHECK(err < 1e-4);  // O(eps) with the cubic curvature constant
}

TEST_CASE("rayleigh quotient") {
  std::mt19937_64 rng(43);
  SUBCASE("unit vector on the identity problem") {
    const CoupledProblem p = identity_problem(3, 1.0, 1.0, 1e-300);
    const std::vector<double> e1 = unit(3, 0);
    std::vector<double> zero(3, 0.0);
    CHECK(rayleigh(p, e1, zero) == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("dense oracle") {
    const CoupledProblem p = small_fd_problem(6, 1.4, 1.0, 0.9);
    const std::vector<double> u = testing::random_unit(rng, 6, false);
    const std::vector<double> v = testing::random_unit(rng, 6, false);
    const Eigen::MatrixXd m = dense_coupled(assemble_dense(*p.a1), p.beta11, p.beta12, u, v);
    CHECK(rayleigh(p, u, v) ==
          doctest::Approx(to_eigen(u).dot(m * to_eigen(u))).epsilon(1e-12));
  }
}

TEST_CASE("min ratio") {
  SUBCASE("symmetric two-point instance") {
    // A = [[2,-1],[-1,2]] via U=[0,3], n=3 FD with V = 1 scaled: kinetic
    // gives [[1,-0.5],[-0.5,1]]; doubling the operator gives the target.
    const Domain dom = Domain::box(1, 0.0, 3.0);
    std::vector<int> counts{3};
    CoupledProblem p =
        build_custom(dom, counts, Scheme::FD, PotentialSpec::zero(), 1.0, 1.0, 1e-300);
    p.a1 = std::make_shared<const SymmetricOperator>(p.a1->scaled(2.0));
    const double inv = 1.0 / std::sqrt(2.0);
    const std::vector<double> u{inv, inv};
    const std::vector<double> v{0.0, 0.0};
    CHECK(min_ratio(p, u, v) == doctest::Approx(1.5));
  }
  SUBCASE("positive eigenvector gives its eigenvalue") {
    const CoupledProblem p = small_fd_problem(6, 1e-300, 1.0, 0.0);
    const Eigen::MatrixXd a = assemble_dense(*p.a1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd ground = es.eigenvectors().col(0);
    if (ground(0) < 0) ground = -ground;
    const std::vector<double> u = testing::from_eigen(ground);
    const std::vector<double> v(6, 0.0);
    CHECK(min_ratio(p, u, v) == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
  }
  SUBCASE("componentwise oracle on random positive data") {
    std::mt19937_64 rng(47);
    const CoupledProblem p = small_fd_problem(5, 1.0, 1.0, 0.5);
    const std::vector<double> u = testing::random_unit(rng, 5, true);
    const std::vector<double> v = testing::random_unit(rng, 5, true);
    const std::vector<double> au = apply_coupled(p, u, v, u);
    double expected = 1e300;
    for (int i = 0; i < 5; ++i) expected = std::min(expected, au[i] / u[i]);
    CHECK(min_ratio(p, u, v) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("nonpositive iterates are rejected") {
    const CoupledProblem p = small_fd_problem(4, 1.0, 1.0, 0.5);
    std::vector<double> u{0.5, -0.5, 0.5, 0.5};
    const std::vector<double> v(4, 0.5);
    CHECK_THROWS_AS(min_ratio(p, u, v), SolverError);
  }
  SUBCASE("min ratio is below the Rayleigh quotient for positive iterates") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
      const CoupledProblem p = small_fd_problem(8, 1.0 + trial, 1.0, 0.1 * trial);
      const std::vector<double> u = testing::random_unit(rng, 8, true);
      const std::vector<double> v = testing::random_unit(rng, 8, true);
      CHECK(min_ratio(p, u, v) <= rayleigh(p, u, v) + 1e-12);
    }
  }
}

TEST_CASE("grad norm") {
  std::mt19937_64 rng(59);
  SUBCASE("eigenvectors of the decoupled linear problem") {
    const CoupledProblem p = small_fd_problem(6, 1e-300, 1e-300, 0.0);
    const Eigen::MatrixXd a = assemble_dense(*p.a1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const std::vector<double> u = testing::from_eigen(es.eigenvectors().col(0));
    const std::vector<double> v = testing::from_eigen(es.eigenvectors().col(1));
    CHECK(grad_norm(p, u, v) < 1e-10);
  }
  SUBCASE("dense oracle on a random state") {
    const CoupledProblem p = small_fd_problem(5, 1.7, 0.9, 0.8);
    const std::vector<double> u = testing::random_unit(rng, 5, false);
    const std::vector<double> v = testing::random_unit(rng, 5, false);
    const Eigen::MatrixXd a = assemble_dense(*p.a1);
    const Eigen::VectorXd ue = to_eigen(u), ve = to_eigen(v);
    const Eigen::MatrixXd mu = dense_coupled(a, p.beta11, p.beta12, u, v);
    const Eigen::MatrixXd mv = dense_coupled(a, p.beta22, p.beta12, v, u);
    const Eigen::VectorXd au = mu * ue;
    const Eigen::VectorXd av = mv * ve;
    const double expected = std::sqrt((au - ue.dot(au) * ue).squaredNorm() +
                                      (av - ve.dot(av) * ve).squaredNorm());
    CHECK(grad_norm(p, u, v) == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("absolute values do not increase the energy on M-matrix problems") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const CoupledProblem p = small_fd_problem(7, 1.0, 1.2, 0.5);
    std::vector<double> u = testing::random_unit(rng, 7, false);
    std::vector<double> v = testing::random_unit(rng, 7, false);
    std::vector<double> au(u), av(v);
    for (double& x : au) x = std::abs(x);
    for (double& x : av) x = std::abs(x);
    CHECK(energy(p, u, v) >= energy(p, au, av) - 1e-12);
  }
}

TEST_CASE("u and v roles are symmetric under swapping") {
  std::mt19937_64 rng(67);
  const CoupledProblem p = small_fd_problem(6, 1.9, 0.7, 0.33);
  const CoupledProblem ps = swapped(p);
  const std::vector<double> u = testing::random_unit(rng, 6, false);
  const std::vector<double> v = testing::random_unit(rng, 6, false);
  CHECK(energy(p, u, v) == doctest::Approx(energy(ps, v, u)).epsilon(1e-13));
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(small_fd_problem(4, 0.0, 1.0, 0.1), SolverError);
  CHECK_THROWS_AS(small_fd_problem(4, 1.0, -2.0, 0.1), SolverError);
}
