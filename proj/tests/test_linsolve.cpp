// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "becgs/bec.hpp"
#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"
#include "becgs/linsolve.hpp"
#include "test_helpers.hpp"

using namespace becgs;
using becgs::testing::assemble_dense;
using becgs::testing::dense_coupled;
using becgs::testing::to_eigen;

namespace {

CoupledProblem fd_problem(std::size_t interior, double b11, double b22, double b12,
                          Scheme scheme = Scheme::FD) {
  const Domain dom = Domain::box(1, -4.0, 4.0);
  std::vector<int> counts{scheme == Scheme::FD ? static_cast<int>(interior) + 1
                                               : static_cast<int>(interior)};
  const double w[1] = {1.0};
  return build_custom(dom, counts, scheme, PotentialSpec::harmonic(std::span<const double>(w, 1)),
                      b11, b22, b12);
}

Eigen::MatrixXd dense_jacobian(const CoupledProblem& p, const std::vector<double>& u,
                               const std::vector<double>& v, double lambda) {
  Eigen::MatrixXd j = dense_coupled(assemble_dense(*p.a1), 3.0 * p.beta11, p.beta12, u, v);
  for (long i = 0; i < j.rows(); ++i) j(i, i) -= lambda;
  return j;
}

}  // namespace

TEST_CASE("jacobian solve on the 1D direct path matches dense LU") {
  std::mt19937_64 rng(71);
  const CoupledProblem p = fd_problem(4, 1.0, 1.0, 0.5);
  const std::vector<double> u = testing::random_unit(rng, 4, true);
  const std::vector<double> v = testing::random_unit(rng, 4, true);
  const std::vector<double> b = testing::random_vector(rng, 4);
  const double lambda = 0.1;

  LinearSolverConfig cfg;
  cfg.backend = LinearBackend::DirectTridiag;
  const std::vector<double> y = solve_jacobian(p, u, v, lambda, b, cfg);

  const Eigen::VectorXd ref = dense_jacobian(p, u, v, lambda).lu().solve(to_eigen(b));
  for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(ref(i)).epsilon(1e-10));
}

TEST_CASE("jacobian solve reduces to division for a contrived identity Jacobian") {
  // With A1 = diag(1 + lambda) - 3 b11 diag(u^2) - b12 diag(v^2) the shifted
  // Jacobian is the identity; realize it with a custom potential at huge
  // spacing and check y = b.
  const double big = 1e8;
  const Domain dom = Domain::box(1, 0.0, big * 5.0);
  std::vector<int> counts{5};
  const double lambda = 0.3;
  // u, v fixed ahead of the potential so the evaluator can capture them.
  const std::vector<double> u{0.6, 0.4, 0.5, 0.3, 0.2};
  const std::vector<double> v{0.1, 0.2, 0.3, 0.4, 0.5};
  int node = 0;
  const PotentialSpec pot = PotentialSpec::custom_fn([&](std::span<const double>) {
    const int i = node++ % 5;
    return 1.0 + lambda - 3.0 * 1.2 * u[i] * u[i] - 0.7 * v[i] * v[i] - 1.0 / (big * big);
  });
  const CoupledProblem p = build_custom(dom, counts, Scheme::FD, pot, 1.2, 1.0, 0.7);

  std::mt19937_64 rng(73);
  const std::vector<double> b = testing::random_vector(rng, 4);
  LinearSolverConfig cfg;
  cfg.backend = LinearBackend::DirectTridiag;
  const std::vector<double> y =
      solve_jacobian(p, {u.data(), 4}, {v.data(), 4}, lambda, b, cfg);
  for (int i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(b[i]).epsilon(1e-9));
}

TEST_CASE("PCG path on a spectral operator") {
  std::mt19937_64 rng(79);
  SUBCASE("diagonalized single-mode solve") {
    // V = 1, betas negligible, lambda = 0: J = -1/2 Lap + I, so a pure
    // Fourier mode with symbol s maps to y = b / (s + 1).
    const Domain dom = Domain::box(1, -std::numbers::pi, std::numbers::pi);
    std::vector<int> counts{16};
    const PotentialSpec pot =
        PotentialSpec::custom_fn([](std::span<const double>) { return 1.0; });
    const CoupledProblem p =
        build_custom(dom, counts, Scheme::Spectral, pot, 1e-300, 1e-300, 0.0);
    std::vector<double> b(16), u(16, 0.0), v(16, 0.0);
    for (int j = 0; j < 16; ++j) b[j] = std::sin(2.0 * p.grid.axis_nodes[0][j]);
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::Pcg;
    cfg.pcg_tol = 1e-12;
    const std::vector<double> y = solve_jacobian(p, u, v, 0.0, b, cfg);
    const double symbol = 0.5 * 4.0;  // mode k = 2
    for (int j = 0; j < 16; ++j)
      CHECK(y[j] == doctest::Approx(b[j] / (symbol + 1.0)).epsilon(1e-8));
  }
  SUBCASE("random spectral instance against dense LU") {
    const CoupledProblem p = fd_problem(16, 1.5, 1.0, 0.4, Scheme::Spectral);
    const std::vector<double> u = testing::random_unit(rng, 16, true);
    const std::vector<double> v = testing::random_unit(rng, 16, true);
    const std::vector<double> b = testing::random_vector(rng, 16);
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::Pcg;
    cfg.pcg_tol = 1e-12;
    cfg.precond_shift = 3.0;
    const std::vector<double> y = solve_jacobian(p, u, v, 0.2, b, cfg);
    const Eigen::VectorXd ref = dense_jacobian(p, u, v, 0.2).lu().solve(to_eigen(b));
    for (int i = 0; i < 16; ++i) CHECK(y[i] == doctest::Approx(ref(i)).epsilon(1e-7));
  }
  SUBCASE("indefinite shifted systems are refused") {
    const CoupledProblem p = fd_problem(16, 1e-300, 1e-300, 0.0, Scheme::Spectral);
    std::vector<double> u(16, 0.25), v(16, 0.25);
    std::vector<double> b(16, 1.0);
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::Pcg;
    // Shift far above the spectrum floor: V = x^2/2 has min 0 on this grid,
    // so lambda = 50 makes J indefinite.
    CHECK_THROWS_AS(solve_jacobian(p, u, v, 50.0, b, cfg), SolverError);
  }
}

TEST_CASE("bordered system") {
  std::mt19937_64 rng(83);
  SUBCASE("identity Jacobian closed form: delta = u'r, du = (u'r) u - r") {
    const double big = 1e8;
    const Domain dom = Domain::box(1, 0.0, big * 3.0);
    std::vector<int> counts{3};
    const double lambda = 0.4;
    const std::vector<double> u{0.8, 0.6};
    int node = 0;
    const PotentialSpec pot = PotentialSpec::custom_fn([&](std::span<const double>) {
      const int i = node++ % 2;
      return 1.0 + lambda - 3.0 * u[i] * u[i] - 1.0 / (big * big);
    });
    const CoupledProblem p = build_custom(dom, counts, Scheme::FD, pot, 1.0, 1.0, 1e-300);
    const std::vector<double> v{0.0, 0.0};
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::DirectTridiag;
    const BorderedSolution s = solve_bordered(p, u, v, lambda, cfg);
    const std::vector<double> r = residual(p, u, v, lambda);
    const double delta_expected = u[0] * r[0] + u[1] * r[1];
    CHECK(s.delta == doctest::Approx(delta_expected).epsilon(1e-9));
    for (int i = 0; i < 2; ++i)
      CHECK(s.delta_u[i] == doctest::Approx(delta_expected * u[i] - r[i]).epsilon(1e-8));
  }
  SUBCASE("exact eigenvector yields a zero tangent step") {
    const CoupledProblem p = fd_problem(6, 1e-300, 1.0, 0.0);
    const Eigen::MatrixXd a = assemble_dense(*p.a1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd ground = es.eigenvectors().col(0);
    if (ground(0) < 0) ground = -ground;
    const std::vector<double> u = testing::from_eigen(ground);
    const std::vector<double> v(6, 0.0);
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::DirectTridiag;
    const BorderedSolution s = solve_bordered(p, u, v, 0.0, cfg);
    CHECK(kernels::nrm2(s.delta_u) < 1e-9);
    CHECK(s.delta == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
  }
  SUBCASE("dense bordered oracle on a random FD instance") {
    const CoupledProblem p = fd_problem(4, 1.0, 1.0, 0.5);
    const std::vector<double> u = testing::random_unit(rng, 4, true);
    const std::vector<double> v = testing::random_unit(rng, 4, true);
    const double lambda = 0.15;
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::DirectTridiag;
    const BorderedSolution s = solve_bordered(p, u, v, lambda, cfg);

    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(5, 5);
    big.topLeftCorner(4, 4) = dense_jacobian(p, u, v, lambda);
    for (int i = 0; i < 4; ++i) {
      big(i, 4) = -u[i];
      big(4, i) = -u[i];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(5);
    const std::vector<double> r = residual(p, u, v, lambda);
    for (int i = 0; i < 4; ++i) rhs(i) = -r[i];
    const Eigen::VectorXd sol = big.lu().solve(rhs);
    for (int i = 0; i < 4; ++i) CHECK(s.delta_u[i] == doctest::Approx(sol(i)).epsilon(1e-9));
    CHECK(s.delta == doctest::Approx(sol(4)).epsilon(1e-9));
  }
  SUBCASE("tangency and residual contracts hold") {
    const CoupledProblem p = fd_problem(32, 2.0, 1.0, 0.8, Scheme::Spectral);
    std::mt19937_64 rng2(89);
    const std::vector<double> u = testing::random_unit(rng2, 32, true);
    const std::vector<double> v = testing::random_unit(rng2, 32, true);
    const double lambda = 0.0;
    LinearSolverConfig cfg;
    cfg.backend = LinearBackend::Pcg;
    const BorderedSolution s = solve_bordered(p, u, v, lambda, cfg);
    CHECK(std::abs(kernels::dot(u, s.delta_u)) <= 10.0 * cfg.pcg_tol);

    // J du - delta u + r small relative to r
    std::vector<double> jdu(32);
    apply_jacobian(p, u, v, lambda, s.delta_u, jdu);
    const std::vector<double> r = residual(p, u, v, lambda);
    std::vector<double> defect(32);
    for (int i = 0; i < 32; ++i) defect[i] = jdu[i] - s.delta * u[i] + r[i];
    CHECK(kernels::nrm2(defect) <= 10.0 * cfg.pcg_tol * kernels::nrm2(r));
  }
  SUBCASE("positive delta at positive iterates in the valid shift window") {
    std::mt19937_64 rng2(97);
    for (int trial = 0; trial < 10; ++trial) {
      const CoupledProblem p = fd_problem(8, 1.0 + trial * 0.5, 1.0, 0.3);
      const std::vector<double> u = testing::random_unit(rng2, 8, true);
      const std::vector<double> v = testing::random_unit(rng2, 8, true);
      const std::vector<double> au = apply_coupled(p, u, v, u);
      const double lambda = std::max(0.0, kernels::min_ratio(au, u).value);
      LinearSolverConfig cfg;
      cfg.backend = LinearBackend::DirectTridiag;
      const BorderedSolution s = solve_bordered(p, u, v, lambda, cfg);
      CHECK(s.delta > 0.0);
    }
  }
}

TEST_CASE("Fourier preconditioner") {
  const Domain dom = Domain::box(1, -2.0, 2.0);
  std::vector<int> counts{16};
  const Grid grid = Grid::periodic(dom, counts);

  SUBCASE("constant fields divide by the shift") {
    const std::vector<double> b(16, 3.0);
    const std::vector<double> y = precondition(b, grid, 4.0);
    for (int i = 0; i < 16; ++i) CHECK(y[i] == doctest::Approx(0.75).epsilon(1e-13));
  }
  SUBCASE("single Fourier mode divides by c + |k|^2") {
    std::vector<double> b(16);
    const double k = 2.0 * std::numbers::pi / 4.0;  // first mode on length 4
    for (int i = 0; i < 16; ++i) b[i] = std::cos(k * grid.axis_nodes[0][i]);
    const std::vector<double> y = precondition(b, grid, 2.0);
    for (int i = 0; i < 16; ++i)
      CHECK(y[i] == doctest::Approx(b[i] / (2.0 + k * k)).epsilon(1e-12));
  }
  SUBCASE("round trip recovers the input") {
    std::mt19937_64 rng(101);
    const std::vector<double> b = testing::random_vector(rng, 16);
    const std::vector<double> y = precondition(b, grid, 5.0);
    // Apply (c I - Lap) spectrally: c y - Lap y with Lap from the kinetic
    // symbol times 2 (the operator stores |k|^2 / 2).
    const SymmetricOperator op = build_spectral_operator(dom, counts, PotentialSpec::zero());
    std::vector<double> lap(16);
    op.apply_kinetic(y, lap);
    for (int i = 0; i < 16; ++i) {
      const double recovered = 5.0 * y[i] + 2.0 * lap[i];
      CHECK(recovered == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("default linear configuration follows the operator structure") {
  const CoupledProblem fd = fd_problem(16, 1.0, 1.0, 0.1);
  CHECK(default_linear_config(fd).backend == LinearBackend::DirectTridiag);
  const CoupledProblem sp = fd_problem(16, 1.0, 1.0, 0.1, Scheme::Spectral);
  CHECK(default_linear_config(sp).backend == LinearBackend::Pcg);
  CHECK(default_precond_shift(fd) == doctest::Approx(3.0));
  const CoupledProblem strong = fd_problem(16, 80.0, 1.0, 0.1);
  CHECK(default_precond_shift(strong) == doctest::Approx(30.0));
}
