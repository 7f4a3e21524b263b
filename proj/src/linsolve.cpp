// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/linsolve.hpp"

#include <cmath>
#include <string>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"

namespace becgs {

namespace {

// LDL' solve for a symmetric positive definite tridiagonal system with
// constant off-diagonal. Fails with INDEFINITE_JACOBIAN when a pivot is not
// positive.
std::vector<double> thomas_spd(std::span<const double> diag, double off,
                               std::span<const double> b) {
  const std::size_t n = diag.size();
  std::vector<double> d(n), l(n, 0.0), y(n);
  d[0] = diag[0];
  if (!(d[0] > 0.0)) fail(Errc::IndefiniteJacobian, "nonpositive pivot in tridiagonal solve");
  y[0] = b[0];
  for (std::size_t i = 1; i < n; ++i) {
    l[i] = off / d[i - 1];
    d[i] = diag[i] - l[i] * off;
    if (!(d[i] > 0.0)) fail(Errc::IndefiniteJacobian, "nonpositive pivot in tridiagonal solve");
    y[i] = b[i] - l[i] * y[i - 1];  // L z = b
  }
  for (std::size_t i = 0; i < n; ++i) y[i] /= d[i];  // D w = z
  for (std::size_t i = n - 1; i-- > 0;) y[i] -= l[i + 1] * y[i + 1];  // L' x = w
  return y;
}

std::shared_ptr<const FourierTransformer> grid_transformer(const Grid& grid) {
  std::array<double, 3> lengths{};
  for (int a = 0; a < grid.dims; ++a) lengths[a] = grid.counts[a] * grid.spacing[a];
  return shared_transformer(grid.dims, grid.counts, lengths);
}

struct ShiftedOperator {
  const SymmetricOperator& a;
  std::span<const double> extra_diag;
  double lambda;

  void apply(std::span<const double> x, std::span<double> y) const {
    a.apply_kinetic(x, y);
    kernels::add_shifted_diag_product(a.potential(), 0.0, {}, 0.0, {}, -lambda, x, y);
    kernels::add_diag_product(extra_diag, x, y);
  }
};

std::vector<double> pcg(const ShiftedOperator& op, std::span<const double> b,
                        const LinearSolverConfig& cfg) {
  const std::size_t n = b.size();
  const auto transformer = grid_transformer(op.a.grid());
  std::vector<double> psym(transformer->laplace_symbol());
  for (double& s : psym) s += cfg.precond_shift;

  std::vector<double> x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), q(n);
  const double bnorm = kernels::nrm2(b);
  if (bnorm == 0.0) return x;
  const double stop = cfg.pcg_tol * bnorm;

  transformer->solve_symbol(psym, r, z);
  kernels::copy(z, p);
  double rz = kernels::dot(r, z);
  for (int it = 0; it < cfg.pcg_maxit; ++it) {
    op.apply(p, q);
    const double pq = kernels::dot(p, q);
    if (!(pq > 0.0))
      fail(Errc::IndefiniteJacobian,
           "nonpositive curvature in PCG at iteration " + std::to_string(it));
    const double alpha = rz / pq;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, q, r);
    if (kernels::nrm2(r) <= stop) return x;
    transformer->solve_symbol(psym, r, z);
    const double rz_next = kernels::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  fail(Errc::NoConvergence, "PCG exhausted " + std::to_string(cfg.pcg_maxit) + " iterations");
}

}  // namespace

std::vector<double> solve_shifted(const SymmetricOperator& a, std::span<const double> extra_diag,
                                  double lambda, std::span<const double> b,
                                  const LinearSolverConfig& cfg) {
  if (cfg.backend == LinearBackend::DirectTridiag) {
    if (!a.direct_tridiag_capable())
      fail(Errc::InvalidSpec, "direct backend requires a 1D tridiagonal operator");
    const std::size_t n = a.size();
    std::vector<double> diag(n);
    const auto& pot = a.potential();
    for (std::size_t i = 0; i < n; ++i)
      diag[i] = a.kinetic_diag() + pot[i] + extra_diag[i] - lambda;
    return thomas_spd(diag, a.kinetic_off()[0], b);
  }
  return pcg(ShiftedOperator{a, extra_diag, lambda}, b, cfg);
}

std::vector<double> solve_jacobian(const CoupledProblem& p, std::span<const double> u,
                                   std::span<const double> v, double lambda,
                                   std::span<const double> b, const LinearSolverConfig& cfg) {
  std::vector<double> extra(p.n);
  const double c1 = 3.0 * p.beta11;
  for (std::size_t i = 0; i < p.n; ++i) extra[i] = c1 * u[i] * u[i] + p.beta12 * v[i] * v[i];
  return solve_shifted(*p.a1, extra, lambda, b, cfg);
}

BorderedSolution solve_bordered(const CoupledProblem& p, std::span<const double> u,
                                std::span<const double> v, double lambda,
                                const LinearSolverConfig& cfg, std::span<const double> coupled_u) {
  std::vector<double> r(p.n);
  kernels::combine(coupled_u, -lambda, u, r);
  const std::vector<double> y1 = solve_jacobian(p, u, v, lambda, u, cfg);
  const std::vector<double> y2 = solve_jacobian(p, u, v, lambda, r, cfg);
  const double t = kernels::dot(u, y1);
  if (!(t > 0.0))
    fail(Errc::DegenerateBorder, "u'J^-1 u is not positive; shift too close to the spectrum");
  BorderedSolution s;
  s.delta = kernels::dot(u, y2) / t;
  s.delta_u.assign(p.n, 0.0);
  kernels::axpy(s.delta, y1, s.delta_u);
  kernels::axpy(-1.0, y2, s.delta_u);
  return s;
}

BorderedSolution solve_bordered(const CoupledProblem& p, std::span<const double> u,
                                std::span<const double> v, double lambda,
                                const LinearSolverConfig& cfg) {
  return solve_bordered(p, u, v, lambda, cfg, apply_coupled(p, u, v, u));
}

std::vector<double> precondition(std::span<const double> b, const Grid& grid, double c) {
  if (!(c > 0.0)) fail(Errc::InvalidSpec, "preconditioner shift must be positive");
  const auto transformer = grid_transformer(grid);
  std::vector<double> sym(transformer->laplace_symbol());
  for (double& s : sym) s += c;
  std::vector<double> y(b.size());
  transformer->solve_symbol(sym, b, y);
  return y;
}

double default_precond_shift(const CoupledProblem& p) {
  return std::max(p.beta11, p.beta22) > 50.0 ? 30.0 : 3.0;
}

LinearSolverConfig default_linear_config(const CoupledProblem& p) {
  LinearSolverConfig cfg;
  if (p.a1->direct_tridiag_capable() && p.a2->direct_tridiag_capable())
    cfg.backend = LinearBackend::DirectTridiag;
  else
    cfg.backend = LinearBackend::Pcg;
  cfg.precond_shift = default_precond_shift(p);
  return cfg;
}

}  // namespace becgs
