// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/model.hpp"

#include <cmath>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"

namespace becgs {

void CoupledProblem::validate() const {
  if (!a1 || !a2) fail(Errc::InvalidSpec, "coupled problem needs both operators");
  if (!(beta11 > 0.0) || !(beta22 > 0.0))
    fail(Errc::InvalidSpec, "beta11 and beta22 must be positive");
  if (a1->size() != a2->size() || a1->size() != n)
    fail(Errc::InvalidSpec, "operator sizes must match the unknown count");
}

CoupledProblem swapped(const CoupledProblem& p) {
  CoupledProblem q = p;
  std::swap(q.a1, q.a2);
  std::swap(q.beta11, q.beta22);
  std::swap(q.rescale[0], q.rescale[1]);
  return q;
}

double energy(const CoupledProblem& p, std::span<const double> u, std::span<const double> v) {
  std::vector<double> tmp(p.n);
  p.a1->apply(u, tmp);
  double f = kernels::dot(u, tmp) + 0.5 * p.beta11 * kernels::sum_pow4(u);
  p.a2->apply(v, tmp);
  f += kernels::dot(v, tmp) + 0.5 * p.beta22 * kernels::sum_pow4(v);
  f += p.beta12 * kernels::sum_sq_prod(u, v);
  return f;
}

double half_energy(const CoupledProblem& p, std::span<const double> u,
                   std::span<const double> v) {
  std::vector<double> tmp(p.n);
  p.a1->apply(u, tmp);
  return kernels::dot(u, tmp) + 0.5 * p.beta11 * kernels::sum_pow4(u) +
         p.beta12 * kernels::sum_sq_prod(u, v);
}

void apply_coupled(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                   std::span<const double> x, std::span<double> out) {
  p.a1->apply_kinetic(x, out);
  kernels::add_shifted_diag_product(p.a1->potential(), p.beta11, u, p.beta12, v, 0.0, x, out);
}

std::vector<double> apply_coupled(const CoupledProblem& p, std::span<const double> u,
                                  std::span<const double> v, std::span<const double> x) {
  std::vector<double> out(p.n);
  apply_coupled(p, u, v, x, out);
  return out;
}

std::vector<double> residual(const CoupledProblem& p, std::span<const double> u,
                             std::span<const double> v, double lambda) {
  std::vector<double> r = apply_coupled(p, u, v, u);
  kernels::axpy(-lambda, u, r);
  return r;
}

void apply_jacobian(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                    double lambda, std::span<const double> x, std::span<double> out) {
  p.a1->apply_kinetic(x, out);
  kernels::add_shifted_diag_product(p.a1->potential(), 3.0 * p.beta11, u, p.beta12, v, -lambda, x,
                                    out);
}

double rayleigh(const CoupledProblem& p, std::span<const double> u, std::span<const double> v) {
  return kernels::dot(u, apply_coupled(p, u, v, u));
}

double min_ratio(const CoupledProblem& p, std::span<const double> u, std::span<const double> v) {
  const std::vector<double> a = apply_coupled(p, u, v, u);
  const auto r = kernels::min_ratio(a, u);
  if (r.nonpositive)
    fail(Errc::NonpositiveIterate, "min ratio requires a strictly positive iterate");
  return r.value;
}

namespace {

double projected_grad_sq(std::span<const double> coupled, std::span<const double> u,
                         double rayleigh_value) {
  // |a - (u'a) u|^2 = |a|^2 - 2 rho u'a + rho^2 for unit u, but compute it
  // directly to stay exact for non-unit inputs.
  double s = 0.0;
  const std::size_t n = u.size();
  std::vector<double> proj(n);
  kernels::combine(coupled, -rayleigh_value, u, proj);
  s = kernels::nrm2sq(proj);
  return s;
}

}  // namespace

HalfEval eval_half(const CoupledProblem& p, std::span<const double> u, std::span<const double> v) {
  HalfEval e;
  e.coupled.resize(p.n);
  p.a1->apply(u, e.coupled);
  e.quad = kernels::dot(u, e.coupled);
  kernels::add_shifted_diag_product({}, 0.0, {}, p.beta12, v, 0.0, u, e.coupled);
  e.quartic = kernels::sum_pow4(u);
  e.cross = kernels::sum_sq_prod(u, v);
  // A_v(u)u = A1 u + b12 v^2 .* u + b11 u^3
  kernels::add_shifted_diag_product({}, p.beta11, u, 0.0, {}, 0.0, u, e.coupled);
  e.rayleigh = p.beta11 * e.quartic + e.quad + p.beta12 * e.cross;
  e.half_energy = 0.5 * p.beta11 * e.quartic + e.quad + p.beta12 * e.cross;
  e.grad_sq = projected_grad_sq(e.coupled, u, e.rayleigh);
  return e;
}

double grad_norm(const CoupledProblem& p, std::span<const double> u, std::span<const double> v) {
  const HalfEval eu = eval_half(p, u, v);
  const HalfEval ev = eval_half(swapped(p), v, u);
  return std::sqrt(eu.grad_sq + ev.grad_sq);
}

}  // namespace becgs
