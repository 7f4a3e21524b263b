// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "becgs/grid.hpp"

namespace becgs {

// Discrete two-component objective
//   f(u,v) = b11/2 sum u^4 + u'A1 u + b22/2 sum v^4 + v'A2 v + b12 sum u^2 v^2
// over the product of unit spheres. Interaction coefficients are the
// rescaled (grid-level) values; `rescale` maps (u, v) back to wave-function
// amplitudes.
struct CoupledProblem {
  std::shared_ptr<const SymmetricOperator> a1;
  std::shared_ptr<const SymmetricOperator> a2;
  double beta11 = 1.0;
  double beta22 = 1.0;
  double beta12 = 0.0;
  std::size_t n = 0;
  Grid grid;
  std::array<double, 2> rescale{1.0, 1.0};

  void validate() const;
};

// The same problem with the roles of (u, A1, b11) and (v, A2, b22) exchanged;
// v-side quantities are u-side quantities of the swapped problem.
CoupledProblem swapped(const CoupledProblem& p);

struct IterateState {
  std::vector<double> u;
  std::vector<double> v;
  double lambda = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

double energy(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

// f_v(u): the u-dependent part of f at fixed v (v-only terms dropped).
double half_energy(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

// out = A_v(u) x with A_v(u) = b11 diag(u^2) + A1 + b12 diag(v^2).
void apply_coupled(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                   std::span<const double> x, std::span<double> out);
std::vector<double> apply_coupled(const CoupledProblem& p, std::span<const double> u,
                                  std::span<const double> v, std::span<const double> x);

// r_v(u, lambda) = A_v(u) u - lambda u
std::vector<double> residual(const CoupledProblem& p, std::span<const double> u,
                             std::span<const double> v, double lambda);

// out = J_v(u, lambda) x with J = 3 b11 diag(u^2) + A1 + b12 diag(v^2) - lambda I.
void apply_jacobian(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                    double lambda, std::span<const double> x, std::span<double> out);

double rayleigh(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

// min_i (A_v(u)u)_i / u_i; requires strictly positive u.
double min_ratio(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

// Combined projected-residual norm over both blocks,
//   sqrt(|Pu A_v(u)u|^2 + |Pv A_u(v)v|^2).
double grad_norm(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

// Everything derivable from one operator apply on the u block; the solvers
// use this to avoid recomputing A1 u.
struct HalfEval {
  std::vector<double> coupled;  // A_v(u) u
  double quartic = 0.0;         // sum u^4
  double quad = 0.0;            // u'A1 u
  double cross = 0.0;           // sum u^2 v^2
  double rayleigh = 0.0;        // u'A_v(u)u
  double half_energy = 0.0;     // f_v(u)
  double grad_sq = 0.0;         // |A_v(u)u - rayleigh u|^2
};
HalfEval eval_half(const CoupledProblem& p, std::span<const double> u, std::span<const double> v);

}  // namespace becgs
