// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "becgs/model.hpp"

namespace becgs {

enum class LinearBackend { DirectTridiag, Pcg };

struct LinearSolverConfig {
  LinearBackend backend = LinearBackend::Pcg;
  double pcg_tol = 1e-8;   // relative residual
  int pcg_maxit = 500;
  double precond_shift = 3.0;  // c in (c I - Laplacian)^-1
};

// Tangent correction and shift increment of the bordered Newton system
//   [ J  -u ] [du]   [-r]
//   [-u'  0 ] [d ] = [ 0 ].
struct BorderedSolution {
  std::vector<double> delta_u;
  double delta = 0.0;
};

// Solves (K + diag(V + extra_diag) - lambda I) y = b, where K + diag(V) is the
// given operator. Direct backend requires a 1D tridiagonal operator; the PCG
// backend applies the FFT preconditioner (c I - Laplacian)^-1 on the
// operator's grid (periodic approximation for FD interiors).
std::vector<double> solve_shifted(const SymmetricOperator& a, std::span<const double> extra_diag,
                                  double lambda, std::span<const double> b,
                                  const LinearSolverConfig& cfg);

// J_v(u, lambda) y = b for the u block of the coupled problem.
std::vector<double> solve_jacobian(const CoupledProblem& p, std::span<const double> u,
                                   std::span<const double> v, double lambda,
                                   std::span<const double> b, const LinearSolverConfig& cfg);

// Two-solve reduction: J y1 = u, J y2 = r, delta = u'y2 / u'y1,
// du = delta y1 - y2.
BorderedSolution solve_bordered(const CoupledProblem& p, std::span<const double> u,
                                std::span<const double> v, double lambda,
                                const LinearSolverConfig& cfg);
// Variant reusing a precomputed A_v(u) u.
BorderedSolution solve_bordered(const CoupledProblem& p, std::span<const double> u,
                                std::span<const double> v, double lambda,
                                const LinearSolverConfig& cfg, std::span<const double> coupled_u);

// Exact inverse of (c I - Laplacian) on the grid, via Fourier diagonalization.
std::vector<double> precondition(std::span<const double> b, const Grid& grid, double c);

// c = 30 for strongly interacting problems (max grid-level self-interaction
// above 50), else 3.
double default_precond_shift(const CoupledProblem& p);

LinearSolverConfig default_linear_config(const CoupledProblem& p);

}  // namespace becgs
