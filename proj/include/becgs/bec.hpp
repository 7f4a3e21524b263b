// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>

#include "becgs/model.hpp"

namespace becgs {

enum class BecFamily { SpinHalf, Spin1Reduced, Spin2Reduced };

// Physical problem description. Interactions are (beta11, beta22, beta12) for
// spin-1/2, (beta0, beta1) for the reduced spin-1 family and
// (beta0, beta1, beta2) for reduced spin-2. The reductions require zero
// Zeeman shifts.
struct BecSpec {
  BecFamily family = BecFamily::SpinHalf;
  Domain domain;
  std::array<int, 3> n{};
  Scheme scheme = Scheme::FD;
  PotentialSpec potential;

  double beta11 = 0.0, beta22 = 0.0, beta12 = 0.0;
  double beta0 = 0.0, beta1 = 0.0, beta2 = 0.0;
  double alpha = 0.5;          // spin-1/2 mass split
  double magnetization = 0.0;  // reduced families
  double zeeman_p = 0.0, zeeman_q = 0.0;

  void validate() const;
};

struct SpinReduction {
  double beta11, beta22, beta12, alpha;
};

// Anti-ferromagnetic spin-1 reduction: b11 = b22 = b0 + b1, b12 = b0 - b1,
// alpha = (1 + M) / 2.
SpinReduction reduce_spin1(double beta0, double beta1, double magnetization);

// Spin-2 reduction (beta2 < 0, beta1 > beta2/20): b11 = b22 = b0 + 4 b1,
// b12 = b0 - 4 b1 + (2/5) b2, alpha = (2 + M) / 4.
SpinReduction reduce_spin2(double beta0, double beta1, double beta2, double magnetization);

// Discretizes the spec into the coupled problem with grid-level coefficients
// b~11 = b11 a^2 / h^d, b~22 = b22 (1-a)^2 / h^d, b~12 = b12 a (1-a) / h^d and
// per-component operators a A, (1-a) A, so the discrete objective equals the
// truncated energy.
CoupledProblem build_spin_half(const BecSpec& spec);

// Problem with the given grid-level coefficients taken literally
// (A1 = A2 = A, no rescaling).
CoupledProblem build_custom(const Domain& domain, std::span<const int> n, Scheme scheme,
                            const PotentialSpec& pot, double beta11, double beta22, double beta12);

struct WaveFunctions {
  std::vector<double> phi1;
  std::vector<double> phi2;
};

// phi1 = sqrt(alpha / h^d) u, phi2 = sqrt((1 - alpha) / h^d) v.
WaveFunctions recover_wavefunctions(const CoupledProblem& p, const IterateState& state);

// Block nonlinearity h~ for the multi-block solver: value h~(u), the ratio
// field rho with grad h~(u) = rho(u) .* u, and the diagonal of the Hessian.
struct NonlinearityPlugin {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> ratio;
  std::function<void(std::span<const double>, std::span<double>)> curvature_diag;
};

struct LinearMap {
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::vector<double> diag;
};

// h~(u) = beta/4 sum u^4
NonlinearityPlugin plugin_quartic(double beta);
// h~(u) = (u^2)' A (u^2), grad h~ = 4 (A u^2) .* u for symmetric A
NonlinearityPlugin plugin_modified_gpe(LinearMap a);
// h~(u) = sum (u_i^2 - ln(1 + u_i^2 / a_i))
NonlinearityPlugin plugin_saturable(std::vector<double> a);
NonlinearityPlugin plugin_saturable(double a, std::size_t n);

// Finite-difference consistency check of ratio and curvature against value at
// the given point; returns the worst relative error.
double check_plugin(const NonlinearityPlugin& plugin, std::span<const double> u);

}  // namespace becgs
