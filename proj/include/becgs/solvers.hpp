// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "becgs/bec.hpp"
#include "becgs/linsolve.hpp"

namespace becgs {

enum class InitialGuess { Ones, Gaussian };

struct SolverConfig {
  double tau1 = 0.0;
  std::optional<double> tau2;  // empty: estimate lambda_min on the general path
  double grad_tol = 1e-6;
  double energy_tol = 1e-12;
  int max_iter = 200;
  int max_halvings = 60;
  LinearSolverConfig inner;
  double inner_nni_tol = 1e-8;  // ALM subproblem residual
  int inner_max_iter = 500;
  InitialGuess init = InitialGuess::Ones;

  void validate() const;
};

enum class Termination { None, GradTol, EnergyTol, MaxIter };
const char* to_string(Termination t);

struct IterationRecord {
  double energy = 0.0;
  double grad_norm = 0.0;
  double lambda = 0.0, mu = 0.0;
  double theta_u = 0.0, theta_v = 0.0;  // 0 marks a skipped half-step
  double delta_u = 0.0, delta_v = 0.0;
  int halvings_u = 0, halvings_v = 0;
  double tangency_u = 0.0, tangency_v = 0.0;  // |u' du| of the accepted step
  double min_u = 0.0, min_v = 0.0;            // smallest component after the step
  int inner_u = 0, inner_v = 0;               // ALM subproblem iterations
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  IterateState final;
  std::vector<IterationRecord> history;
  double wall_time = 0.0;
  Termination termination = Termination::None;
  long total_inner = 0;
  std::vector<std::vector<double>> block_states;  // multi-block runs only
};

// lambda = max(tau1, min_ratio) on the M-matrix path; clamped into
// [tau1, tau2] on the general path, with tau2 estimated from lambda_min of
// the current block operator when not set. Falls back to tau1 when the
// iterate is not strictly positive.
double select_shift(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                    const SolverConfig& cfg);

struct LineSearchResult {
  double theta = 0.0;
  std::vector<double> u_next;
  int halvings = 0;
  double descent = 0.0;  // f_v(u_next) - f_v(u), negative on success
};

// Halve theta from 1 until the normalized step strictly decreases f_v.
LineSearchResult line_search(const CoupledProblem& p, std::span<const double> u,
                             std::span<const double> delta_u, std::span<const double> v,
                             const SolverConfig& cfg);

// Alternating Newton iteration with Perron-type shifts: one damped bordered
// Newton step per component per sweep, with strict energy descent.
SolveReport anni(const CoupledProblem& p, const SolverConfig& cfg);
// Warm-started variant; u0 and v0 must be strictly positive and are
// normalized on entry.
SolveReport anni(const CoupledProblem& p, const SolverConfig& cfg, std::vector<double> u0,
                 std::vector<double> v0);

struct NniResult {
  std::vector<double> u;
  double lambda = 0.0;
  int iterations = 0;
};

// Full inner Newton solve of the u subproblem at fixed v, to
// cfg.inner_nni_tol. On M-matrix operators the step is damped until the
// shifted residual is componentwise positive; otherwise until the subproblem
// energy decreases.
NniResult nni(const CoupledProblem& p, std::span<const double> v_fixed,
              std::vector<double> u0, const SolverConfig& cfg);

// Alternating minimization: exact subproblem solves via nni per sweep.
SolveReport alm(const CoupledProblem& p, const SolverConfig& cfg);

// One block of the multi-block problem
//   min sum_j [2 h~_j(u^j) + u^j' A_j u^j]
//       + sum_{j != s} beta_js/2 sum_i (u^j_i)^2 (u^s_i)^2.
struct BlockSpec {
  std::shared_ptr<const SymmetricOperator> op;
  NonlinearityPlugin nonlinearity;
  std::vector<double> coupling_row;  // beta_js for s = 0..m-1; diagonal unused
};

SolveReport multiblock_anni(const std::vector<BlockSpec>& blocks, const SolverConfig& cfg);

// Stopping rule: gradient tolerance first, then relative energy stall
// |f_cur - f_prev| / (|f_prev| + 1) <= energy_tol.
Termination check_stop(const IterateState& current, const IterateState* previous,
                       const SolverConfig& cfg);

std::vector<double> initial_guess(const Grid& grid, InitialGuess kind);

// Smallest Ritz value of a symmetric operator from a short Lanczos run with
// full reorthogonalization.
double lanczos_smallest(
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    std::span<const double> start, int steps);

}  // namespace becgs
