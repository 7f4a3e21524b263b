// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"

namespace becgs {

namespace {

constexpr double kStepFloor = 1e-12;  // below this norm a step counts as zero
constexpr int kLanczosSteps = 10;
constexpr int kShiftRetries = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Smallest eigenvalue of the symmetric tridiagonal (alpha, beta) by Sturm
// bisection.
double tridiag_smallest(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t m = alpha.size();
  double lo = alpha[0], hi = alpha[0];
  for (std::size_t i = 0; i < m; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(beta[i - 1]);
    if (i < beta.size()) r += std::abs(beta[i]);
    lo = std::min(lo, alpha[i] - r);
    hi = std::max(hi, alpha[i] + r);
  }
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
      d = alpha[i] - x - b2 / d;
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++count;
    }
    return count;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lanczos_smallest(
    const std::function<void(std::span<const double>, std::span<double>)>& apply,
    std::span<const double> start, int steps) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> v(start.begin(), start.end());
  if (kernels::normalize(v) == 0.0) throw std::invalid_argument("lanczos needs a nonzero start");
  basis.push_back(v);

  std::vector<double> w(n);
  for (int j = 0; j < steps; ++j) {
    apply(basis[j], w);
    const double a = kernels::dot(basis[j], w);
    alpha.push_back(a);
    kernels::axpy(-a, basis[j], w);
    if (j > 0) kernels::axpy(-beta[j - 1], basis[j - 1], w);
    for (std::size_t k = 0; k < basis.size(); ++k)
      kernels::axpy(-kernels::dot(basis[k], w), basis[k], w);
    const double b = kernels::nrm2(w);
    if (j + 1 == steps || b <= 1e-12 * std::max(1.0, std::abs(a))) break;
    beta.push_back(b);
    std::vector<double> next(w);
    kernels::scale(1.0 / b, next);
    basis.push_back(std::move(next));
  }
  return tridiag_smallest(alpha, beta);
}

void SolverConfig::validate() const {
  if (tau2 && !(tau1 < *tau2)) fail(Errc::InvalidSpec, "tau1 must be below tau2");
  if (!(grad_tol > 0.0) || !(energy_tol > 0.0) || !(inner_nni_tol > 0.0))
    fail(Errc::InvalidSpec, "tolerances must be positive");
  if (max_iter < 1) fail(Errc::InvalidSpec, "max_iter must be at least 1");
  if (max_halvings < 1 || inner_max_iter < 1)
    fail(Errc::InvalidSpec, "iteration caps must be at least 1");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::None: return "NONE";
    case Termination::GradTol: return "GRAD_TOL";
    case Termination::EnergyTol: return "ENERGY_TOL";
    case Termination::MaxIter: return "MAX_ITER";
  }
  return "NONE";
}

Termination check_stop(const IterateState& current, const IterateState* previous,
                       const SolverConfig& cfg) {
  if (current.grad_norm <= cfg.grad_tol) return Termination::GradTol;
  if (previous != nullptr) {
    const double rel =
        std::abs(current.energy - previous->energy) / (std::abs(previous->energy) + 1.0);
    if (rel <= cfg.energy_tol) return Termination::EnergyTol;
  }
  return Termination::None;
}

std::vector<double> initial_guess(const Grid& grid, InitialGuess kind) {
  const std::size_t n = grid.size();
  std::vector<double> u(n, 1.0);
  if (kind == InitialGuess::Gaussian) {
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < n; ++i) {
      grid.node(i, x);
      double r2 = 0.0;
      for (int a = 0; a < grid.dims; ++a) r2 += x[a] * x[a];
      u[i] = std::exp(-0.5 * r2);
    }
  }
  kernels::normalize(u);
  return u;
}

namespace {

// Upper shift bound on the general path: the Lanczos estimate of
// lambda_min(A) minus a margin that shrinks with the block gradient, so the
// shift gap closes at the rate the iterate converges.
double auto_shift_cap(double estimate, double block_grad) {
  const double margin = std::min(1e-3 * std::max(1.0, std::abs(estimate)), 0.1 * block_grad);
  return estimate - margin;
}

// Shift selection from a cached operator apply. The M-matrix path uses the
// exact componentwise Perron bound; the general path takes the top of the
// window [tau1, tau2], with tau2 estimated per block when not configured.
// The componentwise ratio is not consulted off the M-matrix path: the global
// mixing of spectral applies turns the ratios at small components into
// round-off noise.
double shift_from_coupled(const CoupledProblem& p, std::span<const double> u,
                          std::span<const double> v, std::span<const double> coupled_u,
                          double block_grad, const SolverConfig& cfg) {
  if (p.a1->m_matrix()) {
    const auto mr = kernels::min_ratio(coupled_u, u);
    return std::max(cfg.tau1, mr.nonpositive ? cfg.tau1 : mr.value);
  }

  double tau2;
  if (cfg.tau2) {
    tau2 = *cfg.tau2;
  } else {
    const double est = lanczos_smallest(
        [&](std::span<const double> x, std::span<double> y) { apply_coupled(p, u, v, x, y); }, u,
        kLanczosSteps);
    tau2 = auto_shift_cap(est, block_grad);
  }
  return tau2 > cfg.tau1 ? tau2 : cfg.tau1;
}

struct HalfStep {
  double lambda = 0.0;
  double delta = 0.0;
  double theta = 0.0;  // 0 when skipped
  int halvings = 0;
  double tangency = 0.0;
  bool skipped = false;
};

// Bordered solve with the shift-halving retry used when positive
// definiteness of the shifted Jacobian cannot be certified a priori. The
// final attempt runs at tau1 itself.
BorderedSolution bordered_with_retry(const CoupledProblem& p, std::span<const double> u,
                                     std::span<const double> v, double& lambda,
                                     std::span<const double> coupled_u, const SolverConfig& cfg) {
  for (int attempt = 0;; ++attempt) {
    try {
      return solve_bordered(p, u, v, lambda, cfg.inner, coupled_u);
    } catch (const SolverError& err) {
      const bool recoverable =
          err.code() == Errc::IndefiniteJacobian || err.code() == Errc::DegenerateBorder;
      if (!recoverable || attempt > kShiftRetries || !(lambda > cfg.tau1)) throw;
      lambda = attempt < kShiftRetries ? cfg.tau1 + 0.5 * (lambda - cfg.tau1) : cfg.tau1;
    }
  }
}

// One damped Newton step on the u block; updates u in place. `eval` must be
// current for (u, v).
HalfStep anni_half_step(const CoupledProblem& p, std::vector<double>& u,
                        std::span<const double> v, const HalfEval& eval,
                        const SolverConfig& cfg) {
  HalfStep out;
  out.lambda = shift_from_coupled(p, u, v, eval.coupled, std::sqrt(eval.grad_sq), cfg);
  const BorderedSolution bs = bordered_with_retry(p, u, v, out.lambda, eval.coupled, cfg);
  out.delta = bs.delta;
  const double step_norm = kernels::nrm2(bs.delta_u);
  if (step_norm <= kStepFloor) {
    out.skipped = true;
    return out;
  }
  out.tangency = std::abs(kernels::dot(u, bs.delta_u));

  double theta = 1.0;
  std::vector<double> w(p.n);
  for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
    kernels::combine(u, theta, bs.delta_u, w);
    kernels::normalize(w);
    const double d = half_energy(p, w, v) - eval.half_energy;
    if (d < 0.0) {
      out.theta = theta;
      out.halvings = halvings;
      u = w;
      return out;
    }
    theta *= 0.5;
  }
  fail(Errc::LineSearchStall,
       "no descent within " + std::to_string(cfg.max_halvings) + " halvings");
}

IterateState make_state(const std::vector<double>& u, const std::vector<double>& v,
                        double lambda, double mu, double f, double grad) {
  IterateState s;
  s.u = u;
  s.v = v;
  s.lambda = lambda;
  s.mu = mu;
  s.energy = f;
  s.grad_norm = grad;
  return s;
}

[[noreturn]] void rethrow_with_iteration(const SolverError& err, int k) {
  throw SolverError(err.code(),
                    std::string(err.what()).substr(std::string(to_string(err.code())).size() + 2) +
                        " (outer iteration " + std::to_string(k) + ")");
}

}  // namespace

double select_shift(const CoupledProblem& p, std::span<const double> u, std::span<const double> v,
                    const SolverConfig& cfg) {
  const HalfEval eval = eval_half(p, u, v);
  return shift_from_coupled(p, u, v, eval.coupled, std::sqrt(eval.grad_sq), cfg);
}

LineSearchResult line_search(const CoupledProblem& p, std::span<const double> u,
                             std::span<const double> delta_u, std::span<const double> v,
                             const SolverConfig& cfg) {
  const double step_norm = kernels::nrm2(delta_u);
  if (!(step_norm > 0.0)) throw std::invalid_argument("line search needs a nonzero step");
  if (std::abs(kernels::dot(u, delta_u)) > 1e-6 * std::max(1.0, step_norm))
    throw std::invalid_argument("line search step must be tangent to the sphere");

  const double f0 = half_energy(p, u, v);
  LineSearchResult res;
  res.u_next.resize(p.n);
  double theta = 1.0;
  for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
    kernels::combine(u, theta, delta_u, res.u_next);
    kernels::normalize(res.u_next);
    const double d = half_energy(p, res.u_next, v) - f0;
    if (d < 0.0) {
      res.theta = theta;
      res.halvings = halvings;
      res.descent = d;
      return res;
    }
    theta *= 0.5;
  }
  fail(Errc::LineSearchStall,
       "no descent within " + std::to_string(cfg.max_halvings) + " halvings");
}

SolveReport anni(const CoupledProblem& p, const SolverConfig& cfg) {
  return anni(p, cfg, initial_guess(p.grid, cfg.init), initial_guess(p.grid, cfg.init));
}

SolveReport anni(const CoupledProblem& p, const SolverConfig& cfg, std::vector<double> u0,
                 std::vector<double> v0) {
  p.validate();
  cfg.validate();
  const auto t0 = Clock::now();
  const CoupledProblem ps = swapped(p);

  std::vector<double> u = std::move(u0);
  std::vector<double> v = std::move(v0);
  kernels::normalize(u);
  kernels::normalize(v);

  SolveReport rep;
  IterateState prev;
  bool have_prev = false;
  rep.termination = Termination::MaxIter;

  for (int k = 0;; ++k) {
    const HalfEval eu = eval_half(p, u, v);
    const HalfEval ev = eval_half(ps, v, u);
    const double f = eu.half_energy + 0.5 * p.beta22 * ev.quartic + ev.quad;
    const double grad = std::sqrt(eu.grad_sq + ev.grad_sq);

    IterateState cur = make_state(u, v, eu.rayleigh, ev.rayleigh, f, grad);
    const Termination stop = check_stop(cur, have_prev ? &prev : nullptr, cfg);
    if (stop != Termination::None || k >= cfg.max_iter) {
      rep.termination = stop != Termination::None ? stop : Termination::MaxIter;
      rep.converged = stop != Termination::None;
      rep.final = std::move(cur);
      rep.iterations = k;
      break;
    }

    IterationRecord rec;
    rec.energy = f;
    rec.grad_norm = grad;
    try {
      const HalfStep hu = anni_half_step(p, u, v, eu, cfg);
      rec.lambda = hu.lambda;
      rec.theta_u = hu.theta;
      rec.delta_u = hu.delta;
      rec.halvings_u = hu.halvings;
      rec.tangency_u = hu.tangency;
      rec.min_u = kernels::min_element(u);

      const HalfEval ev2 = eval_half(ps, v, u);
      const HalfStep hv = anni_half_step(ps, v, u, ev2, cfg);
      rec.mu = hv.lambda;
      rec.theta_v = hv.theta;
      rec.delta_v = hv.delta;
      rec.halvings_v = hv.halvings;
      rec.tangency_v = hv.tangency;
      rec.min_v = kernels::min_element(v);
    } catch (const SolverError& err) {
      rethrow_with_iteration(err, k);
    }
    rep.history.push_back(rec);
    prev = std::move(cur);
    have_prev = true;
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

NniResult nni(const CoupledProblem& p, std::span<const double> v_fixed, std::vector<double> u0,
              const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  std::vector<double>& u = u0;
  kernels::normalize(u);
  const bool m_path = p.a1->m_matrix();

  NniResult res;
  std::vector<double> w(p.n), hw(p.n);
  for (int l = 0; l < cfg.inner_max_iter; ++l) {
    const HalfEval eval = eval_half(p, u, v_fixed);
    if (std::sqrt(eval.grad_sq) <= cfg.inner_nni_tol) {
      res.u = std::move(u);
      res.lambda = eval.rayleigh;
      res.iterations = l;
      return res;
    }

    double lambda;
    if (m_path) {
      const auto mr = kernels::min_ratio(eval.coupled, u);
      if (mr.nonpositive)
        fail(Errc::NonpositiveIterate, "inner Newton iterate lost strict positivity");
      lambda = mr.value;
    } else {
      lambda = shift_from_coupled(p, u, v_fixed, eval.coupled, std::sqrt(eval.grad_sq), cfg);
    }

    const BorderedSolution bs = bordered_with_retry(p, u, v_fixed, lambda, eval.coupled, cfg);
    if (kernels::nrm2(bs.delta_u) <= kStepFloor) {
      res.u = std::move(u);
      res.lambda = eval.rayleigh;
      res.iterations = l;
      return res;
    }

    double theta = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
      kernels::combine(u, theta, bs.delta_u, w);
      kernels::normalize(w);
      bool ok;
      if (m_path) {
        // Shifted residual must stay componentwise positive so the inner
        // eigenvalue estimates increase monotonically.
        apply_coupled(p, w, v_fixed, w, hw);
        kernels::axpy(-lambda, w, hw);
        ok = kernels::all_positive(hw);
      } else {
        ok = half_energy(p, w, v_fixed) < eval.half_energy;
      }
      if (ok) {
        u = w;
        accepted = true;
        break;
      }
      theta *= 0.5;
    }
    if (!accepted)
      fail(Errc::LineSearchStall, "inner Newton step found no admissible damping");
  }
  fail(Errc::NoConvergence,
       "inner Newton solve exhausted " + std::to_string(cfg.inner_max_iter) + " iterations");
}

SolveReport alm(const CoupledProblem& p, const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  const auto t0 = Clock::now();
  const CoupledProblem ps = swapped(p);

  std::vector<double> u = initial_guess(p.grid, cfg.init);
  std::vector<double> v = u;

  SolveReport rep;
  IterateState prev;
  bool have_prev = false;

  for (int k = 0;; ++k) {
    const HalfEval eu = eval_half(p, u, v);
    const HalfEval ev = eval_half(ps, v, u);
    const double f = eu.half_energy + 0.5 * p.beta22 * ev.quartic + ev.quad;
    const double grad = std::sqrt(eu.grad_sq + ev.grad_sq);

    IterateState cur = make_state(u, v, eu.rayleigh, ev.rayleigh, f, grad);
    const Termination stop = check_stop(cur, have_prev ? &prev : nullptr, cfg);
    if (stop != Termination::None || k >= cfg.max_iter) {
      rep.termination = stop != Termination::None ? stop : Termination::MaxIter;
      rep.converged = stop != Termination::None;
      rep.final = std::move(cur);
      rep.iterations = k;
      break;
    }

    IterationRecord rec;
    rec.energy = f;
    rec.grad_norm = grad;
    try {
      NniResult ru = nni(p, v, u, cfg);
      u = std::move(ru.u);
      rec.lambda = ru.lambda;
      rec.inner_u = ru.iterations;
      rec.min_u = kernels::min_element(u);

      NniResult rv = nni(ps, u, v, cfg);
      v = std::move(rv.u);
      rec.mu = rv.lambda;
      rec.inner_v = rv.iterations;
      rec.min_v = kernels::min_element(v);
    } catch (const SolverError& err) {
      rethrow_with_iteration(err, k);
    }
    rep.total_inner += rec.inner_u + rec.inner_v;
    rep.history.push_back(rec);
    prev = std::move(cur);
    have_prev = true;
  }
  rep.wall_time = seconds_since(t0);
  return rep;
}

namespace {

struct BlockEval {
  std::vector<double> coupling_diag;  // sum_{s != j} sym(beta)_{js} (u^s)^2
  std::vector<double> coupled;        // A_{v}(u) u
  double quad = 0.0;                  // u' A_j u
  double rayleigh = 0.0;
  double block_energy = 0.0;  // 2 h~(u) + u'A_j u + u'(C .* u)
  double grad_sq = 0.0;
};

std::vector<double> block_coupling_diag(const std::vector<BlockSpec>& blocks,
                                        const std::vector<std::vector<double>>& states,
                                        const std::vector<std::vector<double>>& sym_coupling,
                                        std::size_t j) {
  const std::size_t n = states[j].size();
  std::vector<double> c(n, 0.0);
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    if (s == j) continue;
    const double w = sym_coupling[j][s];
    if (w == 0.0) continue;
    const auto& us = states[s];
    for (std::size_t i = 0; i < n; ++i) c[i] += w * us[i] * us[i];
  }
  return c;
}

double block_energy_at(const BlockSpec& block, std::span<const double> coupling_diag,
                       std::span<const double> u, std::vector<double>& scratch) {
  block.op->apply(u, scratch);
  double f = kernels::dot(u, scratch) + 2.0 * block.nonlinearity.value(u);
  for (std::size_t i = 0; i < u.size(); ++i) f += coupling_diag[i] * u[i] * u[i];
  return f;
}

BlockEval eval_block(const std::vector<BlockSpec>& blocks,
                     const std::vector<std::vector<double>>& states,
                     const std::vector<std::vector<double>>& sym_coupling, std::size_t j) {
  const BlockSpec& block = blocks[j];
  const auto& u = states[j];
  const std::size_t n = u.size();

  BlockEval e;
  e.coupling_diag = block_coupling_diag(blocks, states, sym_coupling, j);
  e.coupled.resize(n);
  block.op->apply(u, e.coupled);
  e.quad = kernels::dot(u, e.coupled);

  std::vector<double> rho(n);
  block.nonlinearity.ratio(u, rho);
  for (std::size_t i = 0; i < n; ++i) e.coupled[i] += (rho[i] + e.coupling_diag[i]) * u[i];

  e.rayleigh = kernels::dot(u, e.coupled);
  double coupling_quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) coupling_quad += e.coupling_diag[i] * u[i] * u[i];
  e.block_energy = 2.0 * block.nonlinearity.value(u) + e.quad + coupling_quad;

  std::vector<double> proj(n);
  kernels::combine(e.coupled, -e.rayleigh, u, proj);
  e.grad_sq = kernels::nrm2sq(proj);
  return e;
}

}  // namespace

SolveReport multiblock_anni(const std::vector<BlockSpec>& blocks, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t m = blocks.size();
  if (m < 2) fail(Errc::InvalidSpec, "multi-block solves need at least two blocks");
  const std::size_t n = blocks[0].op ? blocks[0].op->size() : 0;
  for (const BlockSpec& b : blocks) {
    if (!b.op || b.op->size() != n) fail(Errc::InvalidSpec, "blocks must share one operator size");
    if (b.coupling_row.size() != m)
      fail(Errc::InvalidSpec, "each coupling row must have one entry per block");
    if (!b.nonlinearity.value || !b.nonlinearity.ratio || !b.nonlinearity.curvature_diag)
      fail(Errc::InvalidSpec, "block nonlinearity plugin is incomplete");
  }

  std::vector<std::vector<double>> sym(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t s = 0; s < m; ++s)
      if (j != s) sym[j][s] = 0.5 * (blocks[j].coupling_row[s] + blocks[s].coupling_row[j]);

  const auto t0 = Clock::now();
  std::vector<std::vector<double>> states(m, initial_guess(blocks[0].op->grid(), cfg.init));

  SolveReport rep;
  IterateState prev;
  bool have_prev = false;
  std::vector<double> scratch(n), extra(n), w(n);

  for (int k = 0;; ++k) {
    // Total objective and combined projected gradient at the sweep start.
    double f = 0.0, grad_sq = 0.0;
    std::vector<double> block_rayleigh(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const BlockEval e = eval_block(blocks, states, sym, j);
      f += e.quad + 2.0 * blocks[j].nonlinearity.value(states[j]);
      grad_sq += e.grad_sq;
      block_rayleigh[j] = e.rayleigh;
    }
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t s = j + 1; s < m; ++s)
        if (sym[j][s] != 0.0) f += sym[j][s] * kernels::sum_sq_prod(states[j], states[s]);

    IterateState cur =
        make_state(states[0], states[1], block_rayleigh[0], block_rayleigh[1], f,
                   std::sqrt(grad_sq));
    const Termination stop = check_stop(cur, have_prev ? &prev : nullptr, cfg);
    if (stop != Termination::None || k >= cfg.max_iter) {
      rep.termination = stop != Termination::None ? stop : Termination::MaxIter;
      rep.converged = stop != Termination::None;
      rep.final = std::move(cur);
      rep.iterations = k;
      break;
    }

    IterationRecord rec;
    rec.energy = f;
    rec.grad_norm = std::sqrt(grad_sq);

    for (std::size_t j = 0; j < m; ++j) {
      const BlockSpec& block = blocks[j];
      std::vector<double>& u = states[j];
      const BlockEval e = eval_block(blocks, states, sym, j);

      double lambda;
      if (block.op->m_matrix()) {
        const auto mr = kernels::min_ratio(e.coupled, u);
        lambda = std::max(cfg.tau1, mr.nonpositive ? cfg.tau1 : mr.value);
      } else {
        double tau2;
        if (cfg.tau2) {
          tau2 = *cfg.tau2;
        } else {
          std::vector<double> rho(n);
          block.nonlinearity.ratio(u, rho);
          tau2 = auto_shift_cap(
              lanczos_smallest(
                  [&](std::span<const double> x, std::span<double> y) {
                    block.op->apply(x, y);
                    for (std::size_t i = 0; i < n; ++i)
                      y[i] += (rho[i] + e.coupling_diag[i]) * x[i];
                  },
                  u, kLanczosSteps),
              std::sqrt(e.grad_sq));
        }
        lambda = tau2 > cfg.tau1 ? tau2 : cfg.tau1;
      }

      block.nonlinearity.curvature_diag(u, extra);
      kernels::axpy(1.0, e.coupling_diag, extra);

      std::vector<double> r(e.coupled);
      kernels::axpy(-lambda, u, r);

      BorderedSolution bs;
      try {
        for (int attempt = 0;; ++attempt) {
          try {
            const std::vector<double> y1 = solve_shifted(*block.op, extra, lambda, u, cfg.inner);
            const std::vector<double> y2 = solve_shifted(*block.op, extra, lambda, r, cfg.inner);
            const double t = kernels::dot(u, y1);
            if (!(t > 0.0))
              fail(Errc::DegenerateBorder, "u'J^-1 u is not positive for block " +
                                               std::to_string(j));
            bs.delta = kernels::dot(u, y2) / t;
            bs.delta_u.assign(n, 0.0);
            kernels::axpy(bs.delta, y1, bs.delta_u);
            kernels::axpy(-1.0, y2, bs.delta_u);
            break;
          } catch (const SolverError& err) {
            const bool recoverable = err.code() == Errc::IndefiniteJacobian ||
                                     err.code() == Errc::DegenerateBorder;
            if (!recoverable || attempt > kShiftRetries || !(lambda > cfg.tau1)) throw;
            lambda = attempt < kShiftRetries ? cfg.tau1 + 0.5 * (lambda - cfg.tau1) : cfg.tau1;
            for (std::size_t i = 0; i < n; ++i) r[i] = e.coupled[i] - lambda * u[i];
          }
        }
      } catch (const SolverError& err) {
        rethrow_with_iteration(err, k);
      }

      if (kernels::nrm2(bs.delta_u) <= kStepFloor) continue;

      double theta = 1.0;
      bool accepted = false;
      for (int halvings = 0; halvings <= cfg.max_halvings; ++halvings) {
        kernels::combine(u, theta, bs.delta_u, w);
        kernels::normalize(w);
        if (block_energy_at(block, e.coupling_diag, w, scratch) < e.block_energy) {
          if (j == 0) {
            rec.lambda = lambda;
            rec.theta_u = theta;
            rec.delta_u = bs.delta;
            rec.halvings_u = halvings;
          } else if (j == 1) {
            rec.mu = lambda;
            rec.theta_v = theta;
            rec.delta_v = bs.delta;
            rec.halvings_v = halvings;
          }
          u = w;
          accepted = true;
          break;
        }
        theta *= 0.5;
      }
      if (!accepted)
        rethrow_with_iteration(
            SolverError(Errc::LineSearchStall, "no descent for block " + std::to_string(j)), k);
    }
    rep.history.push_back(rec);
    prev = std::move(cur);
    have_prev = true;
  }

  rep.block_states = states;
  rep.wall_time = seconds_since(t0);
  return rep;
}

}  // namespace becgs
