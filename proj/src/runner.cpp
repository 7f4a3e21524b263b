// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "becgs/errors.hpp"

namespace becgs {

namespace {

struct SweepPoint {
  std::vector<std::pair<std::string, double>> params;
};

std::string format_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::string make_tag(const SweepPoint& point) {
  if (point.params.empty()) return "run";
  std::string tag;
  for (const auto& [name, value] : point.params) {
    if (!tag.empty()) tag += "_";
    tag += name + format_value(value);
  }
  return tag;
}

std::vector<SweepPoint> enumerate_points(const RunConfig& rc) {
  const ProblemConfig& pc = rc.problem;
  std::vector<double> betas = rc.sweep.beta;
  std::vector<double> alphas = rc.sweep.alpha;
  std::vector<double> ms = rc.sweep.magnetization;

  const bool spin_half = pc.family == ProblemFamily::SpinHalf;
  const bool reduced = pc.family == ProblemFamily::Spin1 || pc.family == ProblemFamily::Spin2;

  if (!betas.empty() && !(spin_half && pc.use_beta_ratio))
    fail(Errc::ConfigParse, "sweep.beta requires family spin_half with problem.beta_ratio");
  if (!alphas.empty() && !spin_half)
    fail(Errc::ConfigParse, "sweep.alpha applies to family spin_half only");
  if (!ms.empty() && !reduced)
    fail(Errc::ConfigParse, "sweep.m applies to the reduced spin families only");

  // Base values give a single point when no sweep is present.
  if (spin_half) {
    if (betas.empty()) betas.push_back(pc.use_beta_ratio ? pc.beta_scale
                                                         : std::numeric_limits<double>::quiet_NaN());
    if (alphas.empty()) alphas.push_back(pc.alpha);
  }
  if (reduced && ms.empty()) ms.push_back(pc.magnetization);

  std::vector<SweepPoint> points;
  if (spin_half) {
    for (double b : betas) {
      for (double a : alphas) {
        SweepPoint pt;
        if (pc.use_beta_ratio) pt.params.emplace_back("beta", b);
        pt.params.emplace_back("alpha", a);
        points.push_back(std::move(pt));
      }
    }
  } else if (reduced) {
    for (double m : ms) {
      SweepPoint pt;
      pt.params.emplace_back("m", m);
      points.push_back(std::move(pt));
    }
  } else {
    points.push_back({});
  }
  return points;
}

double param_or(const SweepPoint& point, const std::string& name, double fallback) {
  for (const auto& [n, v] : point.params)
    if (n == name) return v;
  return fallback;
}

CoupledProblem build_problem(const ProblemConfig& pc, const SweepPoint& point) {
  const std::span<const int> n(pc.n.data(), pc.domain.dims);
  if (pc.family == ProblemFamily::Custom) {
    return build_custom(pc.domain, n, pc.scheme, pc.potential, pc.beta11, pc.beta22, pc.beta12);
  }

  BecSpec spec;
  spec.domain = pc.domain;
  spec.n = pc.n;
  spec.scheme = pc.scheme;
  spec.potential = pc.potential;
  spec.zeeman_p = pc.zeeman_p;
  spec.zeeman_q = pc.zeeman_q;
  switch (pc.family) {
    case ProblemFamily::SpinHalf: {
      spec.family = BecFamily::SpinHalf;
      spec.alpha = param_or(point, "alpha", pc.alpha);
      if (pc.use_beta_ratio) {
        const double b = param_or(point, "beta", pc.beta_scale);
        spec.beta11 = pc.beta_ratio[0] * b;
        spec.beta12 = pc.beta_ratio[1] * b;
        spec.beta22 = pc.beta_ratio[2] * b;
      } else {
        spec.beta11 = pc.beta11;
        spec.beta22 = pc.beta22;
        spec.beta12 = pc.beta12;
      }
      break;
    }
    case ProblemFamily::Spin1:
      spec.family = BecFamily::Spin1Reduced;
      spec.beta0 = pc.beta0;
      spec.beta1 = pc.beta1;
      spec.magnetization = param_or(point, "m", pc.magnetization);
      break;
    case ProblemFamily::Spin2:
      spec.family = BecFamily::Spin2Reduced;
      spec.beta0 = pc.beta0;
      spec.beta1 = pc.beta1;
      spec.beta2 = pc.beta2;
      spec.magnetization = param_or(point, "m", pc.magnetization);
      break;
    default:
      fail(Errc::InvalidSpec, "unsupported family for a coupled problem");
  }
  return build_spin_half(spec);
}

std::vector<BlockSpec> build_blocks(const ProblemConfig& pc) {
  const MultiblockConfig& mb = pc.multiblock;
  const std::span<const int> n(pc.n.data(), pc.domain.dims);
  auto op = std::make_shared<const SymmetricOperator>(
      pc.scheme == Scheme::FD ? build_fd_operator(pc.domain, n, pc.potential)
                              : build_spectral_operator(pc.domain, n, pc.potential));

  std::vector<BlockSpec> blocks(mb.m);
  for (int j = 0; j < mb.m; ++j) {
    blocks[j].op = op;
    if (mb.plugin == "quartic") {
      blocks[j].nonlinearity =
          plugin_quartic(mb.quartic_beta[j % mb.quartic_beta.size()]);
    } else if (mb.plugin == "saturable") {
      blocks[j].nonlinearity = plugin_saturable(mb.saturable_a, op->size());
    } else {
      fail(Errc::ConfigParse,
           "multiblock.plugin must be quartic or saturable in config-driven runs");
    }
    blocks[j].coupling_row.assign(mb.coupling.begin() + static_cast<long>(j) * mb.m,
                                  mb.coupling.begin() + static_cast<long>(j + 1) * mb.m);
  }
  return blocks;
}

void write_history(const SolveReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::InvalidSpec, "cannot write history file '" + path + "'");
  out << "iter,energy,grad_norm,lambda,mu,theta_u,theta_v,delta_u,delta_v,"
         "halvings_u,halvings_v,inner_u,inner_v\n";
  char buf[512];
  for (std::size_t k = 0; k < rep.history.size(); ++k) {
    const IterationRecord& r = rep.history[k];
    std::snprintf(buf, sizeof(buf),
                  "%zu,%.17g,%.3e,%.10g,%.10g,%.6g,%.6g,%.10g,%.10g,%d,%d,%d,%d\n", k, r.energy,
                  r.grad_norm, r.lambda, r.mu, r.theta_u, r.theta_v, r.delta_u, r.delta_v,
                  r.halvings_u, r.halvings_v, r.inner_u, r.inner_v);
    out << buf;
  }
}

}  // namespace

void dump_state(const IterateState& state, const Grid& grid, const std::string& path,
                std::array<double, 2> rescale) {
  std::ofstream out(path);
  if (!out) fail(Errc::InvalidSpec, "cannot write state dump '" + path + "'");
  char buf[256];
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    std::string line;
    for (int a = 0; a < grid.dims; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g ", x[a]);
      line += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", rescale[0] * state.u[i],
                  rescale[1] * state.v[i]);
    line += buf;
    out << line;
  }
}

void write_summary(const std::vector<ResultRow>& rows, std::ostream& os) {
  if (rows.empty()) return;
  for (const auto& [name, value] : rows.front().params) os << name << ",";
  os << "f,nrmG,iter,inner_iter,cpu_s,term\n";
  char buf[128];
  for (const ResultRow& row : rows) {
    for (const auto& [name, value] : row.params) os << format_value(value) << ",";
    if (row.ok) {
      std::snprintf(buf, sizeof(buf), "%.10g,%.3e,", row.f, row.nrm_g);
      os << buf;
    } else {
      os << "nan,nan,";
    }
    std::snprintf(buf, sizeof(buf), "%d,%ld,%.4f,", row.iter, row.inner_iter, row.cpu_s);
    os << buf << row.term << "\n";
  }
}

RunOutcome execute(const RunConfig& config, const RunOptions& options) {
  const std::vector<SweepPoint> points = enumerate_points(config);
  const std::string out_dir = options.out_dir.empty() ? config.out_dir : options.out_dir;
  if (options.write_files) std::filesystem::create_directories(out_dir);

  RunOutcome outcome;
  for (const SweepPoint& point : points) {
    ResultRow row;
    row.params = point.params;
    row.tag = make_tag(point);
    try {
      SolverConfig solver = config.solver;
      SolveReport rep;
      Grid grid;
      std::array<double, 2> rescale{1.0, 1.0};

      if (config.algorithm == Algorithm::Multiblock ||
          config.problem.family == ProblemFamily::Multiblock) {
        if (config.algorithm != Algorithm::Multiblock ||
            config.problem.family != ProblemFamily::Multiblock)
          fail(Errc::ConfigParse,
               "multiblock runs need family multiblock and solver.algorithm multiblock");
        const std::vector<BlockSpec> blocks = build_blocks(config.problem);
        grid = blocks[0].op->grid();
        if (config.linear_backend_auto)
          solver.inner.backend = blocks[0].op->direct_tridiag_capable()
                                     ? LinearBackend::DirectTridiag
                                     : LinearBackend::Pcg;
        rep = multiblock_anni(blocks, solver);
      } else {
        const CoupledProblem problem = build_problem(config.problem, point);
        grid = problem.grid;
        rescale = problem.rescale;
        if (config.linear_backend_auto) {
          const LinearSolverConfig def = default_linear_config(problem);
          solver.inner.backend = def.backend;
          if (config.precond_shift_auto) solver.inner.precond_shift = def.precond_shift;
        } else if (config.precond_shift_auto) {
          solver.inner.precond_shift = default_precond_shift(problem);
        }
        rep = config.algorithm == Algorithm::Alm ? alm(problem, solver) : anni(problem, solver);
      }

      row.ok = true;
      row.f = rep.final.energy;
      row.nrm_g = rep.final.grad_norm;
      row.iter = rep.iterations;
      row.inner_iter = rep.total_inner;
      row.cpu_s = rep.wall_time;
      row.term = to_string(rep.termination);
      if (!rep.converged) outcome.all_converged = false;

      if (options.write_files) {
        write_history(rep, out_dir + "/history_" + row.tag + ".csv");
        if (options.dump_states)
          dump_state(rep.final, grid, out_dir + "/state_" + row.tag + ".dat", rescale);
      }
    } catch (const SolverError& err) {
      row.ok = false;
      row.term = to_string(err.code());
      outcome.all_converged = false;
      if (err.code() == Errc::ConfigParse) throw;
    }
    outcome.rows.push_back(std::move(row));
  }

  if (options.write_files) {
    std::ofstream out(out_dir + "/summary.csv");
    write_summary(outcome.rows, out);
  }
  return outcome;
}

}  // namespace becgs
