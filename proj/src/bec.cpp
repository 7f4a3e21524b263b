// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/bec.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"

namespace becgs {

void BecSpec::validate() const {
  domain.validate();
  potential.validate(domain.dims);
  if (zeeman_p != 0.0 || zeeman_q != 0.0)
    fail(Errc::InvalidSpec, "reductions require zero Zeeman shifts (p = q = 0)");
  switch (family) {
    case BecFamily::SpinHalf:
      if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::InvalidSpec, "alpha must lie in (0,1)");
      if (!(beta11 > 0.0 && beta22 > 0.0 && beta12 > 0.0))
        fail(Errc::InvalidSpec, "beta11, beta22, beta12 must be positive");
      break;
    case BecFamily::Spin1Reduced:
      if (!(beta1 > 0.0)) fail(Errc::InvalidSpec, "spin-1 reduction needs beta1 > 0");
      if (!(magnetization > -1.0 && magnetization < 1.0))
        fail(Errc::InvalidSpec, "spin-1 magnetization must lie in (-1,1)");
      break;
    case BecFamily::Spin2Reduced:
      if (!(beta2 < 0.0)) fail(Errc::InvalidSpec, "spin-2 reduction needs beta2 < 0");
      if (!(beta1 > beta2 / 20.0)) fail(Errc::InvalidSpec, "spin-2 reduction needs beta1 > beta2/20");
      if (!(magnetization > -2.0 && magnetization < 2.0))
        fail(Errc::InvalidSpec, "spin-2 magnetization must lie in (-2,2)");
      break;
  }
}

SpinReduction reduce_spin1(double beta0, double beta1, double magnetization) {
  if (!(beta1 > 0.0)) fail(Errc::InvalidSpec, "spin-1 reduction needs beta1 > 0");
  if (!(magnetization > -1.0 && magnetization < 1.0))
    fail(Errc::InvalidSpec, "spin-1 magnetization must lie in (-1,1)");
  if (!(beta0 > beta1))
    fail(Errc::InvalidSpec, "spin-1 reduction needs beta0 > beta1 so beta12 > 0");
  return {beta0 + beta1, beta0 + beta1, beta0 - beta1, 0.5 * (1.0 + magnetization)};
}

SpinReduction reduce_spin2(double beta0, double beta1, double beta2, double magnetization) {
  if (!(beta2 < 0.0)) fail(Errc::InvalidSpec, "spin-2 reduction needs beta2 < 0");
  if (!(beta1 > beta2 / 20.0)) fail(Errc::InvalidSpec, "spin-2 reduction needs beta1 > beta2/20");
  if (!(magnetization > -2.0 && magnetization < 2.0))
    fail(Errc::InvalidSpec, "spin-2 magnetization must lie in (-2,2)");
  const double b11 = beta0 + 4.0 * beta1;
  const double b12 = beta0 - 4.0 * beta1 + 0.4 * beta2;
  if (!(b11 > 0.0 && b12 > 0.0))
    fail(Errc::InvalidSpec, "spin-2 reduction produced nonpositive coefficients");
  return {b11, b11, b12, 0.25 * (2.0 + magnetization)};
}

namespace {

SymmetricOperator build_single_particle(const Domain& domain, std::span<const int> n,
                                        Scheme scheme, const PotentialSpec& pot) {
  return scheme == Scheme::FD ? build_fd_operator(domain, n, pot)
                              : build_spectral_operator(domain, n, pot);
}

}  // namespace

CoupledProblem build_spin_half(const BecSpec& spec) {
  spec.validate();

  double b11 = spec.beta11, b22 = spec.beta22, b12 = spec.beta12, alpha = spec.alpha;
  if (spec.family == BecFamily::Spin1Reduced) {
    const SpinReduction r = reduce_spin1(spec.beta0, spec.beta1, spec.magnetization);
    b11 = r.beta11;
    b22 = r.beta22;
    b12 = r.beta12;
    alpha = r.alpha;
  } else if (spec.family == BecFamily::Spin2Reduced) {
    const SpinReduction r = reduce_spin2(spec.beta0, spec.beta1, spec.beta2, spec.magnetization);
    b11 = r.beta11;
    b22 = r.beta22;
    b12 = r.beta12;
    alpha = r.alpha;
  }

  const SymmetricOperator a =
      build_single_particle(spec.domain, std::span<const int>(spec.n.data(), spec.domain.dims),
                            spec.scheme, spec.potential);
  const double hd = a.grid().cell_volume();

  CoupledProblem p;
  p.a1 = std::make_shared<const SymmetricOperator>(a.scaled(alpha));
  p.a2 = std::make_shared<const SymmetricOperator>(a.scaled(1.0 - alpha));
  p.beta11 = b11 * alpha * alpha / hd;
  p.beta22 = b22 * (1.0 - alpha) * (1.0 - alpha) / hd;
  p.beta12 = b12 * alpha * (1.0 - alpha) / hd;
  p.n = a.size();
  p.grid = a.grid();
  p.rescale = {std::sqrt(alpha / hd), std::sqrt((1.0 - alpha) / hd)};
  p.validate();
  return p;
}

CoupledProblem build_custom(const Domain& domain, std::span<const int> n, Scheme scheme,
                            const PotentialSpec& pot, double beta11, double beta22,
                            double beta12) {
  auto a = std::make_shared<const SymmetricOperator>(
      build_single_particle(domain, n, scheme, pot));
  CoupledProblem p;
  p.a1 = a;
  p.a2 = a;
  p.beta11 = beta11;
  p.beta22 = beta22;
  p.beta12 = beta12;
  p.n = a->size();
  p.grid = a->grid();
  p.rescale = {1.0, 1.0};
  p.validate();
  return p;
}

WaveFunctions recover_wavefunctions(const CoupledProblem& p, const IterateState& state) {
  WaveFunctions w;
  w.phi1.resize(p.n);
  w.phi2.resize(p.n);
  kernels::copy(state.u, w.phi1);
  kernels::scale(p.rescale[0], w.phi1);
  kernels::copy(state.v, w.phi2);
  kernels::scale(p.rescale[1], w.phi2);
  return w;
}

NonlinearityPlugin plugin_quartic(double beta) {
  if (!(beta > 0.0)) fail(Errc::InvalidSpec, "quartic plugin needs beta > 0");
  NonlinearityPlugin plug;
  plug.name = "quartic";
  plug.value = [beta](std::span<const double> u) { return 0.25 * beta * kernels::sum_pow4(u); };
  plug.ratio = [beta](std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = beta * u[i] * u[i];
  };
  plug.curvature_diag = [beta](std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 3.0 * beta * u[i] * u[i];
  };
  return plug;
}

NonlinearityPlugin plugin_modified_gpe(LinearMap a) {
  if (!a.apply || a.diag.empty())
    fail(Errc::InvalidSpec, "modified GPE plugin needs a map with its diagonal");
  auto map = std::make_shared<LinearMap>(std::move(a));
  NonlinearityPlugin plug;
  plug.name = "modified_gpe";
  plug.value = [map](std::span<const double> u) {
    std::vector<double> u2(u.size()), au2(u.size());
    kernels::square_into(u, u2);
    map->apply(u2, au2);
    return kernels::dot(u2, au2);
  };
  plug.ratio = [map](std::span<const double> u, std::span<double> out) {
    std::vector<double> u2(u.size());
    kernels::square_into(u, u2);
    map->apply(u2, out);
    kernels::scale(4.0, out);
  };
  plug.curvature_diag = [map](std::span<const double> u, std::span<double> out) {
    std::vector<double> u2(u.size());
    kernels::square_into(u, u2);
    map->apply(u2, out);
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = 4.0 * out[i] + 8.0 * map->diag[i] * u2[i];
  };
  return plug;
}

NonlinearityPlugin plugin_saturable(std::vector<double> a) {
  for (double ai : a)
    if (!(ai > 0.0)) fail(Errc::InvalidSpec, "saturable plugin needs a > 0 componentwise");
  auto coeff = std::make_shared<std::vector<double>>(std::move(a));
  NonlinearityPlugin plug;
  plug.name = "saturable";
  plug.value = [coeff](std::span<const double> u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double u2 = u[i] * u[i];
      s += u2 - std::log(1.0 + u2 / (*coeff)[i]);
    }
    return s;
  };
  plug.ratio = [coeff](std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = 2.0 * (1.0 - 1.0 / ((*coeff)[i] + u[i] * u[i]));
  };
  plug.curvature_diag = [coeff](std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double den = (*coeff)[i] + u[i] * u[i];
      out[i] = 2.0 - 2.0 * ((*coeff)[i] - u[i] * u[i]) / (den * den);
    }
  };
  return plug;
}

NonlinearityPlugin plugin_saturable(double a, std::size_t n) {
  return plugin_saturable(std::vector<double>(n, a));
}

double check_plugin(const NonlinearityPlugin& plugin, std::span<const double> u) {
  const std::size_t n = u.size();
  const double grad_eps = 1e-6;
  const double curv_eps = 1e-4;  // second differences need a larger step
  std::vector<double> rho(n), curv(n), up(u.begin(), u.end()), um(u.begin(), u.end());
  plugin.ratio(u, rho);
  plugin.curvature_diag(u, curv);
  const double f0 = plugin.value(u);

  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    up[i] = u[i] + grad_eps;
    um[i] = u[i] - grad_eps;
    const double grad_fd = (plugin.value(up) - plugin.value(um)) / (2.0 * grad_eps);
    const double grad = rho[i] * u[i];
    worst = std::max(worst, std::abs(grad_fd - grad) / std::max(1.0, std::abs(grad)));

    up[i] = u[i] + curv_eps;
    um[i] = u[i] - curv_eps;
    const double curv_fd =
        (plugin.value(up) - 2.0 * f0 + plugin.value(um)) / (curv_eps * curv_eps);
    worst = std::max(worst, std::abs(curv_fd - curv[i]) / std::max(1.0, std::abs(curv[i])));
    up[i] = u[i];
    um[i] = u[i];
  }
  return worst;
}

}  // namespace becgs
