// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/grid.hpp"

#include <cmath>
#include <string>

#include "becgs/errors.hpp"
#include "becgs/kernels.hpp"

namespace becgs {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Domain Domain::box(int dims, double lo, double hi) {
  Domain d;
  d.dims = dims;
  for (int a = 0; a < dims; ++a) {
    d.lower[a] = lo;
    d.upper[a] = hi;
  }
  d.validate();
  return d;
}

void Domain::validate() const {
  if (dims < 1 || dims > 3) fail(Errc::InvalidSpec, "domain dims must be 1, 2 or 3");
  for (int a = 0; a < dims; ++a) {
    if (!(lower[a] < upper[a]))
      fail(Errc::InvalidSpec, "domain lower must be below upper on axis " + std::to_string(a));
  }
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::harmonic(std::span<const double> weights) {
  PotentialSpec p;
  for (std::size_t a = 0; a < weights.size() && a < 3; ++a) p.harmonic_weights[a] = weights[a];
  return p;
}

PotentialSpec PotentialSpec::harmonic_lattice(std::span<const double> weights, double amplitude,
                                              double wavenumber, LatticeForm form) {
  PotentialSpec p = harmonic(weights);
  p.lattice_amplitude = amplitude;
  p.lattice_wavenumber = wavenumber;
  p.lattice = form;
  return p;
}

PotentialSpec PotentialSpec::custom_fn(std::function<double(std::span<const double>)> fn) {
  PotentialSpec p;
  p.kind = Kind::Custom;
  p.custom = std::move(fn);
  return p;
}

double PotentialSpec::evaluate(std::span<const double> x) const {
  if (kind == Kind::Custom) return custom(x);
  double v = offset;
  for (std::size_t a = 0; a < x.size(); ++a) v += 0.5 * harmonic_weights[a] * x[a] * x[a];
  if (lattice != LatticeForm::None && lattice_amplitude != 0.0) {
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double s = (lattice == LatticeForm::Sin2) ? std::sin(lattice_wavenumber * x[a])
                                                      : std::cos(lattice_wavenumber * x[a]);
      v += lattice_amplitude * s * s;
    }
  }
  return v;
}

void PotentialSpec::validate(int dims) const {
  if (kind == Kind::Custom) {
    if (!custom) fail(Errc::InvalidSpec, "custom potential evaluator is empty");
    return;
  }
  for (int a = 0; a < dims; ++a) {
    if (harmonic_weights[a] < 0.0)
      fail(Errc::InvalidSpec, "harmonic weight must be nonnegative on axis " + std::to_string(a));
  }
}

Grid Grid::interior(const Domain& domain, std::span<const int> n) {
  domain.validate();
  Grid g;
  g.scheme = Scheme::FD;
  g.dims = domain.dims;
  for (int a = 0; a < g.dims; ++a) {
    if (n[a] < 3) fail(Errc::InvalidSpec, "FD grids need n >= 3 per axis");
    g.counts[a] = n[a] - 1;
    g.spacing[a] = domain.length(a) / n[a];
    g.axis_nodes[a].resize(g.counts[a]);
    for (int j = 1; j < n[a]; ++j) g.axis_nodes[a][j - 1] = domain.lower[a] + j * g.spacing[a];
  }
  return g;
}

Grid Grid::periodic(const Domain& domain, std::span<const int> n) {
  domain.validate();
  Grid g;
  g.scheme = Scheme::Spectral;
  g.dims = domain.dims;
  for (int a = 0; a < g.dims; ++a) {
    if (!is_pow2(n[a]) || n[a] < 4)
      fail(Errc::InvalidSpec, "spectral grids need a power-of-two n >= 4 per axis");
    g.counts[a] = n[a];
    g.spacing[a] = domain.length(a) / n[a];
    g.axis_nodes[a].resize(g.counts[a]);
    for (int j = 0; j < n[a]; ++j) g.axis_nodes[a][j] = domain.lower[a] + j * g.spacing[a];
  }
  return g;
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dims; ++a) s *= static_cast<std::size_t>(counts[a]);
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dims; ++a) v *= spacing[a];
  return v;
}

void Grid::node(std::size_t flat, std::span<double> out) const {
  for (int a = dims - 1; a >= 0; --a) {
    const std::size_t c = static_cast<std::size_t>(counts[a]);
    out[a] = axis_nodes[a][flat % c];
    flat /= c;
  }
}

std::vector<double> sample_potential(const PotentialSpec& pot, const Grid& grid) {
  pot.validate(grid.dims);
  const std::size_t n = grid.size();
  std::vector<double> values(n);
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < n; ++i) {
    grid.node(i, x);
    const double v = pot.evaluate(std::span<const double>(x.data(), grid.dims));
    if (!std::isfinite(v))
      fail(Errc::NonfinitePotential, "potential is not finite at node " + std::to_string(i));
    values[i] = v;
  }
  return values;
}

void SymmetricOperator::apply_kinetic(std::span<const double> x, std::span<double> y) const {
  if (structure_ == OperatorStructure::TridiagonalBlocks) {
    const auto& c = grid_.counts;
    switch (grid_.dims) {
      case 1:
        kernels::fd_apply_1d(size(), kinetic_diag_, kinetic_off_[0], x.data(), y.data());
        break;
      case 2:
        kernels::fd_apply_2d(c[0], c[1], kinetic_diag_, kinetic_off_[0], kinetic_off_[1], x.data(),
                             y.data());
        break;
      default:
        kernels::fd_apply_3d(c[0], c[1], c[2], kinetic_diag_, kinetic_off_[0], kinetic_off_[1],
                             kinetic_off_[2], x.data(), y.data());
    }
  } else {
    transformer_->apply_symbol(kinetic_symbol_, x, y);
  }
}

void SymmetricOperator::apply(std::span<const double> x, std::span<double> y) const {
  apply_kinetic(x, y);
  kernels::add_diag_product(potential_, x, y);
}

std::vector<double> SymmetricOperator::apply(std::span<const double> x) const {
  std::vector<double> y(x.size());
  apply(x, y);
  return y;
}

std::vector<double> SymmetricOperator::diagonal() const {
  std::vector<double> d(potential_);
  double kin = kinetic_diag_;
  if (structure_ == OperatorStructure::FourierDiagonalPlusDiagonal)
    kin = transformer_->mean_symbol(kinetic_symbol_);
  for (double& x : d) x += kin;
  return d;
}

SymmetricOperator SymmetricOperator::scaled(double factor) const {
  if (!(factor > 0.0)) fail(Errc::InvalidSpec, "operator scale factor must be positive");
  SymmetricOperator s(*this);
  s.kinetic_diag_ *= factor;
  for (double& o : s.kinetic_off_) o *= factor;
  for (double& p : s.potential_) p *= factor;
  for (double& k : s.kinetic_symbol_) k *= factor;
  return s;
}

SymmetricOperator build_fd_operator(const Domain& domain, std::span<const int> n,
                                    const PotentialSpec& pot) {
  SymmetricOperator op;
  op.structure_ = OperatorStructure::TridiagonalBlocks;
  op.grid_ = Grid::interior(domain, n);
  op.potential_ = sample_potential(pot, op.grid_);
  op.kinetic_diag_ = 0.0;
  for (int a = 0; a < op.grid_.dims; ++a) {
    const double h = op.grid_.spacing[a];
    op.kinetic_diag_ += 1.0 / (h * h);
    op.kinetic_off_[a] = -0.5 / (h * h);
  }
  op.m_matrix_ = op.kinetic_diag_ + kernels::min_element(op.potential_) > 0.0;
  return op;
}

SymmetricOperator build_spectral_operator(const Domain& domain, std::span<const int> n,
                                          const PotentialSpec& pot) {
  SymmetricOperator op;
  op.structure_ = OperatorStructure::FourierDiagonalPlusDiagonal;
  op.grid_ = Grid::periodic(domain, n);
  op.potential_ = sample_potential(pot, op.grid_);
  std::array<double, 3> lengths{};
  for (int a = 0; a < domain.dims; ++a) lengths[a] = domain.length(a);
  op.transformer_ = shared_transformer(domain.dims, op.grid_.counts, lengths);
  op.kinetic_symbol_.assign(op.transformer_->laplace_symbol().begin(),
                            op.transformer_->laplace_symbol().end());
  for (double& s : op.kinetic_symbol_) s *= 0.5;
  op.m_matrix_ = false;
  return op;
}

}  // namespace becgs
