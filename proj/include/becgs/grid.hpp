// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "becgs/fourier.hpp"

namespace becgs {

enum class Scheme { FD, Spectral };

// Truncated computational box in trap units.
struct Domain {
  int dims = 1;
  std::array<double, 3> lower{};
  std::array<double, 3> upper{};

  static Domain box(int dims, double lo, double hi);
  double length(int axis) const { return upper[axis] - lower[axis]; }
  void validate() const;
};

enum class LatticeForm { None, Sin2, Cos2 };

// V(x) = offset + 1/2 sum_a w_a x_a^2 + amplitude * sum_a trig^2(k x_a),
// or an arbitrary pointwise evaluator.
struct PotentialSpec {
  enum class Kind { HarmonicLattice, Custom };

  Kind kind = Kind::HarmonicLattice;
  double offset = 0.0;
  std::array<double, 3> harmonic_weights{};
  double lattice_amplitude = 0.0;
  double lattice_wavenumber = 0.0;
  LatticeForm lattice = LatticeForm::None;
  std::function<double(std::span<const double>)> custom;

  static PotentialSpec zero();
  static PotentialSpec harmonic(std::span<const double> weights);
  static PotentialSpec harmonic_lattice(std::span<const double> weights, double amplitude,
                                        double wavenumber, LatticeForm form);
  static PotentialSpec custom_fn(std::function<double(std::span<const double>)> fn);

  double evaluate(std::span<const double> x) const;
  void validate(int dims) const;
};

// Tensor grid of unknowns. FD grids hold the n-1 interior Dirichlet nodes per
// axis; spectral grids hold the n periodic nodes (right endpoint excluded).
// Flattening is row-major with the last axis fastest.
struct Grid {
  Scheme scheme = Scheme::FD;
  int dims = 1;
  std::array<int, 3> counts{1, 1, 1};
  std::array<double, 3> spacing{};
  std::array<std::vector<double>, 3> axis_nodes;

  static Grid interior(const Domain& domain, std::span<const int> n);
  static Grid periodic(const Domain& domain, std::span<const int> n);

  std::size_t size() const;
  double cell_volume() const;  // h^d
  void node(std::size_t flat, std::span<double> out) const;
};

enum class OperatorStructure { TridiagonalBlocks, FourierDiagonalPlusDiagonal };

// Discretized -1/2 Laplacian + diag(V), applied matrix-free. Immutable after
// construction; apply is reentrant.
class SymmetricOperator {
 public:
  OperatorStructure structure() const { return structure_; }
  bool m_matrix() const { return m_matrix_; }
  const Grid& grid() const { return grid_; }
  std::size_t size() const { return potential_.size(); }
  const std::vector<double>& potential() const { return potential_; }

  double kinetic_diag() const { return kinetic_diag_; }
  const std::array<double, 3>& kinetic_off() const { return kinetic_off_; }
  const std::vector<double>& kinetic_symbol() const { return kinetic_symbol_; }
  const std::shared_ptr<const FourierTransformer>& transformer() const { return transformer_; }

  bool direct_tridiag_capable() const {
    return structure_ == OperatorStructure::TridiagonalBlocks && grid_.dims == 1;
  }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_kinetic(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> diagonal() const;

  // Operator scaled by a positive factor (used for the per-component
  // operators alpha*A and (1-alpha)*A).
  SymmetricOperator scaled(double factor) const;

  friend SymmetricOperator build_fd_operator(const Domain&, std::span<const int>,
                                             const PotentialSpec&);
  friend SymmetricOperator build_spectral_operator(const Domain&, std::span<const int>,
                                                   const PotentialSpec&);

 private:
  OperatorStructure structure_ = OperatorStructure::TridiagonalBlocks;
  bool m_matrix_ = false;
  Grid grid_;
  std::vector<double> potential_;
  double kinetic_diag_ = 0.0;             // FD: sum_a 1/h_a^2
  std::array<double, 3> kinetic_off_{};   // FD: -1/(2 h_a^2) per axis
  std::vector<double> kinetic_symbol_;    // spectral: 1/2 |k|^2 packed
  std::shared_ptr<const FourierTransformer> transformer_;
};

SymmetricOperator build_fd_operator(const Domain& domain, std::span<const int> n,
                                    const PotentialSpec& pot);
SymmetricOperator build_spectral_operator(const Domain& domain, std::span<const int> n,
                                          const PotentialSpec& pot);
std::vector<double> sample_potential(const PotentialSpec& pot, const Grid& grid);

}  // namespace becgs
