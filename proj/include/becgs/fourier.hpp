// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace becgs {

// Real-to-complex FFT pair on a periodic tensor grid, used to apply operators
// that are diagonal in Fourier space. Transforms run through a pool of
// scratch workspaces so apply calls are reentrant; plans are created once per
// workspace with FFTW_ESTIMATE (deterministic plan choice).
class FourierTransformer {
 public:
  // shape: nodes per axis (row-major, last axis fastest); lengths: physical
  // period per axis.
  FourierTransformer(int dims, std::array<int, 3> shape, std::array<double, 3> lengths);
  ~FourierTransformer();

  FourierTransformer(const FourierTransformer&) = delete;
  FourierTransformer& operator=(const FourierTransformer&) = delete;

  int dims() const { return dims_; }
  std::size_t real_size() const { return rsize_; }
  std::size_t spectral_size() const { return csize_; }

  // |k|^2 per packed spectral bin, k = 2 pi m / length with integer m in
  // [-n/2, n/2).
  const std::vector<double>& laplace_symbol() const { return laplace_; }

  // y = IFFT( sym .* FFT(x) ) / N
  void apply_symbol(std::span<const double> sym, std::span<const double> x,
                    std::span<double> y) const;
  // y = IFFT( FFT(b) ./ sym ) / N
  void solve_symbol(std::span<const double> sym, std::span<const double> b,
                    std::span<double> y) const;

  // Sum of sym over the full (unpacked) spectrum divided by N: the common
  // diagonal entry of the operator x -> IFFT(sym .* FFT(x))/N.
  double mean_symbol(std::span<const double> sym) const;

 private:
  struct Workspace;
  struct Pool;

  void execute(std::span<const double> sym, bool invert, std::span<const double> x,
               std::span<double> y) const;

  int dims_;
  std::array<int, 3> shape_;
  std::array<double, 3> lengths_;
  std::size_t rsize_ = 0;
  std::size_t csize_ = 0;
  double inv_n_ = 1.0;
  std::vector<double> laplace_;
  std::vector<double> bin_weight_;  // 1 for self-conjugate bins, 2 otherwise
  std::unique_ptr<Pool> pool_;
};

// Process-wide cache keyed by (dims, shape, lengths); transformer construction
// is cheap but plan reuse across solves avoids repeated FFTW planning.
std::shared_ptr<const FourierTransformer> shared_transformer(int dims, std::array<int, 3> shape,
                                                             std::array<double, 3> lengths);

}  // namespace becgs
