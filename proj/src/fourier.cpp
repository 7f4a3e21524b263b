// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "becgs/kernels.hpp"

namespace becgs {

namespace {

// FFTW plan creation/destruction is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct FourierTransformer::Workspace {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

struct FourierTransformer::Pool {
  mutable std::mutex mu;
  mutable std::vector<Workspace> free;
};

FourierTransformer::FourierTransformer(int dims, std::array<int, 3> shape,
                                       std::array<double, 3> lengths)
    : dims_(dims), shape_(shape), lengths_(lengths), pool_(std::make_unique<Pool>()) {
  rsize_ = 1;
  for (int a = 0; a < dims_; ++a) rsize_ *= static_cast<std::size_t>(shape_[a]);
  inv_n_ = 1.0 / static_cast<double>(rsize_);

  const int last = dims_ - 1;
  const int nc_last = shape_[last] / 2 + 1;
  csize_ = static_cast<std::size_t>(nc_last);
  for (int a = 0; a < last; ++a) csize_ *= static_cast<std::size_t>(shape_[a]);

  laplace_.resize(csize_);
  bin_weight_.resize(csize_);
  std::array<int, 3> cshape = shape_;
  cshape[last] = nc_last;
  std::array<double, 3> kbase{};
  for (int a = 0; a < dims_; ++a) kbase[a] = 2.0 * std::numbers::pi / lengths_[a];

  std::array<int, 3> idx{0, 0, 0};
  for (std::size_t flat = 0; flat < csize_; ++flat) {
    double k2 = 0.0;
    for (int a = 0; a < dims_; ++a) {
      int m = idx[a];
      if (a != last && m > shape_[a] / 2) m -= shape_[a];
      const double k = kbase[a] * m;
      k2 += k * k;
    }
    laplace_[flat] = k2;
    const int ml = idx[last];
    const bool self_conj = (ml == 0) || (2 * ml == shape_[last]);
    bin_weight_[flat] = self_conj ? 1.0 : 2.0;
    for (int a = dims_ - 1; a >= 0; --a) {
      if (++idx[a] < cshape[a]) break;
      idx[a] = 0;
    }
  }
}

FourierTransformer::~FourierTransformer() {
  std::lock_guard<std::mutex> plan_lock(planner_mutex());
  for (Workspace& ws : pool_->free) {
    fftw_destroy_plan(ws.fwd);
    fftw_destroy_plan(ws.bwd);
    fftw_free(ws.real);
    fftw_free(ws.spec);
  }
}

void FourierTransformer::execute(std::span<const double> sym, bool invert,
                                 std::span<const double> x, std::span<double> y) const {
  Workspace ws;
  {
    std::lock_guard<std::mutex> lock(pool_->mu);
    if (!pool_->free.empty()) {
      ws = pool_->free.back();
      pool_->free.pop_back();
    }
  }
  if (ws.real == nullptr) {
    std::lock_guard<std::mutex> plan_lock(planner_mutex());
    ws.real = fftw_alloc_real(rsize_);
    ws.spec = fftw_alloc_complex(csize_);
    int n[3] = {shape_[0], shape_[1], shape_[2]};
    ws.fwd = fftw_plan_dft_r2c(dims_, n, ws.real, ws.spec, FFTW_ESTIMATE);
    ws.bwd = fftw_plan_dft_c2r(dims_, n, ws.spec, ws.real, FFTW_ESTIMATE);
  }

  std::memcpy(ws.real, x.data(), rsize_ * sizeof(double));
  fftw_execute(ws.fwd);
  double* spec = &ws.spec[0][0];
  const std::size_t nc = csize_;
  const double inv_n = inv_n_;
  if (invert) {
    #pragma omp parallel for schedule(static) if (kernels::parallel_enabled(nc))
    for (long long i = 0; i < static_cast<long long>(nc); ++i) {
      const double f = inv_n / sym[i];
      spec[2 * i] *= f;
      spec[2 * i + 1] *= f;
    }
  } else {
    #pragma omp parallel for schedule(static) if (kernels::parallel_enabled(nc))
    for (long long i = 0; i < static_cast<long long>(nc); ++i) {
      const double f = inv_n * sym[i];
      spec[2 * i] *= f;
      spec[2 * i + 1] *= f;
    }
  }
  fftw_execute(ws.bwd);
  std::memcpy(y.data(), ws.real, rsize_ * sizeof(double));

  std::lock_guard<std::mutex> lock(pool_->mu);
  pool_->free.push_back(ws);
}

void FourierTransformer::apply_symbol(std::span<const double> sym, std::span<const double> x,
                                      std::span<double> y) const {
  execute(sym, false, x, y);
}

void FourierTransformer::solve_symbol(std::span<const double> sym, std::span<const double> b,
                                      std::span<double> y) const {
  execute(sym, true, b, y);
}

double FourierTransformer::mean_symbol(std::span<const double> sym) const {
  double s = 0.0;
  for (std::size_t i = 0; i < csize_; ++i) s += bin_weight_[i] * sym[i];
  return s * inv_n_;
}

std::shared_ptr<const FourierTransformer> shared_transformer(int dims, std::array<int, 3> shape,
                                                             std::array<double, 3> lengths) {
  using Key = std::tuple<int, int, int, int, double, double, double>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const FourierTransformer>> cache;

  const Key key{dims, shape[0], shape[1], shape[2], lengths[0], lengths[1], lengths[2]};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto t = std::make_shared<const FourierTransformer>(dims, shape, lengths);
  cache.emplace(key, t);
  return t;
}

}  // namespace becgs
