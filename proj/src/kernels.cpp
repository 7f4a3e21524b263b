// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#include "becgs/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace becgs::kernels {

namespace {

// Below this length the fork/join overhead dominates any speedup.
constexpr std::size_t kGrain = 8192;
constexpr double kPositivityFloor = 1e-300;

std::atomic<int> g_threads{0};  // 0 = use the OpenMP default
std::atomic<bool> g_force_serial{false};

int resolved_threads() {
  int t = g_threads.load(std::memory_order_relaxed);
  if (t > 0) return t;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

void set_max_threads(int threads) {
  g_threads.store(threads, std::memory_order_relaxed);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
}

int max_threads() { return resolved_threads(); }

void force_serial(bool on) { g_force_serial.store(on, std::memory_order_relaxed); }

bool serial_forced() { return g_force_serial.load(std::memory_order_relaxed); }

bool parallel_enabled(std::size_t n) {
#ifdef _OPENMP
  return !serial_forced() && n >= kGrain && resolved_threads() > 1;
#else
  (void)n;
  return false;
#endif
}

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2sq(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

double sum_pow4(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) {
    const double x2 = x * x;
    s += x2 * x2;
  }
  return s;
}

double sum_sq_prod(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i] * b[i] * b[i];
  return s;
}

double min_element(std::span<const double> a) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : a) m = std::min(m, x);
  return m;
}

bool all_positive(std::span<const double> a) {
  for (double x : a)
    if (!(x > 0.0)) return false;
  return true;
}

MinRatioResult min_ratio(std::span<const double> numer, std::span<const double> denom) {
  MinRatioResult r{std::numeric_limits<double>::infinity(), false};
  for (std::size_t i = 0; i < numer.size(); ++i) {
    if (denom[i] < kPositivityFloor) {
      r.nonpositive = true;
      return r;
    }
    r.value = std::min(r.value, numer[i] / denom[i]);
  }
  return r;
}

void copy(std::span<const double> a, std::span<double> out) {
  std::copy(a.begin(), a.end(), out.begin());
}

void scale(double alpha, std::span<double> a) {
  for (double& x : a) x *= alpha;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void combine(std::span<const double> u, double theta, std::span<const double> du,
             std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + theta * du[i];
}

void square_into(std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * u[i];
}

void add_diag_product(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += d[i] * x[i];
}

void add_shifted_diag_product(std::span<const double> pot, double c1, std::span<const double> u,
                              double c2, std::span<const double> v, double c0,
                              std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double d = c0;
    if (!pot.empty()) d += pot[i];
    if (!u.empty()) d += c1 * u[i] * u[i];
    if (!v.empty()) d += c2 * v[i] * v[i];
    y[i] += d * x[i];
  }
}

void fd_apply_1d(std::size_t n, double diag_sum, double off, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag_sum * x[i];
    if (i > 0) s += off * x[i - 1];
    if (i + 1 < n) s += off * x[i + 1];
    y[i] = s;
  }
}

void fd_apply_2d(int n0, int n1, double diag_sum, double off0, double off1, const double* x,
                 double* y) {
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n1 + j;
      double s = diag_sum * x[idx];
      if (i > 0) s += off0 * x[idx - n1];
      if (i + 1 < n0) s += off0 * x[idx + n1];
      if (j > 0) s += off1 * x[idx - 1];
      if (j + 1 < n1) s += off1 * x[idx + 1];
      y[idx] = s;
    }
  }
}

void fd_apply_3d(int n0, int n1, int n2, double diag_sum, double off0, double off1, double off2,
                 const double* x, double* y) {
  const std::size_t s1 = static_cast<std::size_t>(n1) * n2;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      for (int k = 0; k < n2; ++k) {
        const std::size_t idx = static_cast<std::size_t>(i) * s1 +
                                static_cast<std::size_t>(j) * n2 + k;
        double s = diag_sum * x[idx];
        if (i > 0) s += off0 * x[idx - s1];
        if (i + 1 < n0) s += off0 * x[idx + s1];
        if (j > 0) s += off1 * x[idx - n2];
        if (j + 1 < n1) s += off1 * x[idx + n2];
        if (k > 0) s += off2 * x[idx - 1];
        if (k + 1 < n2) s += off2 * x[idx + 1];
        y[idx] = s;
      }
    }
  }
}

}  // namespace serial

namespace {

#ifdef _OPENMP
// Deterministic sum reduction: static partition, partials combined in
// thread-id order.
template <typename Term>
double reduce_sum(std::size_t n, Term&& term) {
  const int nt = std::min<int>(resolved_threads(), 64);
  double part[64] = {};
  #pragma omp parallel num_threads(nt)
  {
    const int t = omp_get_thread_num();
    double local = 0.0;
    #pragma omp for schedule(static) nowait
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      local += term(static_cast<std::size_t>(i));
    part[t] = local;
  }
  double s = 0.0;
  for (int t = 0; t < nt; ++t) s += part[t];
  return s;
}
#endif

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
#ifdef _OPENMP
  if (parallel_enabled(a.size()))
    return reduce_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
#endif
  return serial::dot(a, b);
}

double nrm2sq(std::span<const double> a) {
#ifdef _OPENMP
  if (parallel_enabled(a.size()))
    return reduce_sum(a.size(), [&](std::size_t i) { return a[i] * a[i]; });
#endif
  return serial::nrm2sq(a);
}

double nrm2(std::span<const double> a) { return std::sqrt(nrm2sq(a)); }

double sum_pow4(std::span<const double> a) {
#ifdef _OPENMP
  if (parallel_enabled(a.size()))
    return reduce_sum(a.size(), [&](std::size_t i) {
      const double x2 = a[i] * a[i];
      return x2 * x2;
    });
#endif
  return serial::sum_pow4(a);
}

double sum_sq_prod(std::span<const double> a, std::span<const double> b) {
#ifdef _OPENMP
  if (parallel_enabled(a.size()))
    return reduce_sum(a.size(), [&](std::size_t i) { return a[i] * a[i] * b[i] * b[i]; });
#endif
  return serial::sum_sq_prod(a, b);
}

double min_element(std::span<const double> a) {
#ifdef _OPENMP
  if (parallel_enabled(a.size())) {
    const std::size_t n = a.size();
    const int nt = std::min<int>(resolved_threads(), 64);
    double part[64];
    for (int t = 0; t < nt; ++t) part[t] = std::numeric_limits<double>::infinity();
    #pragma omp parallel num_threads(nt)
    {
      const int t = omp_get_thread_num();
      double local = std::numeric_limits<double>::infinity();
      #pragma omp for schedule(static) nowait
      for (long long i = 0; i < static_cast<long long>(n); ++i)
        local = std::min(local, a[static_cast<std::size_t>(i)]);
      part[t] = local;
    }
    double m = std::numeric_limits<double>::infinity();
    for (int t = 0; t < nt; ++t) m = std::min(m, part[t]);
    return m;
  }
#endif
  return serial::min_element(a);
}

bool all_positive(std::span<const double> a) { return min_element(a) > 0.0; }

MinRatioResult min_ratio(std::span<const double> numer, std::span<const double> denom) {
#ifdef _OPENMP
  if (parallel_enabled(numer.size())) {
    const std::size_t n = numer.size();
    const int nt = std::min<int>(resolved_threads(), 64);
    double part[64];
    bool bad[64] = {};
    for (int t = 0; t < nt; ++t) part[t] = std::numeric_limits<double>::infinity();
    #pragma omp parallel num_threads(nt)
    {
      const int t = omp_get_thread_num();
      double local = std::numeric_limits<double>::infinity();
      bool local_bad = false;
      #pragma omp for schedule(static) nowait
      for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (denom[k] < kPositivityFloor)
          local_bad = true;
        else if (!local_bad)
          local = std::min(local, numer[k] / denom[k]);
      }
      part[t] = local;
      bad[t] = local_bad;
    }
    MinRatioResult r{std::numeric_limits<double>::infinity(), false};
    for (int t = 0; t < nt; ++t) {
      r.nonpositive = r.nonpositive || bad[t];
      r.value = std::min(r.value, part[t]);
    }
    return r;
  }
#endif
  return serial::min_ratio(numer, denom);
}

void copy(std::span<const double> a, std::span<double> out) {
  const std::size_t n = a.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] = a[i];
}

void scale(double alpha, std::span<double> a) {
  const std::size_t n = a.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) a[i] *= alpha;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] += alpha * x[i];
}

void combine(std::span<const double> u, double theta, std::span<const double> du,
             std::span<double> out) {
  const std::size_t n = u.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] = u[i] + theta * du[i];
}

double normalize(std::span<double> a) {
  const double norm = nrm2(a);
  if (norm > 0.0) scale(1.0 / norm, a);
  return norm;
}

void square_into(std::span<const double> u, std::span<double> out) {
  const std::size_t n = u.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) out[i] = u[i] * u[i];
}

void add_diag_product(std::span<const double> d, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) y[i] += d[i] * x[i];
}

void add_shifted_diag_product(std::span<const double> pot, double c1, std::span<const double> u,
                              double c2, std::span<const double> v, double c0,
                              std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const bool has_pot = !pot.empty();
  const bool has_u = !u.empty();
  const bool has_v = !v.empty();
  #pragma omp parallel for schedule(static) if (parallel_enabled(n))
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    double d = c0;
    if (has_pot) d += pot[i];
    if (has_u) d += c1 * u[i] * u[i];
    if (has_v) d += c2 * v[i] * v[i];
    y[i] += d * x[i];
  }
}

void fd_apply_1d(std::size_t n, double diag_sum, double off, const double* x, double* y) {
  if (!parallel_enabled(n)) {
    serial::fd_apply_1d(n, diag_sum, off, x, y);
    return;
  }
  #pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    double s = diag_sum * x[i];
    if (i > 0) s += off * x[i - 1];
    if (i + 1 < static_cast<long long>(n)) s += off * x[i + 1];
    y[i] = s;
  }
}

void fd_apply_2d(int n0, int n1, double diag_sum, double off0, double off1, const double* x,
                 double* y) {
  const std::size_t n = static_cast<std::size_t>(n0) * n1;
  if (!parallel_enabled(n)) {
    serial::fd_apply_2d(n0, n1, diag_sum, off0, off1, x, y);
    return;
  }
  #pragma omp parallel for schedule(static)
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n1 + j;
      double s = diag_sum * x[idx];
      if (i > 0) s += off0 * x[idx - n1];
      if (i + 1 < n0) s += off0 * x[idx + n1];
      if (j > 0) s += off1 * x[idx - 1];
      if (j + 1 < n1) s += off1 * x[idx + 1];
      y[idx] = s;
    }
  }
}

void fd_apply_3d(int n0, int n1, int n2, double diag_sum, double off0, double off1, double off2,
                 const double* x, double* y) {
  const std::size_t s1 = static_cast<std::size_t>(n1) * n2;
  const std::size_t n = static_cast<std::size_t>(n0) * s1;
  if (!parallel_enabled(n)) {
    serial::fd_apply_3d(n0, n1, n2, diag_sum, off0, off1, off2, x, y);
    return;
  }
  #pragma omp parallel for schedule(static)
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      for (int k = 0; k < n2; ++k) {
        const std::size_t idx = static_cast<std::size_t>(i) * s1 +
                                static_cast<std::size_t>(j) * n2 + k;
        double s = diag_sum * x[idx];
        if (i > 0) s += off0 * x[idx - s1];
        if (i + 1 < n0) s += off0 * x[idx + s1];
        if (j > 0) s += off1 * x[idx - n2];
        if (j + 1 < n1) s += off1 * x[idx + n2];
        if (k > 0) s += off2 * x[idx - 1];
        if (k + 1 < n2) s += off2 * x[idx + 1];
        y[idx] = s;
      }
    }
  }
}

}  // namespace becgs::kernels
