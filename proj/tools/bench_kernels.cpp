// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

// Times the serial reference kernels against the OpenMP dispatch path and
// prints the speedup per kernel and size.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "becgs/kernels.hpp"

namespace {

using becgs::kernels::force_serial;

double time_of(const std::function<void()>& body, int reps) {
  // One warmup, then best of three timed batches.
  body();
  double best = 1e300;
  for (int batch = 0; batch < 3; ++batch) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) body();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    best = std::min(best, dt / reps);
  }
  return best;
}

void report(const std::string& name, std::size_t n, const std::function<void()>& serial_body,
            const std::function<void()>& parallel_body, int reps) {
  force_serial(true);
  const double ts = time_of(serial_body, reps);
  force_serial(false);
  const double tp = time_of(parallel_body, reps);
  std::printf("%-18s n=%-9zu serial %10.3f us   openmp %10.3f us   speedup %5.2fx\n", name.c_str(),
              n, ts * 1e6, tp * 1e6, ts / tp);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  if (argc > 1) threads = std::atoi(argv[1]);
  if (threads > 0) becgs::kernels::set_max_threads(threads);
  std::printf("threads: %d\n", becgs::kernels::max_threads());

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.1, 1.0);

  for (std::size_t n : {std::size_t{1} << 14, std::size_t{1} << 18, std::size_t{1} << 21}) {
    std::vector<double> a(n), b(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
    }
    const int reps = n > (1u << 19) ? 20 : 200;
    volatile double sink = 0.0;

    report("dot", n, [&] { sink = becgs::kernels::serial::dot(a, b); },
           [&] { sink = becgs::kernels::dot(a, b); }, reps);
    report("sum_pow4", n, [&] { sink = becgs::kernels::serial::sum_pow4(a); },
           [&] { sink = becgs::kernels::sum_pow4(a); }, reps);
    report("axpy", n, [&] { becgs::kernels::serial::axpy(0.5, a, y); },
           [&] { becgs::kernels::axpy(0.5, a, y); }, reps);
    report("fused_diag", n,
           [&] { becgs::kernels::serial::add_shifted_diag_product(a, 3.0, b, 1.0, b, -0.5, a, y); },
           [&] { becgs::kernels::add_shifted_diag_product(a, 3.0, b, 1.0, b, -0.5, a, y); }, reps);
    report("fd_apply_1d", n,
           [&] { becgs::kernels::serial::fd_apply_1d(n, 2.0, -0.5, a.data(), y.data()); },
           [&] { becgs::kernels::fd_apply_1d(n, 2.0, -0.5, a.data(), y.data()); }, reps);

    const int c = static_cast<int>(std::cbrt(static_cast<double>(n)));
    const std::size_t n3 = static_cast<std::size_t>(c) * c * c;
    std::vector<double> x3(n3, 1.0), y3(n3);
    report("fd_apply_3d", n3,
           [&] {
             becgs::kernels::serial::fd_apply_3d(c, c, c, 6.0, -0.5, -0.5, -0.5, x3.data(),
                                                 y3.data());
           },
           [&] { becgs::kernels::fd_apply_3d(c, c, c, 6.0, -0.5, -0.5, -0.5, x3.data(), y3.data()); },
           reps);
    (void)sink;
  }
  return 0;
}
