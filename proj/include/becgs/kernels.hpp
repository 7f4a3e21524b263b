// Copyright 2026 The becgs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel inner loops shared by the operators and solvers. Every kernel
// has a plain serial implementation under kernels::serial, kept as the
// reference the OpenMP variants are tested against, and a dispatching
// front-end that picks the parallel path for large enough arrays.
//
// Reductions combine per-thread partial sums in thread-id order with a static
// schedule, so results are reproducible run to run for a fixed thread count.

namespace becgs::kernels {

// Global execution controls. Threads default to OMP_NUM_THREADS.
void set_max_threads(int threads);
int max_threads();
void force_serial(bool on);
bool serial_forced();

// True when the dispatchers will take the OpenMP path for length n.
bool parallel_enabled(std::size_t n);

struct MinRatioResult {
  double value;          // min_i numer[i] / denom[i]
  bool nonpositive;      // some denom[i] fell below the positivity floor
};

namespace serial {

double dot(std::span<const double> a, std::span<const double> b);
double nrm2sq(std::span<const double> a);
double sum_pow4(std::span<const double> a);
double sum_sq_prod(std::span<const double> a, std::span<const double> b);  // sum a_i^2 b_i^2
double min_element(std::span<const double> a);
bool all_positive(std::span<const double> a);
MinRatioResult min_ratio(std::span<const double> numer, std::span<const double> denom);

void copy(std::span<const double> a, std::span<double> out);
void scale(double alpha, std::span<double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);  // y += alpha x
// out = u + theta * du
void combine(std::span<const double> u, double theta, std::span<const double> du,
             std::span<double> out);
void square_into(std::span<const double> u, std::span<double> out);
// y += d .* x
void add_diag_product(std::span<const double> d, std::span<const double> x, std::span<double> y);
// y += (V + c1 u^2 + c2 v^2 + c0) .* x ; V, u, v may be empty
void add_shifted_diag_product(std::span<const double> pot, double c1, std::span<const double> u,
                              double c2, std::span<const double> v, double c0,
                              std::span<const double> x, std::span<double> y);

// Dirichlet second-difference stencils on tensor grids; y = diag_sum * x +
// sum_axis off_a * (left + right neighbours). Off-grid neighbours are zero.
void fd_apply_1d(std::size_t n, double diag_sum, double off, const double* x, double* y);
void fd_apply_2d(int n0, int n1, double diag_sum, double off0, double off1, const double* x,
                 double* y);
void fd_apply_3d(int n0, int n1, int n2, double diag_sum, double off0, double off1, double off2,
                 const double* x, double* y);

}  // namespace serial

double dot(std::span<const double> a, std::span<const double> b);
double nrm2sq(std::span<const double> a);
double nrm2(std::span<const double> a);
double sum_pow4(std::span<const double> a);
double sum_sq_prod(std::span<const double> a, std::span<const double> b);
double min_element(std::span<const double> a);
bool all_positive(std::span<const double> a);
MinRatioResult min_ratio(std::span<const double> numer, std::span<const double> denom);

void copy(std::span<const double> a, std::span<double> out);
void scale(double alpha, std::span<double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void combine(std::span<const double> u, double theta, std::span<const double> du,
             std::span<double> out);
// Normalizes in place, returns the original 2-norm.
double normalize(std::span<double> a);
void square_into(std::span<const double> u, std::span<double> out);
void add_diag_product(std::span<const double> d, std::span<const double> x, std::span<double> y);
void add_shifted_diag_product(std::span<const double> pot, double c1, std::span<const double> u,
                              double c2, std::span<const double> v, double c0,
                              std::span<const double> x, std::span<double> y);

void fd_apply_1d(std::size_t n, double diag_sum, double off, const double* x, double* y);
void fd_apply_2d(int n0, int n1, double diag_sum, double off0, double off1, const double* x,
                 double* y);
void fd_apply_3d(int n0, int n1, int n2, double diag_sum, double off0, double off1, double off2,
                 const double* x, double* y);

}  // namespace becgs::kernels
