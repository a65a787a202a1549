#pragma once
// Vector kernels used by the hot loops (objective evaluation, ES sampling).
// Every kernel has a scalar reference implementation and, on x86 machines
// with AVX2+FMA, a SIMD variant selected once at startup. force_backend()
// lets tests pin either path; results may differ by rounding only.
#include <cstddef>
#include <cstdint>

namespace ccopt::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool avx2_available();
void force_backend(Backend b);
void reset_backend();

// O(n)-pass counters. dot() bumps `reductions`, axpby() bumps `updates`;
// they exist so tests can assert cost contracts on the sampling product.
struct PassCounts {
  std::uint64_t reductions = 0;
  std::uint64_t updates = 0;
};
PassCounts pass_counts();
void reset_pass_counts();

double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double weighted_sum_sq(const double* w, const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);

// y = alpha*y + beta*x
void axpby(double alpha, double* y, double beta, const double* x, std::size_t n);
// y = alpha*x
void scale(double* y, double alpha, const double* x, std::size_t n);
// y = a - b
void sub(double* y, const double* a, const double* b, std::size_t n);
// y = M x, M row-major rows x cols
void matvec(double* y, const double* M, const double* x, std::size_t rows, std::size_t cols);

namespace detail {
struct Impl {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  double (*weighted_sum_sq)(const double*, const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpby)(double, double*, double, const double*, std::size_t);
  void (*scale)(double*, double, const double*, std::size_t);
  void (*sub)(double*, const double*, const double*, std::size_t);
  void (*matvec)(double*, const double*, const double*, std::size_t, std::size_t);
};
extern const Impl scalar_impl;
#ifdef CCOPT_HAVE_AVX2
extern const Impl avx2_impl;
#endif
}  // namespace detail

}  // namespace ccopt::kern
