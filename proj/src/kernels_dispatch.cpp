#include "ccopt/kernels.hpp"

#include <atomic>

namespace ccopt::kern {

namespace {

std::atomic<std::uint64_t> g_reductions{0};
std::atomic<std::uint64_t> g_updates{0};

const detail::Impl* pick_auto() {
#ifdef CCOPT_HAVE_AVX2
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &detail::avx2_impl;
#endif
  return &detail::scalar_impl;
}

std::atomic<const detail::Impl*> g_impl{pick_auto()};
std::atomic<Backend> g_backend{
#ifdef CCOPT_HAVE_AVX2
    (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) ? Backend::avx2
                                                                      : Backend::scalar
#else
    Backend::scalar
#endif
};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool avx2_available() {
#ifdef CCOPT_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void force_backend(Backend b) {
#ifdef CCOPT_HAVE_AVX2
  if (b == Backend::avx2 && avx2_available()) {
    g_impl.store(&detail::avx2_impl);
    g_backend.store(Backend::avx2);
    return;
  }
#endif
  g_impl.store(&detail::scalar_impl);
  g_backend.store(Backend::scalar);
}

void reset_backend() {
  g_impl.store(pick_auto());
  g_backend.store(avx2_available() ? Backend::avx2 : Backend::scalar);
}

PassCounts pass_counts() {
  return {g_reductions.load(std::memory_order_relaxed),
          g_updates.load(std::memory_order_relaxed)};
}

void reset_pass_counts() {
  g_reductions.store(0, std::memory_order_relaxed);
  g_updates.store(0, std::memory_order_relaxed);
}

double dot(const double* a, const double* b, std::size_t n) {
  g_reductions.fetch_add(1, std::memory_order_relaxed);
  return g_impl.load(std::memory_order_relaxed)->dot(a, b, n);
}

double sum_sq(const double* a, std::size_t n) {
  return g_impl.load(std::memory_order_relaxed)->sum_sq(a, n);
}

double weighted_sum_sq(const double* w, const double* a, std::size_t n) {
  return g_impl.load(std::memory_order_relaxed)->weighted_sum_sq(w, a, n);
}

double max_abs(const double* a, std::size_t n) {
  return g_impl.load(std::memory_order_relaxed)->max_abs(a, n);
}

void axpby(double alpha, double* y, double beta, const double* x, std::size_t n) {
  g_updates.fetch_add(1, std::memory_order_relaxed);
  g_impl.load(std::memory_order_relaxed)->axpby(alpha, y, beta, x, n);
}

void scale(double* y, double alpha, const double* x, std::size_t n) {
  g_impl.load(std::memory_order_relaxed)->scale(y, alpha, x, n);
}

void sub(double* y, const double* a, const double* b, std::size_t n) {
  g_impl.load(std::memory_order_relaxed)->sub(y, a, b, n);
}

void matvec(double* y, const double* M, const double* x, std::size_t rows, std::size_t cols) {
  g_impl.load(std::memory_order_relaxed)->matvec(y, M, x, rows, cols);
}

}  // namespace ccopt::kern
