#include <cmath>
#include <cstddef>
#include <vector>

#include "ccopt/kernels.hpp"
#include "ccopt/rng.hpp"
#include "doctest.h"

using namespace ccopt;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -5.0, double hi = 5.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

struct BackendGuard {
  ~BackendGuard() { kern::reset_backend(); }
};

constexpr std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels match naive loops") {
  BackendGuard guard;
  kern::force_backend(kern::Backend::scalar);
  Rng rng(0x1a2b3c4d5e6f7788ULL);
  for (std::size_t n : kSizes) {
    std::vector<double> a = random_vec(n, rng);
    std::vector<double> b = random_vec(n, rng);
    std::vector<double> w = random_vec(n, rng, 0.1, 3.0);

    double dot_ref = 0.0, ss_ref = 0.0, wss_ref = 0.0, ma_ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dot_ref += a[i] * b[i];
      ss_ref += a[i] * a[i];
      wss_ref += w[i] * a[i] * a[i];
      ma_ref = std::max(ma_ref, std::fabs(a[i]));
    }
    CHECK(kern::dot(a.data(), b.data(), n) == doctest::Approx(dot_ref).epsilon(1e-14));
    CHECK(kern::sum_sq(a.data(), n) == doctest::Approx(ss_ref).epsilon(1e-14));
    CHECK(kern::weighted_sum_sq(w.data(), a.data(), n) ==
          doctest::Approx(wss_ref).epsilon(1e-14));
    CHECK(kern::max_abs(a.data(), n) == ma_ref);

    std::vector<double> y = b;
    kern::axpby(0.75, y.data(), -1.25, a.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y[i] == doctest::Approx(0.75 * b[i] - 1.25 * a[i]).epsilon(1e-14));

    std::vector<double> s(n);
    kern::scale(s.data(), 2.5, a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(s[i] == 2.5 * a[i]);

    std::vector<double> d(n);
    kern::sub(d.data(), a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(d[i] == a[i] - b[i]);
  }
}

TEST_CASE("matvec matches naive product, square and rectangular") {
  BackendGuard guard;
  kern::force_backend(kern::Backend::scalar);
  Rng rng(0x9e3779b97f4a7c15ULL);
  const std::size_t shapes[][2] = {{1, 1}, {2, 3}, {3, 2}, {4, 4}, {5, 17}, {16, 16}, {31, 7}};
  for (auto [rows, cols] : shapes) {
    std::vector<double> m = random_vec(rows * cols, rng);
    std::vector<double> x = random_vec(cols, rng);
    std::vector<double> y(rows);
    kern::matvec(y.data(), m.data(), x.data(), rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols; ++c) s += m[r * cols + c] * x[c];
      CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
    }
  }
}

TEST_CASE("zero-length inputs are identities") {
  CHECK(kern::dot(nullptr, nullptr, 0) == 0.0);
  CHECK(kern::sum_sq(nullptr, 0) == 0.0);
  CHECK(kern::weighted_sum_sq(nullptr, nullptr, 0) == 0.0);
  CHECK(kern::max_abs(nullptr, 0) == 0.0);
}

TEST_CASE("avx2 path agrees with scalar on every tail size") {
  if (!kern::avx2_available()) return;
  BackendGuard guard;
  Rng rng(0xfeedbeefcafe1234ULL);
  for (std::size_t n : kSizes) {
    std::vector<double> a = random_vec(n, rng);
    std::vector<double> b = random_vec(n, rng);
    std::vector<double> w = random_vec(n, rng, 0.1, 3.0);

    kern::force_backend(kern::Backend::scalar);
    double dot_s = kern::dot(a.data(), b.data(), n);
    double ss_s = kern::sum_sq(a.data(), n);
    double wss_s = kern::weighted_sum_sq(w.data(), a.data(), n);
    double ma_s = kern::max_abs(a.data(), n);
    std::vector<double> y_s = b;
    kern::axpby(1.5, y_s.data(), -0.5, a.data(), n);
    std::vector<double> sc_s(n), sub_s(n);
    kern::scale(sc_s.data(), -3.0, a.data(), n);
    kern::sub(sub_s.data(), a.data(), b.data(), n);
    std::vector<double> mv_s(n);
    std::vector<double> m = random_vec(n * n, rng);
    kern::matvec(mv_s.data(), m.data(), a.data(), n, n);

    kern::force_backend(kern::Backend::avx2);
    REQUIRE(kern::active_backend() == kern::Backend::avx2);
    CHECK(kern::dot(a.data(), b.data(), n) == doctest::Approx(dot_s).epsilon(1e-13));
    CHECK(kern::sum_sq(a.data(), n) == doctest::Approx(ss_s).epsilon(1e-13));
    CHECK(kern::weighted_sum_sq(w.data(), a.data(), n) == doctest::Approx(wss_s).epsilon(1e-13));
    CHECK(kern::max_abs(a.data(), n) == ma_s);
    std::vector<double> y_v = b;
    kern::axpby(1.5, y_v.data(), -0.5, a.data(), n);
    std::vector<double> sc_v(n), sub_v(n);
    kern::scale(sc_v.data(), -3.0, a.data(), n);
    kern::sub(sub_v.data(), a.data(), b.data(), n);
    std::vector<double> mv_v(n);
    kern::matvec(mv_v.data(), m.data(), a.data(), n, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(y_v[i] == doctest::Approx(y_s[i]).epsilon(1e-13));
      CHECK(sc_v[i] == sc_s[i]);
      CHECK(sub_v[i] == sub_s[i]);
      CHECK(mv_v[i] == doctest::Approx(mv_s[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("backend forcing and reset") {
  BackendGuard guard;
  kern::force_backend(kern::Backend::scalar);
  CHECK(kern::active_backend() == kern::Backend::scalar);
  kern::force_backend(kern::Backend::avx2);
  if (kern::avx2_available())
    CHECK(kern::active_backend() == kern::Backend::avx2);
  else
    CHECK(kern::active_backend() == kern::Backend::scalar);
  kern::reset_backend();
  CHECK(kern::active_backend() ==
        (kern::avx2_available() ? kern::Backend::avx2 : kern::Backend::scalar));
}

TEST_CASE("pass counters: dot counts a reduction, axpby an update, others nothing") {
  double a[4] = {1, 2, 3, 4}, b[4] = {4, 3, 2, 1}, y[4] = {0, 0, 0, 0};

  kern::reset_pass_counts();
  (void)kern::dot(a, b, 4);
  auto c = kern::pass_counts();
  CHECK(c.reductions == 1);
  CHECK(c.updates == 0);

  kern::reset_pass_counts();
  kern::axpby(1.0, y, 2.0, a, 4);
  c = kern::pass_counts();
  CHECK(c.reductions == 0);
  CHECK(c.updates == 1);

  kern::reset_pass_counts();
  (void)kern::sum_sq(a, 4);
  (void)kern::weighted_sum_sq(b, a, 4);
  (void)kern::max_abs(a, 4);
  kern::scale(y, 2.0, a, 4);
  kern::sub(y, a, b, 4);
  kern::matvec(y, a, b, 2, 2);
  c = kern::pass_counts();
  CHECK(c.reductions == 0);
  CHECK(c.updates == 0);

  kern::reset_pass_counts();
  for (int i = 0; i < 7; ++i) (void)kern::dot(a, b, 4);
  for (int i = 0; i < 3; ++i) kern::axpby(1.0, y, 1.0, a, 4);
  c = kern::pass_counts();
  CHECK(c.reductions == 7);
  CHECK(c.updates == 3);
}

}  // TEST_SUITE
