#include "ccopt/objective.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ccopt/kernels.hpp"

namespace ccopt {

double Objective::evaluate(std::span<const double> x) const {
  if (x.size() != dimension())
    throw std::invalid_argument("evaluate: expected dimension " + std::to_string(dimension()) +
                                ", got " + std::to_string(x.size()));
  if (delay_ms_ > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms_));
  double f = eval_impl(x);
  counter_.fetch_add(1, std::memory_order_relaxed);
  return f;
}

double Objective::optimum_value() const { return std::nan(""); }
std::vector<double> Objective::optimum_point() const { return {}; }

const std::vector<std::string>& base_names() {
  static const std::vector<std::string> names = {
      "sphere", "cigar",       "discus", "cigar_discus", "ellipsoid",
      "different_powers", "schwefel221", "step",   "rosenbrock",   "schwefel12"};
  return names;
}

BaseId base_from_name(const std::string& name) {
  const auto& names = base_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<BaseId>(i);
  throw std::invalid_argument("unknown function id '" + name + "'");
}

std::string base_name(BaseId id) { return base_names()[static_cast<std::size_t>(id)]; }

double eval_base(BaseId id, const double* z, std::size_t n) {
  switch (id) {
    case BaseId::sphere:
      return kern::sum_sq(z, n);
    case BaseId::cigar:
      return z[0] * z[0] + 1e6 * kern::sum_sq(z + 1, n - 1);
    case BaseId::discus:
      return 1e6 * z[0] * z[0] + kern::sum_sq(z + 1, n - 1);
    case BaseId::cigar_discus: {
      double mid = n > 2 ? kern::sum_sq(z + 1, n - 2) : 0.0;
      return z[0] * z[0] + 1e4 * mid + 1e6 * z[n - 1] * z[n - 1];
    }
    case BaseId::ellipsoid: {
      double s = 0.0, denom = n > 1 ? double(n - 1) : 1.0;
      for (std::size_t i = 0; i < n; ++i)
        s += std::pow(10.0, 6.0 * double(i) / denom) * z[i] * z[i];
      return s;
    }
    case BaseId::different_powers: {
      double s = 0.0, denom = n > 1 ? double(n - 1) : 1.0;
      for (std::size_t i = 0; i < n; ++i)
        s += std::pow(std::fabs(z[i]), 2.0 + 4.0 * double(i) / denom);
      return s;
    }
    case BaseId::schwefel221:
      return kern::max_abs(z, n);
    case BaseId::step: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = std::floor(z[i] + 0.5);
        s += v * v;
      }
      return s;
    }
    case BaseId::rosenbrock: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double a = z[i] * z[i] - z[i + 1];
        double b = z[i] - 1.0;
        s += 100.0 * a * a + b * b;
      }
      return s;
    }
    case BaseId::schwefel12: {
      double prefix = 0.0, s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        prefix += z[i];
        s += prefix * prefix;
      }
      return s;
    }
  }
  throw std::logic_error("unreachable base id");
}

namespace {

thread_local std::vector<double> tl_shifted;
thread_local std::vector<double> tl_rotated;

std::vector<double> base_coefficients(BaseId id, std::size_t n) {
  std::vector<double> c;
  if (id == BaseId::ellipsoid && n >= 2) {
    c.resize(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = std::pow(10.0, 6.0 * double(i) / double(n - 1));
  }
  return c;
}

}  // namespace

Table1Objective::Table1Objective(BaseId id, std::size_t dimension)
    : Table1Objective(id, dimension, {}, {}) {}

Table1Objective::Table1Objective(BaseId id, std::size_t dimension,
                                 std::vector<double> rotation_row_major, std::vector<double> shift)
    : id_(id), n_(dimension), rot_(std::move(rotation_row_major)), shift_(std::move(shift)) {
  if (n_ == 0) throw std::invalid_argument("dimension must be positive");
  if (!rot_.empty() && rot_.size() != n_ * n_)
    throw std::invalid_argument("rotation matrix size mismatch");
  if (!shift_.empty() && shift_.size() != n_)
    throw std::invalid_argument("shift vector size mismatch");
  coef_ = base_coefficients(id_, n_);
}

std::string Table1Objective::name() const {
  std::string s = base_name(id_);
  if (has_rotation() || has_shift()) s += "_rs";
  return s;
}

std::vector<double> Table1Objective::optimum_point() const {
  // rosenbrock's base optimum sits at the all-ones vector, everything else at zero;
  // pull it back through the wrappers: x* = s + R^T z*
  std::vector<double> x(n_, 0.0);
  if (id_ == BaseId::rosenbrock) {
    if (has_rotation()) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) x[j] += rot_[i * n_ + j];
    } else {
      x.assign(n_, 1.0);
    }
  }
  if (has_shift())
    for (std::size_t i = 0; i < n_; ++i) x[i] += shift_[i];
  return x;
}

double Table1Objective::eval_impl(std::span<const double> x) const {
  const double* z = x.data();
  if (has_shift()) {
    tl_shifted.resize(n_);
    kern::sub(tl_shifted.data(), z, shift_.data(), n_);
    z = tl_shifted.data();
  }
  if (has_rotation()) {
    tl_rotated.resize(n_);
    kern::matvec(tl_rotated.data(), rot_.data(), z, n_, n_);
    z = tl_rotated.data();
  }
  if (id_ == BaseId::ellipsoid && !coef_.empty())
    return kern::weighted_sum_sq(coef_.data(), z, n_);
  return eval_base(id_, z, n_);
}

std::vector<double> random_rotation(std::size_t n, Rng& rng) {
  std::vector<double> m(n * n);
  for (auto& v : m) v = rng.gauss();
  // modified Gram-Schmidt on rows, two passes for tight orthogonality
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      double* ri = m.data() + i * n;
      for (std::size_t j = 0; j < i; ++j) {
        const double* rj = m.data() + j * n;
        double proj = kern::dot(ri, rj, n);
        kern::axpby(1.0, ri, -proj, rj, n);
      }
      double norm = std::sqrt(kern::sum_sq(ri, n));
      if (norm < 1e-12) throw std::runtime_error("degenerate rotation draw");
      kern::scale(ri, 1.0 / norm, ri, n);
    }
  }
  return m;
}

double orthogonality_defect(const std::vector<double>& rot, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += rot[k * n + i] * rot[k * n + j];
      worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

std::shared_ptr<Table1Objective> make_rotated_shifted(BaseId id, std::size_t dimension,
                                                      std::uint64_t seed) {
  if (dimension < 2) throw std::invalid_argument("rotated-shifted instances need dimension >= 2");
  Rng rng(seed);
  std::vector<double> rot = random_rotation(dimension, rng);
  std::vector<double> shift(dimension);
  for (auto& v : shift) v = rng.uniform(-10.0, 10.0);
  return std::make_shared<Table1Objective>(id, dimension, std::move(rot), std::move(shift));
}

std::shared_ptr<Table1Objective> make_rotated_shifted(const std::string& base,
                                                      std::size_t dimension, std::uint64_t seed) {
  return make_rotated_shifted(base_from_name(base), dimension, seed);
}

OverlappingObjective::OverlappingObjective(std::size_t dimension,
                                           std::vector<Component> components, bool conforming,
                                           std::vector<double> conforming_shift)
    : n_(dimension),
      components_(std::move(components)),
      conforming_(conforming),
      conforming_shift_(std::move(conforming_shift)) {
  std::vector<bool> covered(n_, false);
  for (const auto& c : components_) {
    for (int idx : c.indices) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= n_)
        throw std::invalid_argument("component index out of range");
      covered[static_cast<std::size_t>(idx)] = true;
    }
    std::size_t sz = c.indices.size();
    if (c.rotation.size() != sz * sz || c.shift.size() != sz)
      throw std::invalid_argument("component rotation/shift size mismatch");
  }
  for (bool b : covered)
    if (!b) throw std::invalid_argument("component index sets do not cover all coordinates");
}

double OverlappingObjective::optimum_value() const {
  return conforming_ ? 0.0 : std::nan("");
}

std::vector<double> OverlappingObjective::optimum_point() const {
  return conforming_ ? conforming_shift_ : std::vector<double>{};
}

double OverlappingObjective::eval_impl(std::span<const double> x) const {
  thread_local std::vector<double> gathered, rotated;
  double total = 0.0;
  for (const auto& c : components_) {
    std::size_t sz = c.indices.size();
    gathered.resize(sz);
    rotated.resize(sz);
    for (std::size_t i = 0; i < sz; ++i)
      gathered[i] = x[static_cast<std::size_t>(c.indices[i])] - c.shift[i];
    kern::matvec(rotated.data(), c.rotation.data(), gathered.data(), sz, sz);
    total += eval_base(BaseId::schwefel12, rotated.data(), sz);
  }
  return total;
}

std::shared_ptr<OverlappingObjective> make_overlapping(const OverlappingSpec& spec,
                                                       std::uint64_t seed) {
  if (spec.dimension == 0 || spec.components.empty())
    throw std::invalid_argument("overlapping spec needs a dimension and components");
  Rng rng(seed);
  std::vector<double> global_shift(spec.dimension);
  for (auto& v : global_shift) v = rng.uniform(-10.0, 10.0);

  bool conforming = spec.shift_mode == ShiftMode::conforming;
  std::vector<OverlappingObjective::Component> comps;
  comps.reserve(spec.components.size());
  for (const auto& idx : spec.components) {
    OverlappingObjective::Component c;
    c.indices = idx;
    std::size_t sz = idx.size();
    if (sz == 0) throw std::invalid_argument("empty component index set");
    c.rotation = random_rotation(sz, rng);
    c.shift.resize(sz);
    for (std::size_t i = 0; i < sz; ++i) {
      int gi = idx[i];
      if (gi < 0 || static_cast<std::size_t>(gi) >= spec.dimension)
        throw std::invalid_argument("component index out of range");
      c.shift[i] = conforming ? global_shift[static_cast<std::size_t>(gi)]
                              : rng.uniform(-10.0, 10.0);
    }
    comps.push_back(std::move(c));
  }
  return std::make_shared<OverlappingObjective>(spec.dimension, std::move(comps), conforming,
                                                std::move(global_shift));
}

std::vector<std::vector<int>> overlapping_windows(std::size_t n, std::size_t m,
                                                  std::size_t overlap) {
  if (m == 0 || n == 0) throw std::invalid_argument("need n > 0 and m > 0");
  if (m == 1) {
    std::vector<int> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
    return {all};
  }
  std::size_t total = n + (m - 1) * overlap;  // window slots including shared ones
  if (total / m <= overlap)
    throw std::invalid_argument("windows too small for the requested overlap");
  std::vector<std::vector<int>> out;
  std::size_t start = 0;
  for (std::size_t w = 0; w < m; ++w) {
    std::size_t sz = total / m + (w < total % m ? 1 : 0);
    std::vector<int> idx(sz);
    for (std::size_t i = 0; i < sz; ++i) idx[i] = static_cast<int>(start + i);
    out.push_back(std::move(idx));
    start += sz - overlap;
  }
  // the chain construction lands exactly on n
  if (static_cast<std::size_t>(out.back().back()) != n - 1)
    throw std::logic_error("window chain does not end at n-1");
  return out;
}

std::vector<std::vector<long long>> schwefel12_hessian(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  std::vector<std::vector<long long>> h(n, std::vector<long long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h[i][j] = 2 * (static_cast<long long>(n) + 1 - static_cast<long long>(std::max(i, j) + 1));
  return h;
}

}  // namespace ccopt
