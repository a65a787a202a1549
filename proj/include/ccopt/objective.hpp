#pragma once
// Benchmark functions: ten standard base functions, an orthogonal
// rotation + shift wrapper f(x) = f_base(R(x - s)), and an overlapping-sum
// constructor whose components are rotated-shifted schwefel12 windows.
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ccopt/rng.hpp"

namespace ccopt {

class Objective {
 public:
  virtual ~Objective() = default;

  double evaluate(std::span<const double> x) const;
  virtual std::size_t dimension() const = 0;
  virtual std::string name() const = 0;

  // NaN / empty when unknown
  virtual double optimum_value() const;
  virtual std::vector<double> optimum_point() const;

  std::uint64_t evaluations() const { return counter_.load(std::memory_order_relaxed); }
  void reset_evaluations() const { counter_.store(0, std::memory_order_relaxed); }

  // artificial per-evaluation delay, used by the scalability tests
  void set_eval_delay_ms(double ms) { delay_ms_ = ms; }
  double eval_delay_ms() const { return delay_ms_; }

 protected:
  virtual double eval_impl(std::span<const double> x) const = 0;

 private:
  mutable std::atomic<std::uint64_t> counter_{0};
  double delay_ms_ = 0.0;
};

enum class BaseId {
  sphere,
  cigar,
  discus,
  cigar_discus,
  ellipsoid,
  different_powers,
  schwefel221,
  step,
  rosenbrock,
  schwefel12,
};

const std::vector<std::string>& base_names();
BaseId base_from_name(const std::string& name);  // throws std::invalid_argument
std::string base_name(BaseId id);

double eval_base(BaseId id, const double* z, std::size_t n);

class Table1Objective : public Objective {
 public:
  // plain base function, no wrappers
  Table1Objective(BaseId id, std::size_t dimension);
  // wrapped: pass empty vectors to omit either wrapper
  Table1Objective(BaseId id, std::size_t dimension, std::vector<double> rotation_row_major,
                  std::vector<double> shift);

  std::size_t dimension() const override { return n_; }
  std::string name() const override;
  double optimum_value() const override { return 0.0; }
  std::vector<double> optimum_point() const override;

  BaseId base_id() const { return id_; }
  bool has_rotation() const { return !rot_.empty(); }
  bool has_shift() const { return !shift_.empty(); }
  const std::vector<double>& rotation() const { return rot_; }
  const std::vector<double>& shift() const { return shift_; }

 protected:
  double eval_impl(std::span<const double> x) const override;

 private:
  BaseId id_;
  std::size_t n_;
  std::vector<double> rot_;
  std::vector<double> shift_;
  std::vector<double> coef_;  // ellipsoid weights / different_powers exponents
};

std::shared_ptr<Table1Objective> make_rotated_shifted(BaseId id, std::size_t dimension,
                                                      std::uint64_t seed);
std::shared_ptr<Table1Objective> make_rotated_shifted(const std::string& base, std::size_t dimension,
                                                      std::uint64_t seed);

// row-major orthogonal matrix from Gram-Schmidt over a seeded Gaussian draw
std::vector<double> random_rotation(std::size_t n, Rng& rng);
double orthogonality_defect(const std::vector<double>& rot, std::size_t n);

enum class ShiftMode { conforming, conflicting };

struct OverlappingSpec {
  std::size_t dimension = 0;
  std::vector<std::vector<int>> components;  // 0-based index sets
  ShiftMode shift_mode = ShiftMode::conforming;
};

class OverlappingObjective : public Objective {
 public:
  struct Component {
    std::vector<int> indices;
    std::vector<double> rotation;  // row-major |indices| x |indices|
    std::vector<double> shift;
  };

  OverlappingObjective(std::size_t dimension, std::vector<Component> components, bool conforming,
                       std::vector<double> conforming_shift);

  std::size_t dimension() const override { return n_; }
  std::string name() const override { return "overlapping"; }
  double optimum_value() const override;
  std::vector<double> optimum_point() const override;
  const std::vector<Component>& components() const { return components_; }

 protected:
  double eval_impl(std::span<const double> x) const override;

 private:
  std::size_t n_;
  std::vector<Component> components_;
  bool conforming_;
  std::vector<double> conforming_shift_;
};

std::shared_ptr<OverlappingObjective> make_overlapping(const OverlappingSpec& spec,
                                                       std::uint64_t seed);

// m consecutive windows covering {0..n-1} with the given pairwise overlap
std::vector<std::vector<int>> overlapping_windows(std::size_t n, std::size_t m,
                                                  std::size_t overlap);

// exact integer Hessian of schwefel12: 2*M with M[i][j] = n + 1 - max(i+1, j+1)
std::vector<std::vector<long long>> schwefel12_hessian(std::size_t n);

}  // namespace ccopt
