#pragma once
// Limited-memory CMA for the full-dimensional space. The covariance never
// exists as a matrix: sampling applies a product of rank-one factors
// (1-c1/2)I + (c1/2) p p^T over the stored evolution paths, newest factor
// first, using one dot product and one fused scaled-add per stored path.
#include <cstdint>
#include <span>
#include <vector>

#include "ccopt/objective.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

struct DirectionEntry {
  std::vector<double> path;
  std::uint64_t birth = 0;     // generation the path was stored
  double norm_sq = 0.0;
};

void sample_direction(const std::vector<DirectionEntry>& memory, double c1,
                      std::span<const double> z, std::span<double> d_out);

// exact inverse of the sampling product, same O(n * |memory|) cost
void apply_inverse_direction(const std::vector<DirectionEntry>& memory, double c1,
                             std::span<const double> v, std::span<double> out);

std::size_t default_memory_size(std::size_t dim);  // 4 + floor(3 ln n)
double default_c1(std::size_t dim);                // 1 / (10 ln(n+1))

class LmcmaState {
 public:
  LmcmaState(std::span<const double> mean, double sigma);
  LmcmaState(std::span<const double> mean, double sigma, std::size_t memory_capacity);

  std::size_t dim() const { return dim_; }
  std::size_t lambda() const { return lambda_; }
  std::size_t mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double c1() const { return c1_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<DirectionEntry>& memory() const { return memory_; }
  const std::vector<double>& sigma_path() const { return p_sigma_; }
  const std::vector<double>& cumulation_path() const { return p_c_; }
  std::size_t memory_capacity() const { return m_mem_; }
  std::uint64_t generation() const { return gen_; }
  double best_fitness() const { return best_f_; }
  const std::vector<double>& best_point() const { return best_x_; }

  void set_mean(std::span<const double> m);
  void set_sigma(double s);
  void replace_memory(std::vector<DirectionEntry> entries);

  bool finite() const;

  friend void update_memory(LmcmaState& state, std::span<const double> new_path);
  friend std::uint64_t lmcma_step(LmcmaState& state, const Objective& obj, Rng& rng);

 private:
  std::size_t dim_;
  std::size_t lambda_, mu_;
  std::vector<double> weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, chi_n_;
  double c1_, c_c_;
  std::size_t m_mem_;

  std::vector<double> mean_;
  double sigma_;
  std::vector<DirectionEntry> memory_;
  std::vector<double> p_sigma_, p_c_;
  std::uint64_t gen_ = 0;

  double best_f_;
  std::vector<double> best_x_;
};

// appends a snapshot of the path, weighted by how far its whitened norm sits
// above the selection-noise floor and capped so no single factor amplifies by
// more than ~1.5; when full, culls the newer member of the closest-spaced
// pair until retained births sit ~dim/capacity generations apart, then
// retires the oldest (never the newest)
void update_memory(LmcmaState& state, std::span<const double> new_path);

// one generation; returns evaluations consumed (= lambda)
std::uint64_t lmcma_step(LmcmaState& state, const Objective& obj, Rng& rng);

// mean drawn uniformly from (-10,10)^n using the stream's first draws
LmcmaState make_lmcma_worker(const Objective& obj, Rng& rng, double sigma0);

}  // namespace ccopt
