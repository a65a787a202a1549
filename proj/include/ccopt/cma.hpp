#pragma once
// Full CMA-ES (rank-one + rank-mu covariance update, CSA step-size control)
// for low-dimensional subspaces. The covariance is eigendecomposed every
// generation; dimensions stay small (<= 50) on the cooperative path.
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ccopt/objective.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

std::size_t default_lambda(std::size_t dim);                 // 4 + floor(3 ln dim)
std::vector<double> log_rank_weights(std::size_t mu);        // normalized, nonincreasing

class CmaState {
 public:
  CmaState(std::span<const double> mean, double sigma);
  CmaState(std::span<const double> mean, double sigma, std::size_t lambda);

  std::size_t dim() const { return dim_; }
  std::size_t lambda() const { return lambda_; }
  std::size_t mu() const { return mu_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& covariance() const { return C_; }  // row-major dim x dim
  std::uint64_t generation() const { return gen_; }
  double best_fitness() const { return best_f_; }
  const std::vector<double>& best_point() const { return best_x_; }

  void set_mean(std::span<const double> m);
  void set_sigma(double s);

  std::vector<std::vector<double>> ask(Rng& rng);
  void tell(const std::vector<std::vector<double>>& population, const std::vector<double>& fitnesses);

  // folds the covariance's overall scale into sigma (unit-determinant C,
  // identical sampling distribution); keeps warm-started states from
  // accumulating unbounded scale drift across solves
  void normalize_covariance_scale();

  // unit-norm eigenvector of the largest covariance eigenvalue
  std::vector<double> leading_eigenvector() const;

  bool finite() const;

 private:
  void decompose();

  std::size_t dim_;
  std::size_t lambda_, mu_;
  std::vector<double> weights_;
  double mu_eff_;
  double c_sigma_, d_sigma_, c_c_, c_1_, c_mu_, chi_n_;

  std::vector<double> mean_;
  double sigma_;
  std::vector<double> C_;        // row-major
  std::vector<double> B_, D_;    // eigenvectors (columns of B), sqrt eigenvalues
  bool decomposed_ = false;
  std::vector<double> p_sigma_, p_c_;
  std::uint64_t gen_ = 0;

  double best_f_;
  std::vector<double> best_x_;
};

struct SubspaceResult {
  std::vector<double> best_subvector;
  double best_fitness = 0.0;
  std::uint64_t evaluations_used = 0;
};

// Optimizes f(splice(context, group, v)) over v with the rest of the context
// frozen. Never returns a fitness worse than the context's. `warm` keeps a
// persistent state across calls; `context_fitness` may be NaN to request a
// baseline evaluation (counted against the budget).
SubspaceResult optimize_subspace(const Objective& obj, std::span<const double> context,
                                 const std::vector<int>& group, std::uint64_t budget_evals,
                                 Rng& rng, CmaState* warm = nullptr,
                                 double context_fitness = std::numeric_limits<double>::quiet_NaN(),
                                 double sigma0 = 3.0);

}  // namespace ccopt
