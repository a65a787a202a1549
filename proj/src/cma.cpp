#include "ccopt/cma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace ccopt {

std::size_t default_lambda(std::size_t dim) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

std::vector<double> log_rank_weights(std::size_t mu) {
  std::vector<double> w(mu);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu; ++i) {
    w[i] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

CmaState::CmaState(std::span<const double> mean, double sigma)
    : CmaState(mean, sigma, default_lambda(mean.size())) {}

CmaState::CmaState(std::span<const double> mean, double sigma, std::size_t lambda)
    : dim_(mean.size()),
      lambda_(lambda),
      mean_(mean.begin(), mean.end()),
      sigma_(sigma),
      best_f_(std::numeric_limits<double>::infinity()) {
  if (dim_ == 0) throw std::invalid_argument("CmaState: empty mean");
  if (sigma_ <= 0.0) throw std::invalid_argument("CmaState: sigma must be positive");
  if (lambda_ < 2) throw std::invalid_argument("CmaState: lambda must be >= 2");
  mu_ = lambda_ / 2;
  weights_ = log_rank_weights(mu_);
  double sum_sq_w = 0.0;
  for (double w : weights_) sum_sq_w += w * w;
  mu_eff_ = 1.0 / sum_sq_w;

  double n = static_cast<double>(dim_);
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
  c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                   ((n + 2.0) * (n + 2.0) + mu_eff_));
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  C_.assign(dim_ * dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) C_[i * dim_ + i] = 1.0;
  p_sigma_.assign(dim_, 0.0);
  p_c_.assign(dim_, 0.0);
}

void CmaState::set_mean(std::span<const double> m) {
  if (m.size() != dim_) throw std::invalid_argument("set_mean: dimension mismatch");
  mean_.assign(m.begin(), m.end());
}

void CmaState::set_sigma(double s) {
  if (s <= 0.0) throw std::invalid_argument("set_sigma: sigma must be positive");
  sigma_ = s;
}

void CmaState::normalize_covariance_scale() {
  using Mat = Eigen::MatrixXd;
  Eigen::Map<const Mat> c(C_.data(), dim_, dim_);
  Mat sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) return;
  double ln_det = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    ln_det += std::log(std::max(solver.eigenvalues()[i], 1e-300));
  double scale = std::exp(ln_det / static_cast<double>(dim_));
  if (!std::isfinite(scale) || scale <= 0.0) return;
  double root = std::sqrt(scale);
  for (auto& v : C_) v /= scale;
  for (auto& v : p_c_) v /= root;
  sigma_ *= root;
  if (!std::isfinite(sigma_) || sigma_ <= 0.0) sigma_ = 1e-300;
  decomposed_ = false;
}

void CmaState::decompose() {
  using Mat = Eigen::MatrixXd;
  Eigen::Map<const Mat> c(C_.data(), dim_, dim_);
  Mat sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  double floor_val = 1e-20 * sym.trace() / static_cast<double>(dim_);
  if (floor_val <= 0.0 || !std::isfinite(floor_val)) floor_val = 1e-300;
  bool repaired = false;
  if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() < floor_val) {
    Eigen::VectorXd ev = solver.info() == Eigen::Success
                             ? solver.eigenvalues()
                             : Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim_));
    Mat basis = solver.info() == Eigen::Success
                    ? solver.eigenvectors()
                    : Mat::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], floor_val);
    sym = basis * ev.asDiagonal() * basis.transpose();
    Eigen::Map<Mat>(C_.data(), dim_, dim_) = sym;
    solver.compute(sym);
    repaired = true;
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("covariance eigendecomposition failed after repair");
  }
  (void)repaired;
  B_.resize(dim_ * dim_);
  D_.resize(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    D_[j] = std::sqrt(std::max(solver.eigenvalues()[static_cast<Eigen::Index>(j)], floor_val));
    for (std::size_t i = 0; i < dim_; ++i)
      B_[i * dim_ + j] = solver.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  decomposed_ = true;
}

std::vector<std::vector<double>> CmaState::ask(Rng& rng) {
  decompose();
  std::vector<std::vector<double>> pop(lambda_, std::vector<double>(dim_));
  for (std::size_t s = 0; s < lambda_; ++s) {
    std::vector<double> z(dim_);
    for (auto& v : z) v = rng.gauss();
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) acc += B_[i * dim_ + j] * D_[j] * z[j];
      pop[s][i] = mean_[i] + sigma_ * acc;
    }
  }
  return pop;
}

void CmaState::tell(const std::vector<std::vector<double>>& population,
                    const std::vector<double>& fitnesses) {
  if (population.size() != lambda_ || fitnesses.size() != lambda_)
    throw std::invalid_argument("tell: population size mismatch");
  if (!decomposed_) decompose();

  std::vector<std::size_t> order(lambda_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    bool fa = std::isfinite(fitnesses[a]), fb = std::isfinite(fitnesses[b]);
    if (fa != fb) return fa;  // non-finite ranked worst
    if (!fa) return false;
    return fitnesses[a] < fitnesses[b];
  });

  for (std::size_t s = 0; s < lambda_; ++s) {
    if (std::isfinite(fitnesses[s]) && fitnesses[s] < best_f_) {
      best_f_ = fitnesses[s];
      best_x_ = population[s];
    }
  }

  std::vector<double> old_mean = mean_;
  std::fill(mean_.begin(), mean_.end(), 0.0);
  for (std::size_t r = 0; r < mu_; ++r) {
    const auto& x = population[order[r]];
    for (std::size_t i = 0; i < dim_; ++i) mean_[i] += weights_[r] * x[i];
  }

  // y = (mean - old_mean) / sigma, whitened via B D^-1 B^T for the CSA path
  std::vector<double> y(dim_), y_white(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = (mean_[i] - old_mean[i]) / sigma_;
  std::vector<double> tmp(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) acc += B_[i * dim_ + j] * y[i];
    tmp[j] = acc / D_[j];
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += B_[i * dim_ + j] * tmp[j];
    y_white[i] = acc;
  }

  double cs_fac = std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_);
  double ps_norm_sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    p_sigma_[i] = (1.0 - c_sigma_) * p_sigma_[i] + cs_fac * y_white[i];
    ps_norm_sq += p_sigma_[i] * p_sigma_[i];
  }
  double ps_norm = std::sqrt(ps_norm_sq);

  double denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * static_cast<double>(gen_ + 1)));
  bool hsig = ps_norm / denom / chi_n_ < 1.4 + 2.0 / (static_cast<double>(dim_) + 1.0);

  double cc_fac = std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_);
  for (std::size_t i = 0; i < dim_; ++i)
    p_c_[i] = (1.0 - c_c_) * p_c_[i] + (hsig ? cc_fac * y[i] : 0.0);

  double delta_hsig = (1.0 - (hsig ? 1.0 : 0.0)) * c_c_ * (2.0 - c_c_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      double rank_one = p_c_[i] * p_c_[j];
      double rank_mu = 0.0;
      for (std::size_t r = 0; r < mu_; ++r) {
        const auto& x = population[order[r]];
        double yi = (x[i] - old_mean[i]) / sigma_;
        double yj = (x[j] - old_mean[j]) / sigma_;
        rank_mu += weights_[r] * yi * yj;
      }
      C_[i * dim_ + j] = (1.0 - c_1_ - c_mu_ + c_1_ * delta_hsig) * C_[i * dim_ + j] +
                         c_1_ * rank_one + c_mu_ * rank_mu;
    }

  sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
  if (!std::isfinite(sigma_) || sigma_ <= 0.0) sigma_ = 1e-300;
  ++gen_;
  decomposed_ = false;
}

std::vector<double> CmaState::leading_eigenvector() const {
  using Mat = Eigen::MatrixXd;
  Eigen::Map<const Mat> c(C_.data(), dim_, dim_);
  Mat sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  std::vector<double> v(dim_);
  Eigen::Index last = static_cast<Eigen::Index>(dim_) - 1;  // eigenvalues ascending
  for (std::size_t i = 0; i < dim_; ++i) v[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), last);
  double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
  return v;
}

bool CmaState::finite() const {
  auto all_finite = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  return std::isfinite(sigma_) && sigma_ > 0.0 && all_finite(mean_) && all_finite(C_) &&
         all_finite(p_sigma_) && all_finite(p_c_);
}

SubspaceResult optimize_subspace(const Objective& obj, std::span<const double> context,
                                 const std::vector<int>& group, std::uint64_t budget_evals,
                                 Rng& rng, CmaState* warm, double context_fitness, double sigma0) {
  if (context.size() != obj.dimension())
    throw std::invalid_argument("optimize_subspace: context dimension mismatch");
  std::size_t g = group.size();
  if (g == 0) throw std::invalid_argument("optimize_subspace: empty group");
  for (int idx : group)
    if (idx < 0 || static_cast<std::size_t>(idx) >= context.size())
      throw std::invalid_argument("optimize_subspace: group index out of range");

  std::vector<double> sub(g);
  for (std::size_t i = 0; i < g; ++i) sub[i] = context[static_cast<std::size_t>(group[i])];

  CmaState local_state(sub, sigma0);
  CmaState& st = warm ? *warm : local_state;
  if (st.dim() != g) throw std::invalid_argument("optimize_subspace: warm state dimension mismatch");

  std::uint64_t used = 0;
  if (std::isnan(context_fitness)) {
    context_fitness = obj.evaluate(context);
    ++used;
  }
  if (budget_evals < used + st.lambda())
    throw std::invalid_argument("optimize_subspace: budget below one generation");

  SubspaceResult result;
  result.best_subvector = sub;
  result.best_fitness = context_fitness;

  std::vector<double> full(context.begin(), context.end());
  std::vector<double> fits(st.lambda());
  while (used + st.lambda() <= budget_evals) {
    auto pop = st.ask(rng);
    for (std::size_t s = 0; s < pop.size(); ++s) {
      for (std::size_t i = 0; i < g; ++i) full[static_cast<std::size_t>(group[i])] = pop[s][i];
      fits[s] = obj.evaluate(full);
      ++used;
      if (fits[s] < result.best_fitness) {
        result.best_fitness = fits[s];
        result.best_subvector = pop[s];
      }
    }
    st.tell(pop, fits);
  }
  result.evaluations_used = used;
  return result;
}

}  // namespace ccopt
