#include "ccopt/lmcma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ccopt/cma.hpp"
#include "ccopt/kernels.hpp"

namespace ccopt {

void sample_direction(const std::vector<DirectionEntry>& memory, double c1,
                      std::span<const double> z, std::span<double> d_out) {
  if (d_out.size() != z.size()) throw std::invalid_argument("sample_direction: output size mismatch");
  std::size_t n = z.size();
  std::copy(z.begin(), z.end(), d_out.begin());
  double alpha = 1.0 - 0.5 * c1;
  // newest factor touches z first; the oldest is applied last
  for (std::size_t k = memory.size(); k-- > 0;) {
    const auto& p = memory[k].path;
    if (p.size() != n) throw std::invalid_argument("sample_direction: path dimension mismatch");
    double v = kern::dot(p.data(), d_out.data(), n);
    kern::axpby(alpha, d_out.data(), 0.5 * c1 * v, p.data(), n);
  }
}

void apply_inverse_direction(const std::vector<DirectionEntry>& memory, double c1,
                             std::span<const double> v, std::span<double> out) {
  if (out.size() != v.size()) throw std::invalid_argument("apply_inverse_direction: size mismatch");
  std::size_t n = v.size();
  std::copy(v.begin(), v.end(), out.begin());
  double alpha = 1.0 - 0.5 * c1;
  double beta = 0.5 * c1;
  // forward applies newest..oldest reading right to left, so the inverse
  // peels factors oldest-first
  for (const auto& entry : memory) {
    const auto& p = entry.path;
    double gamma = beta / (alpha + beta * entry.norm_sq);
    double s = kern::dot(p.data(), out.data(), n);
    kern::axpby(1.0 / alpha, out.data(), -gamma * s / alpha, p.data(), n);
  }
}

std::size_t default_memory_size(std::size_t dim) {
  return 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(static_cast<double>(dim))));
}

double default_c1(std::size_t dim) {
  return 1.0 / (10.0 * std::log(static_cast<double>(dim) + 1.0));
}

LmcmaState::LmcmaState(std::span<const double> mean, double sigma)
    : LmcmaState(mean, sigma, default_memory_size(mean.size())) {}

LmcmaState::LmcmaState(std::span<const double> mean, double sigma, std::size_t memory_capacity)
    : dim_(mean.size()),
      m_mem_(memory_capacity),
      mean_(mean.begin(), mean.end()),
      sigma_(sigma),
      best_f_(std::numeric_limits<double>::infinity()) {
  if (dim_ == 0) throw std::invalid_argument("LmcmaState: empty mean");
  if (sigma_ <= 0.0) throw std::invalid_argument("LmcmaState: sigma must be positive");
  lambda_ = default_lambda(dim_);
  mu_ = lambda_ / 2;
  weights_ = log_rank_weights(mu_);
  double sum_sq_w = 0.0;
  for (double w : weights_) sum_sq_w += w * w;
  mu_eff_ = 1.0 / sum_sq_w;

  double n = static_cast<double>(dim_);
  c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  c1_ = default_c1(dim_);
  c_c_ = 1.0 / n;

  p_sigma_.assign(dim_, 0.0);
  p_c_.assign(dim_, 0.0);
}

void LmcmaState::set_mean(std::span<const double> m) {
  if (m.size() != dim_) throw std::invalid_argument("set_mean: dimension mismatch");
  mean_.assign(m.begin(), m.end());
}

void LmcmaState::set_sigma(double s) {
  if (s <= 0.0) throw std::invalid_argument("set_sigma: sigma must be positive");
  sigma_ = s;
}

void LmcmaState::replace_memory(std::vector<DirectionEntry> entries) {
  if (entries.size() > m_mem_) entries.resize(m_mem_);
  for (auto& e : entries) {
    if (e.path.size() != dim_) throw std::invalid_argument("replace_memory: path dimension mismatch");
    e.norm_sq = kern::sum_sq(e.path.data(), dim_);
  }
  std::sort(entries.begin(), entries.end(),
            [](const DirectionEntry& a, const DirectionEntry& b) { return a.birth < b.birth; });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].birth = i;
  memory_ = std::move(entries);
}

bool LmcmaState::finite() const {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!(std::isfinite(sigma_) && sigma_ > 0.0) || !ok(mean_) || !ok(p_sigma_) || !ok(p_c_))
    return false;
  for (const auto& e : memory_)
    if (!ok(e.path)) return false;
  return true;
}

void update_memory(LmcmaState& state, std::span<const double> new_path) {
  for (double v : new_path)
    if (!std::isfinite(v)) throw std::invalid_argument("update_memory: non-finite path");
  if (new_path.size() != state.dim_)
    throw std::invalid_argument("update_memory: path dimension mismatch");
  if (state.m_mem_ == 0) return;
  if (state.memory_.size() == state.m_mem_) {
    // entries are birth-ordered; spacing of pair i is birth[i+1] - birth[i].
    // The newest entry re-anchors every generation, so its pair is excluded
    // from the search; among the rest, while the closest pair sits tighter
    // than the target spacing, drop its newer member (ties resolve to the
    // youngest such pair). Once all pairs meet the target, retire the
    // oldest. Retained paths end up spread over roughly m_mem * target
    // generations and stale ones erode within the same horizon.
    std::uint64_t target = std::max<std::uint64_t>(1, state.dim_ / state.m_mem_);
    std::size_t evict = 0;
    std::uint64_t smallest = UINT64_MAX;
    for (std::size_t i = 0; i + 2 < state.memory_.size(); ++i) {
      std::uint64_t gap = state.memory_[i + 1].birth - state.memory_[i].birth;
      if (gap <= smallest) {
        smallest = gap;
        evict = i + 1;
      }
    }
    if (smallest >= target) evict = 0;
    state.memory_.erase(state.memory_.begin() + static_cast<std::ptrdiff_t>(evict));
  }
  // keep the path's own direction but weight it by how saturated the path
  // is in the whitened frame: under selection noise the whitened path
  // equilibrates at squared norm ~ dim, while a persistently selected
  // direction accumulates far above that. Entries store in proportion to
  // the excess, so transient noise enters with near-zero weight and only
  // directions the selection keeps confirming earn the capped factor gain.
  std::vector<double> white(new_path.size());
  apply_inverse_direction(state.memory_, state.c1_, new_path, white);
  double sat = kern::sum_sq(white.data(), white.size()) /
                   static_cast<double>(state.dim_) -
               1.0;
  double scale_sq = std::clamp(sat, 0.0, 1.0) / state.c1_;
  std::vector<double> stored(new_path.begin(), new_path.end());
  double nsq = kern::sum_sq(stored.data(), stored.size());
  if (nsq > 0.0)
    kern::scale(stored.data(), std::sqrt(scale_sq / nsq), stored.data(),
                stored.size());
  DirectionEntry e;
  e.path = std::move(stored);
  e.birth = state.gen_;
  e.norm_sq = kern::sum_sq(e.path.data(), e.path.size());
  state.memory_.push_back(std::move(e));
}

std::uint64_t lmcma_step(LmcmaState& state, const Objective& obj, Rng& rng) {
  if (obj.dimension() != state.dim_) throw std::invalid_argument("lmcma_step: dimension mismatch");
  std::size_t n = state.dim_;
  std::size_t lambda = state.lambda_;

  std::vector<std::vector<double>> pop(lambda, std::vector<double>(n));
  std::vector<double> fits(lambda);
  std::vector<double> z(n), d(n);
  for (std::size_t s = 0; s < lambda; ++s) {
    for (auto& v : z) v = rng.gauss();
    sample_direction(state.memory_, state.c1_, z, d);
    for (std::size_t i = 0; i < n; ++i) pop[s][i] = state.mean_[i] + state.sigma_ * d[i];
    fits[s] = obj.evaluate(pop[s]);
  }

  std::vector<std::size_t> order(lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    bool fa = std::isfinite(fits[a]), fb = std::isfinite(fits[b]);
    if (fa != fb) return fa;
    if (!fa) return false;
    return fits[a] < fits[b];
  });

  for (std::size_t s = 0; s < lambda; ++s) {
    if (std::isfinite(fits[s]) && fits[s] < state.best_f_) {
      state.best_f_ = fits[s];
      state.best_x_ = pop[s];
    }
  }

  std::vector<double> old_mean = state.mean_;
  std::fill(state.mean_.begin(), state.mean_.end(), 0.0);
  for (std::size_t r = 0; r < state.mu_; ++r) {
    const auto& x = pop[order[r]];
    for (std::size_t i = 0; i < n; ++i) state.mean_[i] += state.weights_[r] * x[i];
  }

  std::vector<double> y(n), y_white(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (state.mean_[i] - old_mean[i]) / state.sigma_;
  apply_inverse_direction(state.memory_, state.c1_, y, y_white);

  double cs_fac = std::sqrt(state.c_sigma_ * (2.0 - state.c_sigma_) * state.mu_eff_);
  double ps_norm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state.p_sigma_[i] = (1.0 - state.c_sigma_) * state.p_sigma_[i] + cs_fac * y_white[i];
    ps_norm_sq += state.p_sigma_[i] * state.p_sigma_[i];
  }
  double ps_norm = std::sqrt(ps_norm_sq);

  double cc_fac = std::sqrt(state.c_c_ * (2.0 - state.c_c_) * state.mu_eff_);
  for (std::size_t i = 0; i < n; ++i)
    state.p_c_[i] = (1.0 - state.c_c_) * state.p_c_[i] + cc_fac * y[i];

  update_memory(state, state.p_c_);

  state.sigma_ *= std::exp((state.c_sigma_ / state.d_sigma_) * (ps_norm / state.chi_n_ - 1.0));
  if (!std::isfinite(state.sigma_) || state.sigma_ <= 0.0) state.sigma_ = 1e-300;
  ++state.gen_;
  return lambda;
}

LmcmaState make_lmcma_worker(const Objective& obj, Rng& rng, double sigma0) {
  std::vector<double> mean(obj.dimension());
  for (auto& v : mean) v = rng.uniform(-10.0, 10.0);
  return LmcmaState(mean, sigma0);
}

}  // namespace ccopt
