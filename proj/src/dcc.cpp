#include "ccopt/dcc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "ccopt/cma.hpp"
#include "ccopt/partition.hpp"

namespace ccopt {
namespace {

bool cc_finite(const CcState& s) {
  for (double v : s.context)
    if (!std::isfinite(v)) return false;
  return s.context_needs_eval || std::isfinite(s.context_fitness);
}

std::vector<std::size_t> rank_by_fitness(const std::vector<double>& f) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool fa = std::isfinite(f[a]), fb = std::isfinite(f[b]);
    if (fa != fb) return fa;
    return f[a] < f[b];
  });
  return order;
}

struct WorkerOutcome {
  std::uint64_t evals = 0;
  bool failed = false;
};

WorkerOutcome run_es_worker(LmcmaState& state, const Objective& obj, Rng& rng,
                            std::uint64_t budget) {
  WorkerOutcome out;
  try {
    while (out.evals + state.lambda() <= budget) out.evals += lmcma_step(state, obj, rng);
    if (!state.finite()) out.failed = true;
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

WorkerOutcome run_cc_worker(CcState& state, Rng& rng, std::uint64_t budget) {
  WorkerOutcome out;
  std::uint64_t largest = 0;
  for (const auto& g : state.partition.groups) largest = std::max(largest, g.size());
  const std::uint64_t floor_budget = default_lambda(largest) + 2;
  const std::uint64_t per_group =
      std::max<std::uint64_t>(budget / state.partition.groups.size(), floor_budget);
  try {
    out.evals = cc_cycle(state, per_group, rng);
    if (!cc_finite(state)) out.failed = true;
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

DccConfig resolve_config(DccConfig cfg, std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("resolve_config: zero dimension");
  if (cfg.p <= 0) throw std::invalid_argument("resolve_config: p must be positive");
  if (cfg.p_es < 0 && cfg.p_cc < 0) {
    cfg.p_es = static_cast<int>((3 * cfg.p + 3) / 4);
    cfg.p_es = std::min(cfg.p_es, cfg.p);
    cfg.p_cc = cfg.p - cfg.p_es;
  } else if (cfg.p_es < 0) {
    cfg.p_es = cfg.p - cfg.p_cc;
  } else if (cfg.p_cc < 0) {
    cfg.p_cc = cfg.p - cfg.p_es;
  }
  if (cfg.p_es < 0 || cfg.p_cc < 0 || cfg.p_es + cfg.p_cc != cfg.p)
    throw std::invalid_argument("resolve_config: p_es + p_cc must equal p");
  if (cfg.k <= 0 || static_cast<std::size_t>(cfg.k) > dimension)
    throw std::invalid_argument("resolve_config: k out of range");
  if (cfg.cycle_evals == 0) cfg.cycle_evals = 100 * default_lambda(dimension);
  if (cfg.cycle_evals < default_lambda(dimension))
    throw std::invalid_argument("resolve_config: cycle_evals below one generation");
  if (!(cfg.elitist_fraction > 0.0) || !(cfg.elitist_fraction <= cfg.better_fraction) ||
      !(cfg.better_fraction < 1.0))
    throw std::invalid_argument(
        "resolve_config: need 0 < elitist_fraction <= better_fraction < 1");
  if (cfg.meta_sigma_factors.first <= 0.0 || cfg.meta_sigma_factors.second <= 0.0)
    throw std::invalid_argument("resolve_config: sigma factors must be positive");
  if (!(cfg.sigma0 > 0.0)) throw std::invalid_argument("resolve_config: sigma0 must be positive");
  if (!cfg.worker_use_weighted.empty() &&
      cfg.worker_use_weighted.size() != static_cast<std::size_t>(cfg.p_es))
    throw std::invalid_argument("resolve_config: worker_use_weighted size mismatch");
  return cfg;
}

MetaState make_dcc_state(const Objective& obj, const DccConfig& config,
                         std::uint64_t master_seed) {
  const DccConfig cfg = resolve_config(config, obj.dimension());
  const std::size_t n = obj.dimension();

  MetaState meta;
  meta.meta_rng = worker_stream(master_seed, static_cast<std::uint64_t>(cfg.p));
  meta.worker_rngs.reserve(cfg.p);
  for (int i = 0; i < cfg.p; ++i)
    meta.worker_rngs.push_back(worker_stream(master_seed, static_cast<std::uint64_t>(i)));

  for (int i = 0; i < cfg.p_es; ++i)
    meta.es_workers.push_back(make_lmcma_worker(obj, meta.worker_rngs[i], cfg.sigma0));
  meta.es_prev_best.assign(meta.es_workers.size(),
                           std::numeric_limits<double>::infinity());

  for (int j = 0; j < cfg.p_cc; ++j) {
    Rng& rng = meta.worker_rngs[static_cast<std::size_t>(cfg.p_es + j)];
    Partition part = default_decompose(n, static_cast<std::size_t>(cfg.k), rng.next_u64());
    std::vector<double> start(n);
    for (double& v : start) v = rng.uniform(-10.0, 10.0);
    meta.cc_workers.push_back(make_cc_state(obj, part, std::move(start),
                                            std::numeric_limits<double>::quiet_NaN(),
                                            cfg.sigma0));
    meta.evaluations += 1;
    if (meta.cc_workers.back().context_fitness < meta.best_f) {
      meta.best_f = meta.cc_workers.back().context_fitness;
      meta.best_x = meta.cc_workers.back().context;
    }
  }
  if (cfg.p_cc == 0) {
    meta.best_x = meta.es_workers.front().mean();
    meta.best_f = obj.evaluate(meta.best_x);
    meta.evaluations += 1;
  }
  return meta;
}

MeanUpdate meta_mean_update(const std::vector<std::vector<double>>& means,
                            const std::vector<double>& fitnesses, double elitist_fraction) {
  if (means.empty() || means.size() != fitnesses.size())
    throw std::invalid_argument("meta_mean_update: need one fitness per mean");
  const std::size_t count = means.size();
  const std::vector<std::size_t> order = rank_by_fitness(fitnesses);

  const std::size_t mu = std::max<std::size_t>(1, count / 2);
  const std::vector<double> w = log_rank_weights(mu);

  MeanUpdate out;
  out.mean.assign(means.front().size(), 0.0);
  for (std::size_t r = 0; r < mu; ++r) {
    const std::vector<double>& m = means[order[r]];
    if (m.size() != out.mean.size())
      throw std::invalid_argument("meta_mean_update: mean dimension mismatch");
    for (std::size_t j = 0; j < m.size(); ++j) out.mean[j] += w[r] * m[j];
  }
  std::size_t n_elite = static_cast<std::size_t>(
      std::ceil(elitist_fraction * static_cast<double>(count)));
  n_elite = std::clamp<std::size_t>(n_elite, 1, count);
  out.elitists.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_elite));
  return out;
}

std::vector<DirectionEntry> cc_principal_directions(const CcState& cc, std::size_t dim,
                                                    std::size_t max_count) {
  std::vector<DirectionEntry> out;
  for (std::size_t g = 0; g < cc.partition.groups.size() && out.size() < max_count; ++g) {
    const std::vector<int>& group = cc.partition.groups[g];
    std::vector<double> v = cc.sub_states[g].leading_eigenvector();
    DirectionEntry e;
    e.path.assign(dim, 0.0);
    for (std::size_t j = 0; j < group.size(); ++j)
      e.path[static_cast<std::size_t>(group[j])] = v[j];
    e.norm_sq = 1.0;
    e.birth = out.size();
    out.push_back(std::move(e));
  }
  return out;
}

void collective_covariance_learning(std::vector<LmcmaState>& es_workers,
                                    const std::vector<double>& es_fitnesses,
                                    const std::vector<CcState>& cc_workers,
                                    double better_fraction,
                                    const std::vector<std::size_t>& elitists,
                                    int inject_count, Rng& rng) {
  if (es_workers.empty()) return;
  if (es_workers.size() != es_fitnesses.size())
    throw std::invalid_argument("collective_covariance_learning: fitness count mismatch");

  const std::vector<std::size_t> order = rank_by_fitness(es_fitnesses);
  const std::size_t pooled =
      std::min(pooled_worker_count(es_workers.size(), better_fraction), es_workers.size());
  std::vector<DirectionEntry> pool;
  for (std::size_t r = 0; r < pooled; ++r)
    for (const DirectionEntry& e : es_workers[order[r]].memory()) pool.push_back(e);

  std::vector<bool> is_elite(es_workers.size(), false);
  for (std::size_t idx : elitists)
    if (idx < is_elite.size()) is_elite[idx] = true;

  std::vector<std::size_t> non_elite;  // worst first
  for (std::size_t r = order.size(); r-- > 0;)
    if (!is_elite[order[r]]) non_elite.push_back(order[r]);

  std::size_t injected = 0;
  const std::size_t want_inject =
      cc_workers.empty() ? 0
                         : std::min(non_elite.size(),
                                    inject_count < 0 ? cc_workers.size()
                                                     : static_cast<std::size_t>(inject_count));
  const std::size_t dim = es_workers.front().dim();

  for (std::size_t w : non_elite) {
    LmcmaState& worker = es_workers[w];
    if (injected < want_inject) {
      const CcState& src = cc_workers[injected % cc_workers.size()];
      std::vector<DirectionEntry> dirs =
          cc_principal_directions(src, dim, worker.memory_capacity());
      if (!dirs.empty()) {
        worker.replace_memory(std::move(dirs));
        ++injected;
        continue;
      }
    }
    if (pool.empty()) continue;
    const std::size_t take = std::min(worker.memory_capacity(), pool.size());
    std::vector<std::size_t> picks(pool.size());
    std::iota(picks.begin(), picks.end(), 0);
    for (std::size_t t = 0; t < take; ++t) {
      const std::size_t j = t + rng.index(picks.size() - t);
      std::swap(picks[t], picks[j]);
    }
    std::vector<DirectionEntry> sample;
    for (std::size_t t = 0; t < take; ++t) sample.push_back(pool[picks[t]]);
    worker.replace_memory(std::move(sample));
  }
}

std::vector<double> meta_es_sigma(const std::vector<double>& sigmas,
                                  const std::vector<double>& progress,
                                  std::pair<double, double> factors) {
  if (sigmas.size() != progress.size())
    throw std::invalid_argument("meta_es_sigma: size mismatch");
  if (sigmas.size() <= 1) return sigmas;
  std::size_t best = 0;
  for (std::size_t i = 1; i < progress.size(); ++i)
    if (progress[i] > progress[best]) best = i;
  std::vector<double> out(sigmas.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = sigmas[best] * (i % 2 == 0 ? factors.first : factors.second);
  return out;
}

std::uint64_t dcc_cycle(MetaState& meta, const Objective& obj, const DccConfig& config) {
  const DccConfig cfg = resolve_config(config, obj.dimension());
  const std::size_t n_es = meta.es_workers.size();
  const std::size_t n_cc = meta.cc_workers.size();
  if (n_es != static_cast<std::size_t>(cfg.p_es) || n_cc != static_cast<std::size_t>(cfg.p_cc))
    throw std::invalid_argument("dcc_cycle: state does not match config");

  for (std::size_t i = 0; i < n_es; ++i) meta.es_prev_best[i] = meta.es_workers[i].best_fitness();

  std::vector<WorkerOutcome> outcomes(n_es + n_cc);
  {
    std::vector<std::future<WorkerOutcome>> futures;
    futures.reserve(n_es + n_cc);
    for (std::size_t i = 0; i < n_es; ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        return run_es_worker(meta.es_workers[i], obj, meta.worker_rngs[i], cfg.cycle_evals);
      }));
    for (std::size_t j = 0; j < n_cc; ++j)
      futures.push_back(std::async(std::launch::async, [&, j] {
        return run_cc_worker(meta.cc_workers[j], meta.worker_rngs[n_es + j], cfg.cycle_evals);
      }));
    for (std::size_t i = 0; i < futures.size(); ++i) outcomes[i] = futures[i].get();
  }
  std::uint64_t used = 0;
  for (const WorkerOutcome& o : outcomes) used += o.evals;

  // serial meta phase, worker-index order throughout
  std::vector<double> es_fit(n_es);
  for (std::size_t i = 0; i < n_es; ++i)
    es_fit[i] = outcomes[i].failed ? std::numeric_limits<double>::infinity()
                                   : meta.es_workers[i].best_fitness();

  std::vector<std::size_t> elitists;
  if (n_es > 0) {
    std::vector<std::vector<double>> means;
    means.reserve(n_es);
    for (const LmcmaState& w : meta.es_workers) means.push_back(w.mean());
    MeanUpdate mu = meta_mean_update(means, es_fit, cfg.elitist_fraction);
    elitists = mu.elitists;
    std::vector<bool> is_elite(n_es, false);
    for (std::size_t idx : elitists) is_elite[idx] = true;
    const std::vector<double>& best_mean = means[mu.elitists.front()];
    for (std::size_t i = 0; i < n_es; ++i) {
      if (outcomes[i].failed) {
        meta.es_workers[i] = LmcmaState(mu.mean, cfg.sigma0);
        continue;
      }
      if (is_elite[i]) continue;
      const bool weighted =
          cfg.worker_use_weighted.empty() || cfg.worker_use_weighted[i];
      meta.es_workers[i].set_mean(weighted ? mu.mean : best_mean);
    }
    for (std::size_t j = 0; j < n_cc; ++j) {
      if (!outcomes[n_es + j].failed) continue;
      CcState& s = meta.cc_workers[j];
      s.context = mu.mean;
      s.context_fitness = std::numeric_limits<double>::infinity();
      s.context_needs_eval = true;
      s.fixed_point_flag = false;
      for (std::size_t g = 0; g < s.partition.groups.size(); ++g) {
        const std::vector<int>& group = s.partition.groups[g];
        std::vector<double> sub(group.size());
        for (std::size_t t = 0; t < group.size(); ++t)
          sub[t] = s.context[static_cast<std::size_t>(group[t])];
        s.sub_states[g] = CmaState(sub, cfg.sigma0);
      }
    }
  } else {
    // CC-only configuration: failed workers restart from the best-so-far point
    for (std::size_t j = 0; j < n_cc; ++j) {
      if (!outcomes[n_es + j].failed) continue;
      CcState& s = meta.cc_workers[j];
      s.context = meta.best_x;
      s.context_fitness = std::numeric_limits<double>::infinity();
      s.context_needs_eval = true;
      s.fixed_point_flag = false;
      for (std::size_t g = 0; g < s.partition.groups.size(); ++g) {
        const std::vector<int>& group = s.partition.groups[g];
        std::vector<double> sub(group.size());
        for (std::size_t t = 0; t < group.size(); ++t)
          sub[t] = s.context[static_cast<std::size_t>(group[t])];
        s.sub_states[g] = CmaState(sub, cfg.sigma0);
      }
    }
  }

  if (n_es > 0)
    collective_covariance_learning(meta.es_workers, es_fit, meta.cc_workers,
                                   cfg.better_fraction, elitists, cfg.cc_inject_count,
                                   meta.meta_rng);

  for (std::size_t i = 0; i < n_es; ++i) {
    if (outcomes[i].failed) continue;
    if (meta.es_workers[i].best_fitness() < meta.best_f) {
      meta.best_f = meta.es_workers[i].best_fitness();
      meta.best_x = meta.es_workers[i].best_point();
    }
  }
  for (std::size_t j = 0; j < n_cc; ++j) {
    const CcState& s = meta.cc_workers[j];
    if (s.context_needs_eval || !std::isfinite(s.context_fitness)) continue;
    if (s.context_fitness < meta.best_f) {
      meta.best_f = s.context_fitness;
      meta.best_x = s.context;
    }
  }

  if (n_es > 0) {
    std::vector<double> sigmas(n_es), progress(n_es);
    for (std::size_t i = 0; i < n_es; ++i) {
      sigmas[i] = meta.es_workers[i].sigma();
      progress[i] = outcomes[i].failed
                        ? -std::numeric_limits<double>::infinity()
                        : meta.es_prev_best[i] - meta.es_workers[i].best_fitness();
    }
    const std::vector<double> next = meta_es_sigma(sigmas, progress, cfg.meta_sigma_factors);
    for (std::size_t i = 0; i < n_es; ++i) meta.es_workers[i].set_sigma(next[i]);
  }

  ++meta.cycle;
  meta.evaluations += used;
  return used;
}

RunRecord run_dcc(const Objective& obj, const DccConfig& config, const DccTermination& term,
                  std::uint64_t master_seed) {
  const DccConfig cfg = resolve_config(config, obj.dimension());
  MetaState meta = make_dcc_state(obj, cfg, master_seed);

  RunRecord rec;
  rec.function_id = obj.name();
  rec.algorithm = "dcc";
  rec.seed = master_seed;
  rec.status = RunStatus::budget_exhausted;

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  rec.points.push_back({0, meta.evaluations, meta.best_f, wall_ms()});

  for (;;) {
    if (meta.best_f <= term.fitness_target) {
      rec.status = RunStatus::target_reached;
      break;
    }
    if (meta.evaluations >= term.max_evaluations) break;
    if (term.max_wall_seconds > 0.0 && wall_ms() >= term.max_wall_seconds * 1e3) break;
    if (meta.cycle >= term.max_cycles) break;

    dcc_cycle(meta, obj, cfg);
    rec.points.push_back({meta.cycle, meta.evaluations, meta.best_f, wall_ms()});
  }
  return rec;
}

}  // namespace ccopt
