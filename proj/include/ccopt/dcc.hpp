#pragma once
// Master-worker orchestration: p_es limited-memory ES workers search the full
// space while p_cc cooperative-coevolution workers search k-group
// decompositions. Every cycle ends at a barrier followed by three serial
// meta-steps (weighted mean averaging with elitist retention, collective
// covariance learning through direction-memory pooling and subspace-direction
// injection, best-so-far update) plus a Meta-ES step-size bracket.
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ccopt/cc.hpp"
#include "ccopt/lmcma.hpp"
#include "ccopt/objective.hpp"
#include "ccopt/rng.hpp"
#include "ccopt/run_record.hpp"

namespace ccopt {

struct DccConfig {
  int p = 8;
  int p_es = -1;                  // -1 = ceil(3p/4)
  int p_cc = -1;                  // -1 = p - p_es
  int k = 4;                      // groups per CC worker
  std::uint64_t cycle_evals = 0;  // per-worker budget per cycle; 0 = 100 * lambda
  double better_fraction = 0.2;
  double elitist_fraction = 0.05;
  std::pair<double, double> meta_sigma_factors{2.0, 0.5};
  int cc_inject_count = -1;  // -1 = min(p_cc, non-elitist ES workers)
  double sigma0 = 3.0;
  // per ES worker: true = restart from the weighted mean, false = copy the best
  // worker's mean; empty = weighted for every non-elitist
  std::vector<bool> worker_use_weighted;
};

// fills the -1/0 defaults and validates; throws std::invalid_argument
DccConfig resolve_config(DccConfig cfg, std::size_t dimension);

struct MetaState {
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<LmcmaState> es_workers;
  std::vector<CcState> cc_workers;
  std::vector<Rng> worker_rngs;  // ES workers first, then CC workers
  Rng meta_rng{0};
  std::vector<double> es_prev_best;  // per ES worker, fitness before the cycle
  std::uint64_t cycle = 0;
  std::uint64_t evaluations = 0;
};

MetaState make_dcc_state(const Objective& obj, const DccConfig& config,
                         std::uint64_t master_seed);

struct MeanUpdate {
  std::vector<double> mean;
  std::vector<std::size_t> elitists;  // retained worker indices, best first
};

// fitness-rank-weighted average over the better half; ceil(fraction * count)
// best workers are flagged to keep their own means
MeanUpdate meta_mean_update(const std::vector<std::vector<double>>& means,
                            const std::vector<double>& fitnesses, double elitist_fraction);

inline std::size_t pooled_worker_count(std::size_t p_es, double better_fraction) {
  return static_cast<std::size_t>(
      std::ceil(better_fraction * static_cast<double>(p_es)));
}

// Pools the direction memories of the best ceil(better_fraction * size)
// workers and hands every non-elitist a uniform resample of the pool. The
// worst inject_count non-elitists instead receive per-group leading
// eigendirections of the CC workers' subspace covariances, zero-embedded into
// full-space unit vectors. An empty pool leaves memories untouched.
void collective_covariance_learning(std::vector<LmcmaState>& es_workers,
                                    const std::vector<double>& es_fitnesses,
                                    const std::vector<CcState>& cc_workers,
                                    double better_fraction,
                                    const std::vector<std::size_t>& elitists,
                                    int inject_count, Rng& rng);

// zero-embedded unit-norm leading eigenvectors, one per subspace
std::vector<DirectionEntry> cc_principal_directions(const CcState& cc, std::size_t dim,
                                                    std::size_t max_count);

// sigma of the best-progress worker times alternating bracket factors;
// pass-through for a single worker
std::vector<double> meta_es_sigma(const std::vector<double>& sigmas,
                                  const std::vector<double>& progress,
                                  std::pair<double, double> factors);

// one full cycle: parallel worker phase, barrier, serial meta-steps; returns
// evaluations consumed (also accumulated into meta.evaluations)
std::uint64_t dcc_cycle(MetaState& meta, const Objective& obj, const DccConfig& config);

struct DccTermination {
  double fitness_target = 1e-10;
  std::uint64_t max_evaluations = UINT64_MAX;  // literal; 0 stops after the initial point
  double max_wall_seconds = 0.0;               // <= 0 disables the wall clock bound
  std::uint64_t max_cycles = UINT64_MAX;
};

RunRecord run_dcc(const Objective& obj, const DccConfig& config, const DccTermination& term,
                  std::uint64_t master_seed);

}  // namespace ccopt
