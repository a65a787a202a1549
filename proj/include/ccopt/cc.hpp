#pragma once
// Serial cooperative coevolution: cycle over the partition groups, optimize
// each subspace against the frozen context, splice a candidate back in only
// when it strictly improves the best-so-far fitness.
#include <cstdint>
#include <span>
#include <vector>

#include "ccopt/cma.hpp"
#include "ccopt/objective.hpp"
#include "ccopt/partition.hpp"
#include "ccopt/rng.hpp"
#include "ccopt/run_record.hpp"

namespace ccopt {

struct CcState {
  const Objective* obj = nullptr;
  Partition partition;
  std::vector<double> context;
  double context_fitness = 0.0;
  std::vector<CmaState> sub_states;
  double sigma0 = 3.0;
  double tol_fix = 1e-12;
  std::uint64_t cycle = 0;
  bool fixed_point_flag = false;
  bool context_needs_eval = false;  // set when the context was replaced externally
};

CcState make_cc_state(const Objective& obj, Partition partition, std::span<const double> start,
                      double start_fitness, double sigma0 = 3.0);

// per_group_budget = 0 selects the default 50 * lambda of each group.
// Returns evaluations consumed.
std::uint64_t cc_cycle(CcState& state, std::uint64_t per_group_budget, Rng& rng);

struct CcRunConfig {
  double fitness_target = 1e-10;
  std::uint64_t max_evaluations = UINT64_MAX;  // literal budget; 0 stops after the initial point
  double max_wall_seconds = 0.0;               // <= 0 disables the wall clock bound
  std::uint64_t max_cycles = UINT64_MAX;
  std::uint64_t per_group_budget = 0;  // 0 = default 50 * lambda per group
  double tol_fix = 1e-12;
  int patience = 3;
  double sigma0 = 3.0;
};

RunRecord run_cc(const Objective& obj, const Partition& partition, const CcRunConfig& config,
                 Rng& rng);
RunRecord run_cc(const Objective& obj, const Partition& partition, const CcRunConfig& config,
                 Rng& rng, std::span<const double> start);

}  // namespace ccopt
