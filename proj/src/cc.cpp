#include "ccopt/cc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ccopt {

CcState make_cc_state(const Objective& obj, Partition partition, std::span<const double> start,
                      double start_fitness, double sigma0) {
  auto check = validate(partition);
  if (!check.ok) throw std::invalid_argument("make_cc_state: " + check.diagnostic);
  if (partition.n != obj.dimension())
    throw std::invalid_argument("make_cc_state: partition dimension mismatch");
  if (start.size() != obj.dimension())
    throw std::invalid_argument("make_cc_state: start dimension mismatch");

  CcState s;
  s.obj = &obj;
  s.partition = std::move(partition);
  s.context.assign(start.begin(), start.end());
  s.context_fitness = std::isnan(start_fitness) ? obj.evaluate(start) : start_fitness;
  s.sigma0 = sigma0;
  for (const auto& g : s.partition.groups) {
    std::vector<double> sub(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sub[i] = s.context[static_cast<std::size_t>(g[i])];
    s.sub_states.emplace_back(sub, sigma0);
  }
  return s;
}

std::uint64_t cc_cycle(CcState& state, std::uint64_t per_group_budget, Rng& rng) {
  if (!state.obj) throw std::invalid_argument("cc_cycle: state has no objective");
  std::uint64_t used = 0;
  if (state.context_needs_eval) {
    state.context_fitness = state.obj->evaluate(state.context);
    state.context_needs_eval = false;
    ++used;
  }
  double max_improvement = 0.0;
  std::vector<double> sub;
  for (std::size_t gi = 0; gi < state.partition.groups.size(); ++gi) {
    const auto& group = state.partition.groups[gi];
    CmaState& st = state.sub_states[gi];

    sub.resize(group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
      sub[i] = state.context[static_cast<std::size_t>(group[i])];
    st.set_mean(sub);
    st.normalize_covariance_scale();
    st.set_sigma(std::min(st.sigma() * 10.0, state.sigma0));

    std::uint64_t budget = per_group_budget ? per_group_budget : 50 * st.lambda();
    auto result = optimize_subspace(*state.obj, state.context, group, budget, rng, &st,
                                    state.context_fitness, state.sigma0);
    used += result.evaluations_used;

    double improvement = state.context_fitness - result.best_fitness;
    if (result.best_fitness < state.context_fitness) {
      for (std::size_t i = 0; i < group.size(); ++i)
        state.context[static_cast<std::size_t>(group[i])] = result.best_subvector[i];
      state.context_fitness = result.best_fitness;
      if (improvement > max_improvement) max_improvement = improvement;
    }
  }
  ++state.cycle;
  state.fixed_point_flag = max_improvement <= state.tol_fix;
  return used;
}

namespace {

RunRecord run_cc_impl(const Objective& obj, const Partition& partition, const CcRunConfig& config,
                      Rng& rng, std::span<const double> start) {
  RunRecord rec;
  rec.function_id = obj.name();
  rec.algorithm = "cc";
  auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  CcState state = make_cc_state(obj, partition, start, std::numeric_limits<double>::quiet_NaN(),
                                config.sigma0);
  state.tol_fix = config.tol_fix;
  std::uint64_t evals = 1;  // the initial context evaluation
  rec.points.push_back({0, evals, state.context_fitness, wall_ms()});

  int calm_cycles = 0;
  rec.status = RunStatus::budget_exhausted;
  for (;;) {
    if (state.context_fitness <= config.fitness_target) {
      rec.status = RunStatus::target_reached;
      break;
    }
    if (evals >= config.max_evaluations) break;
    if (config.max_wall_seconds > 0.0 && wall_ms() >= config.max_wall_seconds * 1e3) break;
    if (state.cycle >= config.max_cycles) break;

    evals += cc_cycle(state, config.per_group_budget, rng);
    rec.points.push_back({state.cycle, evals, state.context_fitness, wall_ms()});

    calm_cycles = state.fixed_point_flag ? calm_cycles + 1 : 0;
    if (calm_cycles >= config.patience) {
      rec.status = state.context_fitness <= config.fitness_target ? RunStatus::target_reached
                                                                  : RunStatus::fixed_point;
      break;
    }
  }
  if (state.context_fitness <= config.fitness_target) rec.status = RunStatus::target_reached;
  return rec;
}

}  // namespace

RunRecord run_cc(const Objective& obj, const Partition& partition, const CcRunConfig& config,
                 Rng& rng) {
  std::vector<double> start(obj.dimension());
  for (auto& v : start) v = rng.uniform(-10.0, 10.0);
  return run_cc_impl(obj, partition, config, rng, start);
}

RunRecord run_cc(const Objective& obj, const Partition& partition, const CcRunConfig& config,
                 Rng& rng, std::span<const double> start) {
  return run_cc_impl(obj, partition, config, rng, start);
}

}  // namespace ccopt
