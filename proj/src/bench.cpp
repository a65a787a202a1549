#include "ccopt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "ccopt/cc.hpp"
#include "ccopt/cma.hpp"
#include "ccopt/dcc.hpp"
#include "ccopt/game.hpp"
#include "ccopt/lmcma.hpp"
#include "ccopt/partition.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

using nlohmann::json;

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> ids = {"cc", "lmcma", "cma", "dcc"};
  return ids;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  ExperimentConfig cfg;
  const std::map<std::string, int> known = {
      {"function", 0},        {"dimension", 0},       {"seeds", 0},
      {"algorithm", 0},       {"fitness_target", 0},  {"max_evaluations", 0},
      {"max_wall_seconds", 0}, {"max_cycles", 0},     {"output_path", 0},
      {"eval_delay_ms", 0},   {"rotated", 0},         {"shifted", 0},
      {"num_components", 0},  {"overlap", 0},         {"conforming", 0},
      {"sigma0", 0},          {"k", 0},               {"per_group_budget", 0},
      {"patience", 0},        {"p", 0},               {"p_es", 0},
      {"p_cc", 0},            {"cycle_evals", 0},     {"record_every", 0}};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");

  try {
    if (j.contains("function")) cfg.function_id = j["function"].get<std::string>();
    if (j.contains("dimension")) cfg.dimension = j["dimension"].get<std::size_t>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("algorithm")) cfg.algorithm = j["algorithm"].get<std::string>();
    if (j.contains("fitness_target")) cfg.fitness_target = j["fitness_target"].get<double>();
    if (j.contains("max_evaluations"))
      cfg.max_evaluations = j["max_evaluations"].get<std::uint64_t>();
    if (j.contains("max_wall_seconds"))
      cfg.max_wall_seconds = j["max_wall_seconds"].get<double>();
    if (j.contains("max_cycles")) cfg.max_cycles = j["max_cycles"].get<std::uint64_t>();
    if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
    if (j.contains("eval_delay_ms")) cfg.eval_delay_ms = j["eval_delay_ms"].get<double>();
    if (j.contains("rotated")) cfg.rotated = j["rotated"].get<bool>();
    if (j.contains("shifted")) cfg.shifted = j["shifted"].get<bool>();
    if (j.contains("num_components")) cfg.num_components = j["num_components"].get<int>();
    if (j.contains("overlap")) cfg.overlap = j["overlap"].get<int>();
    if (j.contains("conforming")) cfg.conforming = j["conforming"].get<bool>();
    if (j.contains("sigma0")) cfg.sigma0 = j["sigma0"].get<double>();
    if (j.contains("k")) cfg.k = j["k"].get<int>();
    if (j.contains("per_group_budget"))
      cfg.per_group_budget = j["per_group_budget"].get<std::uint64_t>();
    if (j.contains("patience")) cfg.patience = j["patience"].get<int>();
    if (j.contains("p")) cfg.p = j["p"].get<int>();
    if (j.contains("p_es")) cfg.p_es = j["p_es"].get<int>();
    if (j.contains("p_cc")) cfg.p_cc = j["p_cc"].get<int>();
    if (j.contains("cycle_evals")) cfg.cycle_evals = j["cycle_evals"].get<std::uint64_t>();
    if (j.contains("record_every")) cfg.record_every = j["record_every"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field type: ") + e.what());
  }

  if (!(cfg.fitness_target > 0.0))
    throw std::invalid_argument("config: fitness_target must be positive");
  if (cfg.max_evaluations == UINT64_MAX && cfg.max_wall_seconds <= 0.0 &&
      cfg.max_cycles == UINT64_MAX)
    throw std::invalid_argument("config: at least one budget bound must be set");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  if (std::find(known_algorithms().begin(), known_algorithms().end(), cfg.algorithm) ==
      known_algorithms().end()) {
    std::string msg = "config: unknown algorithm '" + cfg.algorithm + "'; valid:";
    for (const auto& a : known_algorithms()) msg += " " + a;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["function"] = cfg.function_id;
  j["dimension"] = cfg.dimension;
  j["seeds"] = cfg.seeds;
  j["algorithm"] = cfg.algorithm;
  j["fitness_target"] = cfg.fitness_target;
  j["max_evaluations"] = cfg.max_evaluations;
  j["max_wall_seconds"] = cfg.max_wall_seconds;
  j["max_cycles"] = cfg.max_cycles;
  j["output_path"] = cfg.output_path;
  j["eval_delay_ms"] = cfg.eval_delay_ms;
  j["rotated"] = cfg.rotated;
  j["shifted"] = cfg.shifted;
  j["num_components"] = cfg.num_components;
  j["overlap"] = cfg.overlap;
  j["conforming"] = cfg.conforming;
  j["sigma0"] = cfg.sigma0;
  j["k"] = cfg.k;
  j["per_group_budget"] = cfg.per_group_budget;
  j["patience"] = cfg.patience;
  j["p"] = cfg.p;
  j["p_es"] = cfg.p_es;
  j["p_cc"] = cfg.p_cc;
  j["cycle_evals"] = cfg.cycle_evals;
  j["record_every"] = cfg.record_every;
  return j.dump();
}

std::uint64_t fingerprint(const ExperimentConfig& cfg) { return fnv1a64(config_to_json(cfg)); }

std::shared_ptr<Objective> make_objective(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  const std::uint64_t instance_seed = derive_seed(run_seed, 101);

  const auto& analysis = analysis_function_names();
  if (std::find(analysis.begin(), analysis.end(), cfg.function_id) != analysis.end()) {
    auto obj = make_analysis_function(cfg.function_id);
    obj->set_eval_delay_ms(cfg.eval_delay_ms);
    return obj;
  }

  if (cfg.function_id == "overlapping") {
    OverlappingSpec spec;
    spec.dimension = cfg.dimension;
    spec.components = overlapping_windows(cfg.dimension, static_cast<std::size_t>(cfg.num_components),
                                          static_cast<std::size_t>(cfg.overlap));
    spec.shift_mode = cfg.conforming ? ShiftMode::conforming : ShiftMode::conflicting;
    auto obj = make_overlapping(spec, instance_seed);
    obj->set_eval_delay_ms(cfg.eval_delay_ms);
    return obj;
  }

  const BaseId id = base_from_name(cfg.function_id);
  std::shared_ptr<Objective> obj;
  if (cfg.rotated && cfg.shifted) {
    obj = make_rotated_shifted(id, cfg.dimension, instance_seed);
  } else {
    Rng rng(instance_seed);
    std::vector<double> rot = random_rotation(cfg.dimension, rng);
    std::vector<double> shift(cfg.dimension);
    for (double& v : shift) v = rng.uniform(-10.0, 10.0);
    if (!cfg.rotated) rot.clear();
    if (!cfg.shifted) shift.clear();
    obj = std::make_shared<Table1Objective>(id, cfg.dimension, std::move(rot), std::move(shift));
  }
  obj->set_eval_delay_ms(cfg.eval_delay_ms);
  return obj;
}

namespace {

std::uint64_t auto_record_every(const Objective& obj, std::uint64_t max_evaluations) {
  const std::uint64_t lambda = default_lambda(obj.dimension());
  if (max_evaluations == UINT64_MAX) return 100;
  const std::uint64_t gens = std::max<std::uint64_t>(1, max_evaluations / lambda);
  return std::max<std::uint64_t>(1, gens / 1000);
}

}  // namespace

RunRecord run_lmcma(const Objective& obj, double fitness_target, std::uint64_t max_evaluations,
                    double max_wall_seconds, std::uint64_t max_cycles, std::uint64_t seed,
                    double sigma0, std::uint64_t record_every) {
  if (record_every == 0) record_every = auto_record_every(obj, max_evaluations);
  Rng rng = worker_stream(seed, 0);
  LmcmaState state = make_lmcma_worker(obj, rng, sigma0);

  RunRecord rec;
  rec.function_id = obj.name();
  rec.algorithm = "lmcma";
  rec.seed = seed;
  rec.status = RunStatus::budget_exhausted;

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::uint64_t evals = 1;
  double best = obj.evaluate(state.mean());
  rec.points.push_back({0, evals, best, wall_ms()});

  for (;;) {
    best = std::min(best, state.best_fitness());
    if (best <= fitness_target) {
      rec.status = RunStatus::target_reached;
      break;
    }
    if (evals + state.lambda() > max_evaluations) break;
    if (max_wall_seconds > 0.0 && wall_ms() >= max_wall_seconds * 1e3) break;
    if (state.generation() >= max_cycles) break;

    evals += lmcma_step(state, obj, rng);
    if (state.generation() % record_every == 0)
      rec.points.push_back({state.generation(), evals, std::min(best, state.best_fitness()),
                            wall_ms()});
  }
  best = std::min(best, state.best_fitness());
  if (rec.points.back().evaluations != evals)
    rec.points.push_back({state.generation(), evals, best, wall_ms()});
  else
    rec.points.back().best_f = std::min(rec.points.back().best_f, best);
  return rec;
}

RunRecord run_cma(const Objective& obj, double fitness_target, std::uint64_t max_evaluations,
                  double max_wall_seconds, std::uint64_t max_cycles, std::uint64_t seed,
                  double sigma0, std::uint64_t record_every) {
  if (record_every == 0) record_every = auto_record_every(obj, max_evaluations);
  Rng rng = worker_stream(seed, 0);
  const std::size_t n = obj.dimension();
  std::vector<double> mean(n);
  for (double& v : mean) v = rng.uniform(-10.0, 10.0);
  CmaState state(mean, sigma0);

  RunRecord rec;
  rec.function_id = obj.name();
  rec.algorithm = "cma";
  rec.seed = seed;
  rec.status = RunStatus::budget_exhausted;

  const auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::uint64_t evals = 1;
  double best = obj.evaluate(mean);
  rec.points.push_back({0, evals, best, wall_ms()});

  for (;;) {
    best = std::min(best, state.best_fitness());
    if (best <= fitness_target) {
      rec.status = RunStatus::target_reached;
      break;
    }
    if (evals + state.lambda() > max_evaluations) break;
    if (max_wall_seconds > 0.0 && wall_ms() >= max_wall_seconds * 1e3) break;
    if (state.generation() >= max_cycles) break;

    const auto pop = state.ask(rng);
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = obj.evaluate(pop[i]);
    evals += pop.size();
    state.tell(pop, fit);
    if (state.generation() % record_every == 0)
      rec.points.push_back({state.generation(), evals, std::min(best, state.best_fitness()),
                            wall_ms()});
  }
  best = std::min(best, state.best_fitness());
  if (rec.points.back().evaluations != evals)
    rec.points.push_back({state.generation(), evals, best, wall_ms()});
  else
    rec.points.back().best_f = std::min(rec.points.back().best_f, best);
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  if (std::find(known_algorithms().begin(), known_algorithms().end(), cfg.algorithm) ==
      known_algorithms().end())
    throw std::invalid_argument("run_experiment: unknown algorithm " + cfg.algorithm);

  std::vector<RunRecord> records;
  for (std::uint64_t seed : cfg.seeds) {
    auto obj = make_objective(cfg, seed);
    RunRecord rec;
    if (cfg.algorithm == "cc") {
      Partition part = default_decompose(obj->dimension(), static_cast<std::size_t>(cfg.k),
                                         derive_seed(seed, 202));
      CcRunConfig rc;
      rc.fitness_target = cfg.fitness_target;
      rc.max_evaluations = cfg.max_evaluations;
      rc.max_wall_seconds = cfg.max_wall_seconds;
      rc.max_cycles = cfg.max_cycles;
      rc.per_group_budget = cfg.per_group_budget;
      rc.patience = cfg.patience;
      rc.sigma0 = cfg.sigma0;
      Rng rng = worker_stream(seed, 0);
      rec = run_cc(*obj, part, rc, rng);
    } else if (cfg.algorithm == "lmcma") {
      rec = run_lmcma(*obj, cfg.fitness_target, cfg.max_evaluations, cfg.max_wall_seconds,
                      cfg.max_cycles, seed, cfg.sigma0, cfg.record_every);
    } else if (cfg.algorithm == "cma") {
      rec = run_cma(*obj, cfg.fitness_target, cfg.max_evaluations, cfg.max_wall_seconds,
                    cfg.max_cycles, seed, cfg.sigma0, cfg.record_every);
    } else {
      DccConfig dc;
      dc.p = cfg.p;
      dc.p_es = cfg.p_es;
      dc.p_cc = cfg.p_cc;
      dc.k = cfg.k;
      dc.cycle_evals = cfg.cycle_evals;
      dc.sigma0 = cfg.sigma0;
      DccTermination term;
      term.fitness_target = cfg.fitness_target;
      term.max_evaluations = cfg.max_evaluations;
      term.max_wall_seconds = cfg.max_wall_seconds;
      term.max_cycles = cfg.max_cycles;
      rec = run_dcc(*obj, dc, term, seed);
    }
    rec.fingerprint = fingerprint(cfg);
    rec.seed = seed;
    records.push_back(std::move(rec));
  }

  if (!cfg.output_path.empty()) {
    std::filesystem::create_directories(cfg.output_path);
    for (const RunRecord& rec : records) {
      const std::string file = cfg.output_path + "/" + rec.function_id + "_" + rec.algorithm +
                               "_s" + std::to_string(rec.seed) + ".csv";
      write_csv_file(rec, file);
    }
  }
  return records;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, double fitness_target) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) groups[{r.function_id, r.algorithm}].push_back(&r);

  std::vector<SummaryRow> rows;
  for (const auto& [key, recs] : groups) {
    SummaryRow row;
    row.function_id = key.first;
    row.algorithm = key.second;
    row.runs = recs.size();
    std::vector<double> finals, to_target;
    for (const RunRecord* r : recs) {
      finals.push_back(r->final_best());
      const std::uint64_t e = r->evaluations_to(fitness_target);
      to_target.push_back(e == 0 ? std::numeric_limits<double>::infinity()
                                 : static_cast<double>(e));
      if (r->status == RunStatus::target_reached) ++row.successes;
    }
    row.median_final_f = median(finals);
    row.median_evals_to_target = median(to_target);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "function,algorithm,runs,successes,median_final_f,median_evals_to_target\n";
  char buf[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%zu,%.17g,%.17g\n", r.function_id.c_str(),
                  r.algorithm.c_str(), r.runs, r.successes, r.median_final_f,
                  r.median_evals_to_target);
    out += buf;
  }
  return out;
}

}  // namespace ccopt
