#pragma once
// Experiment harness: JSON experiment configs, paired per-seed objective
// instances, single-run drivers for the four algorithms, and summary tables
// over the recorded convergence series.
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ccopt/objective.hpp"
#include "ccopt/run_record.hpp"

namespace ccopt {

struct ExperimentConfig {
  std::string function_id = "sphere";
  std::size_t dimension = 128;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string algorithm = "dcc";  // cc | lmcma | cma | dcc

  double fitness_target = 1e-10;
  std::uint64_t max_evaluations = UINT64_MAX;  // literal budget
  double max_wall_seconds = 600.0;             // <= 0 disables
  std::uint64_t max_cycles = UINT64_MAX;

  std::string output_path;  // directory for per-run CSVs; empty = none
  double eval_delay_ms = 0.0;
  bool rotated = true;
  bool shifted = true;
  int num_components = 5;  // overlapping objective only
  int overlap = 2;
  bool conforming = true;

  double sigma0 = 3.0;
  int k = 4;                           // cc / dcc group count
  std::uint64_t per_group_budget = 0;  // cc; 0 = 50 * lambda
  int patience = 3;                    // cc fixed-point patience
  int p = 8;                           // dcc worker count
  int p_es = -1;
  int p_cc = -1;
  std::uint64_t cycle_evals = 0;   // dcc; 0 = 100 * lambda
  std::uint64_t record_every = 0;  // lmcma/cma generations per CSV row; 0 = auto
};

// strict parse: unknown keys are rejected
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);  // canonical key order
std::uint64_t fingerprint(const ExperimentConfig& cfg);

// paired instances: the objective depends on (function, dimension, wrappers,
// run seed) but never on the algorithm
std::shared_ptr<Objective> make_objective(const ExperimentConfig& cfg, std::uint64_t run_seed);

const std::vector<std::string>& known_algorithms();

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

RunRecord run_lmcma(const Objective& obj, double fitness_target, std::uint64_t max_evaluations,
                    double max_wall_seconds, std::uint64_t max_cycles, std::uint64_t seed,
                    double sigma0 = 3.0, std::uint64_t record_every = 0);

RunRecord run_cma(const Objective& obj, double fitness_target, std::uint64_t max_evaluations,
                  double max_wall_seconds, std::uint64_t max_cycles, std::uint64_t seed,
                  double sigma0 = 3.0, std::uint64_t record_every = 0);

struct SummaryRow {
  std::string function_id;
  std::string algorithm;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double median_final_f = 0.0;
  double median_evals_to_target = std::numeric_limits<double>::infinity();
};

// exact middle element for odd sizes, average of the two middles for even
double median(std::vector<double> values);

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  double fitness_target = 1e-10);
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace ccopt
