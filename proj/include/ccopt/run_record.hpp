#pragma once
// Convergence series for one optimization run plus CSV round-trip helpers.
#include <cstdint>
#include <string>
#include <vector>

namespace ccopt {

enum class RunStatus { target_reached, budget_exhausted, fixed_point };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct RunPoint {
  std::uint64_t cycle = 0;
  std::uint64_t evaluations = 0;
  double best_f = 0.0;
  double wall_ms = 0.0;
};

struct RunRecord {
  std::uint64_t fingerprint = 0;
  std::string function_id;
  std::string algorithm;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::budget_exhausted;
  std::vector<RunPoint> points;

  double final_best() const;
  // evaluations at the first point with best_f <= target, or 0 if never
  std::uint64_t evaluations_to(double target) const;
};

std::string emit_csv(const RunRecord& r);
RunRecord parse_csv(const std::string& text);

void write_csv_file(const RunRecord& r, const std::string& path);
RunRecord read_csv_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace ccopt
