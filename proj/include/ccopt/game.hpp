#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ccopt/objective.hpp"
#include "ccopt/partition.hpp"

namespace ccopt {

// Two-dimensional analysis functions with known equilibrium structure, plus a
// three-variable chained quadratic used for refinement-propagation checks:
//   f1      7x^2 + 6xy + 8y^2
//   f2      x^2 + 100y^2 rotated by 30 degrees (condition number 100)
//   f3      100(x^2 - y)^2 + (x - 1)^2
//   f4      |x - y| - min(x, y)
//   chain3  (x+y)^2 + (y-1)^2 + (y+1)^2 + (y+z)^2
std::shared_ptr<Objective> make_analysis_function(const std::string& id);
const std::vector<std::string>& analysis_function_names();

struct BestResponse {
  std::vector<double> subvector;
  double fitness = std::numeric_limits<double>::quiet_NaN();
  bool unbounded = false;
  std::uint64_t evaluations = 0;
  // final iterate of every multistart, kept for tie analysis
  std::vector<std::vector<double>> endpoints;
  std::vector<double> endpoint_fitness;
};

// Approximate argmin over one group's coordinates with the rest of x frozen.
// Multistart (16) compass search restricted to [box_lo, box_hi] per coordinate,
// refined until the step falls below 1e-11. Group size must be <= 8.
// budget = 0 selects a default evaluation cap.
BestResponse best_response(const Objective& obj, const Partition& p,
                           const std::vector<double>& x, std::size_t group_index,
                           std::uint64_t budget = 0, double box_lo = -10.0,
                           double box_hi = 10.0,
                           std::uint64_t seed = 0x3c6ef372fe94f82aULL);

struct PneCertificate {
  std::vector<double> point;
  Partition partition;
  double tolerance = 0.0;
  bool is_pne = false;
  bool is_strict = false;
  // per group: f(best response spliced in) - f(point); >= -tolerance means the
  // group cannot improve beyond the tolerance
  std::vector<double> per_group_gap;
};

// Certifies whether no single group can improve f by changing only its own
// coordinates within the box. Strict iff additionally no distant candidate
// ties the current fitness within the tolerance. Dimension must be <= 16.
PneCertificate verify_pne(const Objective& obj, const Partition& p,
                          const std::vector<double>& x, double tolerance = 1e-10,
                          double box_lo = -10.0, double box_hi = 10.0,
                          std::uint64_t seed = 0x3c6ef372fe94f82aULL);

// Exact membership test in the known equilibrium set of the analysis
// functions: f1/f2 -> {(0,0)}, f3 -> {(1,1)}, f4 -> {x = y} (coordinate
// partition required for those four), schwefel221 -> equal per-group max-abs
// under any partition. Throws on unsupported (function, partition) pairs.
bool closed_form_pne(const std::string& function_id, const std::vector<double>& point,
                     const Partition& partition, double atol = 1e-9);

// True iff (x certified for the coarse partition) implies (x certified for the
// refined one). fine must be a refinement of coarse.
bool check_downward_propagation(const Objective& obj, const Partition& coarse,
                                const Partition& fine, const std::vector<double>& x,
                                double tolerance = 1e-10);

struct Trace {
  // points[c] is the state after cycle c; points[0] = x0
  std::vector<std::vector<double>> points;
  std::vector<double> fitness;
  bool converged = false;
};

// Alternating exact best responses under the coordinate partition of a
// 2-d objective. f1/f2/f3/f4 use closed-form responders; anything else falls
// back to the numeric best_response. Stops when the per-cycle movement drops
// below 1e-12 or after max_cycles.
Trace trace_best_response_dynamics(const Objective& obj, const Partition& p,
                                   const std::vector<double>& x0,
                                   std::uint64_t max_cycles);

// rows "cycle,x,y,f"
std::string trace_csv(const Trace& t);

}  // namespace ccopt
