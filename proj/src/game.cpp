#include "ccopt/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ccopt/rng.hpp"

namespace ccopt {
namespace {

constexpr double kUnboundedFloor = -1e12;
constexpr double kCompassStop = 1e-11;
constexpr double kTieDistance = 1e-6;

enum class AnalysisId { f1, f2, f3, f4, chain3 };

// Hessian/2 of the rotated ill-conditioned quadratic: R^T diag(1,100) R at 30 degrees
double f2_a11() { return 103.0 / 4.0; }
double f2_a22() { return 301.0 / 4.0; }
double f2_a12() { return 99.0 * std::sqrt(3.0) / 4.0; }

class AnalysisObjective final : public Objective {
 public:
  AnalysisObjective(AnalysisId id, std::string name, std::size_t dim)
      : id_(id), name_(std::move(name)), n_(dim) {}

  std::size_t dimension() const override { return n_; }
  std::string name() const override { return name_; }

  double optimum_value() const override {
    switch (id_) {
      case AnalysisId::f1:
      case AnalysisId::f2:
      case AnalysisId::f3:
        return 0.0;
      case AnalysisId::chain3:
        return 2.0;
      case AnalysisId::f4:
        break;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::vector<double> optimum_point() const override {
    switch (id_) {
      case AnalysisId::f1:
      case AnalysisId::f2:
        return {0.0, 0.0};
      case AnalysisId::f3:
        return {1.0, 1.0};
      case AnalysisId::chain3:
        return {0.0, 0.0, 0.0};
      case AnalysisId::f4:
        break;
    }
    return {};
  }

  AnalysisId id() const { return id_; }

 protected:
  double eval_impl(std::span<const double> x) const override {
    switch (id_) {
      case AnalysisId::f1:
        return 7.0 * x[0] * x[0] + 6.0 * x[0] * x[1] + 8.0 * x[1] * x[1];
      case AnalysisId::f2:
        return f2_a11() * x[0] * x[0] + 2.0 * f2_a12() * x[0] * x[1] + f2_a22() * x[1] * x[1];
      case AnalysisId::f3: {
        const double t = x[0] * x[0] - x[1];
        return 100.0 * t * t + (x[0] - 1.0) * (x[0] - 1.0);
      }
      case AnalysisId::f4:
        return std::fabs(x[0] - x[1]) - std::min(x[0], x[1]);
      case AnalysisId::chain3: {
        const double a = x[0] + x[1];
        const double b = x[1] - 1.0;
        const double c = x[1] + 1.0;
        const double d = x[1] + x[2];
        return a * a + b * b + c * c + d * d;
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  AnalysisId id_;
  std::string name_;
  std::size_t n_;
};

const AnalysisObjective* as_analysis(const Objective& obj) {
  return dynamic_cast<const AnalysisObjective*>(&obj);
}

bool is_coordinate_pair_partition(const Partition& p) {
  if (p.n != 2 || p.groups.size() != 2) return false;
  Partition c = p;
  canonicalize(c);
  return c.groups[0] == std::vector<int>{0} && c.groups[1] == std::vector<int>{1};
}

double splice_eval(const Objective& obj, std::vector<double>& full,
                   const std::vector<int>& group, const std::vector<double>& sub) {
  for (std::size_t j = 0; j < group.size(); ++j) full[static_cast<std::size_t>(group[j])] = sub[j];
  return obj.evaluate(full);
}

}  // namespace

const std::vector<std::string>& analysis_function_names() {
  static const std::vector<std::string> names = {"f1", "f2", "f3", "f4", "chain3"};
  return names;
}

std::shared_ptr<Objective> make_analysis_function(const std::string& id) {
  if (id == "f1") return std::make_shared<AnalysisObjective>(AnalysisId::f1, id, 2);
  if (id == "f2") return std::make_shared<AnalysisObjective>(AnalysisId::f2, id, 2);
  if (id == "f3") return std::make_shared<AnalysisObjective>(AnalysisId::f3, id, 2);
  if (id == "f4") return std::make_shared<AnalysisObjective>(AnalysisId::f4, id, 2);
  if (id == "chain3") return std::make_shared<AnalysisObjective>(AnalysisId::chain3, id, 3);
  throw std::invalid_argument("unknown analysis function: " + id);
}

BestResponse best_response(const Objective& obj, const Partition& p,
                           const std::vector<double>& x, std::size_t group_index,
                           std::uint64_t budget, double box_lo, double box_hi,
                           std::uint64_t seed) {
  PartitionCheck chk = validate(p);
  if (!chk.ok) throw std::invalid_argument("best_response: " + chk.diagnostic);
  if (p.n != x.size()) throw std::invalid_argument("best_response: point/partition size mismatch");
  if (group_index >= p.groups.size()) throw std::invalid_argument("best_response: bad group index");
  const std::vector<int>& group = p.groups[group_index];
  const std::size_t d = group.size();
  if (d > 8) throw std::invalid_argument("best_response: group larger than 8");
  if (!(box_lo < box_hi)) throw std::invalid_argument("best_response: empty box");
  if (budget == 0) budget = 50000;

  Rng rng(derive_seed(seed, group_index));
  std::vector<double> full = x;
  std::vector<double> current(d);
  for (std::size_t j = 0; j < d; ++j) current[j] = x[static_cast<std::size_t>(group[j])];

  BestResponse out;
  out.subvector = current;
  out.fitness = splice_eval(obj, full, group, current);
  ++out.evaluations;

  const int n_starts = 16;
  std::vector<double> sub(d), cand(d);
  for (int s = 0; s < n_starts && !out.unbounded; ++s) {
    if (s == 0) {
      sub = current;
    } else {
      for (std::size_t j = 0; j < d; ++j) sub[j] = rng.uniform(box_lo, box_hi);
    }
    double fs = splice_eval(obj, full, group, sub);
    ++out.evaluations;
    double step = 0.25 * (box_hi - box_lo);
    while (step >= kCompassStop && out.evaluations < budget && !out.unbounded) {
      bool improved = false;
      for (std::size_t j = 0; j < d && out.evaluations < budget; ++j) {
        for (int dir = -1; dir <= 1; dir += 2) {
          cand = sub;
          cand[j] = std::clamp(cand[j] + dir * step, box_lo, box_hi);
          if (cand[j] == sub[j]) continue;
          const double fc = splice_eval(obj, full, group, cand);
          ++out.evaluations;
          if (fc < fs) {
            sub = cand;
            fs = fc;
            improved = true;
            if (fc < kUnboundedFloor) {
              out.unbounded = true;
              break;
            }
          }
        }
        if (out.unbounded) break;
      }
      if (!improved) step *= 0.5;
    }
    out.endpoints.push_back(sub);
    out.endpoint_fitness.push_back(fs);
    if (fs < out.fitness) {
      out.fitness = fs;
      out.subvector = sub;
    }
  }
  for (std::size_t j = 0; j < d; ++j) full[static_cast<std::size_t>(group[j])] = x[static_cast<std::size_t>(group[j])];
  return out;
}

PneCertificate verify_pne(const Objective& obj, const Partition& p, const std::vector<double>& x,
                          double tolerance, double box_lo, double box_hi, std::uint64_t seed) {
  PartitionCheck chk = validate(p);
  if (!chk.ok) throw std::invalid_argument("verify_pne: " + chk.diagnostic);
  if (p.n != x.size() || x.size() != obj.dimension())
    throw std::invalid_argument("verify_pne: dimension mismatch");
  if (x.size() > 16) throw std::invalid_argument("verify_pne: dimension larger than 16");

  PneCertificate cert;
  cert.point = x;
  cert.partition = p;
  canonicalize(cert.partition);
  cert.tolerance = tolerance;
  cert.per_group_gap.resize(cert.partition.groups.size());

  const double f_here = obj.evaluate(x);
  cert.is_pne = true;
  cert.is_strict = true;
  for (std::size_t i = 0; i < cert.partition.groups.size(); ++i) {
    BestResponse br = best_response(obj, cert.partition, x, i, 0, box_lo, box_hi,
                                    derive_seed(seed, i + 1));
    cert.per_group_gap[i] = br.fitness - f_here;
    if (!(cert.per_group_gap[i] >= -tolerance)) cert.is_pne = false;
    const std::vector<int>& group = cert.partition.groups[i];
    for (std::size_t e = 0; e < br.endpoints.size(); ++e) {
      double dist = 0.0;
      for (std::size_t j = 0; j < group.size(); ++j)
        dist = std::max(dist, std::fabs(br.endpoints[e][j] - x[static_cast<std::size_t>(group[j])]));
      if (dist > kTieDistance && br.endpoint_fitness[e] <= f_here + tolerance)
        cert.is_strict = false;
    }
  }
  if (!cert.is_pne) cert.is_strict = false;
  return cert;
}

bool closed_form_pne(const std::string& function_id, const std::vector<double>& point,
                     const Partition& partition, double atol) {
  PartitionCheck chk = validate(partition);
  if (!chk.ok) throw std::invalid_argument("closed_form_pne: " + chk.diagnostic);
  if (partition.n != point.size())
    throw std::invalid_argument("closed_form_pne: point/partition size mismatch");

  if (function_id == "schwefel221") {
    Partition c = partition;
    canonicalize(c);
    std::vector<double> group_max(c.groups.size(), 0.0);
    for (std::size_t i = 0; i < c.groups.size(); ++i)
      for (int idx : c.groups[i])
        group_max[i] = std::max(group_max[i], std::fabs(point[static_cast<std::size_t>(idx)]));
    const auto [lo, hi] = std::minmax_element(group_max.begin(), group_max.end());
    return *hi - *lo <= atol;
  }

  if (function_id == "f1" || function_id == "f2" || function_id == "f3" || function_id == "f4") {
    if (point.size() != 2 || !is_coordinate_pair_partition(partition))
      throw std::invalid_argument("closed_form_pne: " + function_id +
                                  " requires the 2-d coordinate partition");
    if (function_id == "f4") return std::fabs(point[0] - point[1]) <= atol;
    const double cx = (function_id == "f3") ? 1.0 : 0.0;
    return std::fabs(point[0] - cx) <= atol && std::fabs(point[1] - cx) <= atol;
  }

  throw std::invalid_argument("closed_form_pne: unsupported function " + function_id);
}

bool check_downward_propagation(const Objective& obj, const Partition& coarse,
                                const Partition& fine, const std::vector<double>& x,
                                double tolerance) {
  if (!is_refinement(coarse, fine))
    throw std::invalid_argument("check_downward_propagation: partitions are not nested");
  PneCertificate at_coarse = verify_pne(obj, coarse, x, tolerance);
  if (!at_coarse.is_pne) return true;
  return verify_pne(obj, fine, x, tolerance).is_pne;
}

namespace {

// real roots of x^3 + p x + q = 0
std::vector<double> depressed_cubic_roots(double p, double q) {
  constexpr double kPi = 3.14159265358979323846;
  std::vector<double> roots;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double theta = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(r * std::cos((theta - 2.0 * kPi * k) / 3.0));
  } else {
    const double s = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
  }
  for (double& r : roots)
    for (int it = 0; it < 2; ++it) {
      const double val = r * r * r + p * r + q;
      const double der = 3.0 * r * r + p;
      if (der != 0.0) r -= val / der;
    }
  return roots;
}

double analysis_responder(const AnalysisObjective& obj, std::size_t coord, double frozen) {
  switch (obj.id()) {
    case AnalysisId::f1:
      return coord == 0 ? -3.0 * frozen / 7.0 : -3.0 * frozen / 8.0;
    case AnalysisId::f2:
      return coord == 0 ? -f2_a12() * frozen / f2_a11() : -f2_a12() * frozen / f2_a22();
    case AnalysisId::f3: {
      if (coord == 1) return frozen * frozen;
      // d/dx [100(x^2-y)^2 + (x-1)^2] = 0  <=>  x^3 + (0.005 - y) x - 0.005 = 0
      std::vector<double> roots = depressed_cubic_roots(0.005 - frozen, -0.005);
      double best_x = roots.front();
      double best_f = std::numeric_limits<double>::infinity();
      for (double r : roots) {
        const double t = r * r - frozen;
        const double f = 100.0 * t * t + (r - 1.0) * (r - 1.0);
        if (f < best_f) {
          best_f = f;
          best_x = r;
        }
      }
      return best_x;
    }
    case AnalysisId::f4:
      return frozen;
    case AnalysisId::chain3:
      break;
  }
  throw std::logic_error("analysis_responder: unsupported function");
}

}  // namespace

Trace trace_best_response_dynamics(const Objective& obj, const Partition& p,
                                   const std::vector<double>& x0, std::uint64_t max_cycles) {
  if (obj.dimension() != 2 || x0.size() != 2)
    throw std::invalid_argument("trace_best_response_dynamics: dimension must be 2");
  if (!is_coordinate_pair_partition(p))
    throw std::invalid_argument("trace_best_response_dynamics: coordinate partition required");

  const AnalysisObjective* known = as_analysis(obj);
  Trace t;
  std::vector<double> cur = x0;
  t.points.push_back(cur);
  t.fitness.push_back(obj.evaluate(cur));

  Partition cp = p;
  canonicalize(cp);
  for (std::uint64_t cycle = 0; cycle < max_cycles; ++cycle) {
    std::vector<double> next = cur;
    for (std::size_t coord = 0; coord < 2; ++coord) {
      if (known && known->id() != AnalysisId::chain3) {
        next[coord] = analysis_responder(*known, coord, next[1 - coord]);
      } else {
        BestResponse br = best_response(obj, cp, next, coord, 0, -10.0, 10.0,
                                        derive_seed(0x1d8e4e27c47d124full, cycle * 2 + coord));
        next[coord] = br.subvector[0];
      }
    }
    const double movement = std::max(std::fabs(next[0] - cur[0]), std::fabs(next[1] - cur[1]));
    cur = next;
    t.points.push_back(cur);
    t.fitness.push_back(obj.evaluate(cur));
    if (movement < 1e-12) {
      t.converged = true;
      break;
    }
  }
  return t;
}

std::string trace_csv(const Trace& t) {
  std::string out = "cycle,x,y,f\n";
  char buf[128];
  for (std::size_t c = 0; c < t.points.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", c, t.points[c][0], t.points[c][1],
                  t.fitness[c]);
    out += buf;
  }
  return out;
}

}  // namespace ccopt
