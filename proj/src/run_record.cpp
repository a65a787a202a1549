#include "ccopt/run_record.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ccopt {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::target_reached: return "target_reached";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::fixed_point: return "fixed_point";
  }
  return "unknown";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "target_reached") return RunStatus::target_reached;
  if (s == "budget_exhausted") return RunStatus::budget_exhausted;
  if (s == "fixed_point") return RunStatus::fixed_point;
  throw std::invalid_argument("unknown run status '" + s + "'");
}

double RunRecord::final_best() const {
  return points.empty() ? std::numeric_limits<double>::infinity() : points.back().best_f;
}

std::uint64_t RunRecord::evaluations_to(double target) const {
  for (const auto& p : points)
    if (p.best_f <= target) return p.evaluations;
  return 0;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// std::stod rejects subnormals as out-of-range; strtod returns them
double parse_double(const std::string& cell) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') throw std::invalid_argument("bad numeric cell: " + cell);
  return v;
}

}  // namespace

std::string emit_csv(const RunRecord& r) {
  std::ostringstream os;
  os << "# fingerprint=" << r.fingerprint << "\n";
  os << "# function=" << r.function_id << "\n";
  os << "# algorithm=" << r.algorithm << "\n";
  os << "# seed=" << r.seed << "\n";
  os << "# status=" << to_string(r.status) << "\n";
  os << "cycle,evaluations,best_f,wall_ms\n";
  for (const auto& p : r.points)
    os << p.cycle << "," << p.evaluations << "," << fmt_double(p.best_f) << ","
       << fmt_double(p.wall_ms) << "\n";
  return os.str();
}

RunRecord parse_csv(const std::string& text) {
  RunRecord r;
  std::istringstream is(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("bad metadata line: " + line);
      std::string key = line.substr(2, eq - 2);
      std::string val = line.substr(eq + 1);
      if (key == "fingerprint") r.fingerprint = std::stoull(val);
      else if (key == "function") r.function_id = val;
      else if (key == "algorithm") r.algorithm = val;
      else if (key == "seed") r.seed = std::stoull(val);
      else if (key == "status") r.status = run_status_from_string(val);
      else throw std::invalid_argument("unknown metadata key: " + key);
      continue;
    }
    if (!saw_header) {
      if (line != "cycle,evaluations,best_f,wall_ms")
        throw std::invalid_argument("unexpected CSV header: " + line);
      saw_header = true;
      continue;
    }
    RunPoint p;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    p.cycle = std::stoull(cell);
    std::getline(ls, cell, ',');
    p.evaluations = std::stoull(cell);
    std::getline(ls, cell, ',');
    p.best_f = parse_double(cell);
    std::getline(ls, cell, ',');
    p.wall_ms = parse_double(cell);
    r.points.push_back(p);
  }
  if (!saw_header) throw std::invalid_argument("missing CSV header");
  return r;
}

void write_csv_file(const RunRecord& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << emit_csv(r);
}

RunRecord read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str());
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ccopt
