#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccopt/bench.hpp"
#include "ccopt/game.hpp"
#include "ccopt/objective.hpp"
#include "ccopt/partition.hpp"
#include "ccopt/run_record.hpp"

namespace {

constexpr int kUsageError = 2;

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw std::invalid_argument("bad number: " + item);
  }
  if (out.empty()) throw std::invalid_argument("empty point");
  return out;
}

std::shared_ptr<ccopt::Objective> objective_by_name(const std::string& id, std::size_t dim) {
  const auto& analysis = ccopt::analysis_function_names();
  if (std::find(analysis.begin(), analysis.end(), id) != analysis.end())
    return ccopt::make_analysis_function(id);
  return std::make_shared<ccopt::Table1Objective>(ccopt::base_from_name(id), dim);
}

int cmd_run(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "cannot open config file: " << config_path << "\n";
    return kUsageError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  ccopt::ExperimentConfig cfg = ccopt::config_from_json(buf.str());
  std::vector<ccopt::RunRecord> records = ccopt::run_experiment(cfg);
  std::cout << ccopt::summary_csv(ccopt::summarize(records, cfg.fitness_target));
  return 0;
}

int cmd_trace(const std::string& function, const std::string& start, std::uint64_t cycles,
              const std::string& output) {
  auto obj = objective_by_name(function, 2);
  std::vector<double> x0 = parse_point(start);
  if (x0.size() != 2) throw std::invalid_argument("--start must have two coordinates");
  ccopt::Partition p{2, {{0}, {1}}};
  ccopt::Trace t = ccopt::trace_best_response_dynamics(*obj, p, x0, cycles);
  const std::string csv = ccopt::trace_csv(t);
  if (output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(output);
    if (!out) throw std::invalid_argument("cannot write " + output);
    out << csv;
  }
  return 0;
}

int cmd_pne(const std::string& function, const std::string& point_text,
            const std::string& partition_text, double tolerance) {
  std::vector<double> point = parse_point(point_text);
  ccopt::Partition part;
  if (partition_text.empty()) {
    part.n = point.size();
    for (std::size_t i = 0; i < point.size(); ++i) part.groups.push_back({static_cast<int>(i)});
  } else {
    part = ccopt::parse_partition(partition_text, point.size());
  }
  auto obj = objective_by_name(function, point.size());
  if (obj->dimension() != point.size())
    throw std::invalid_argument("point dimension does not match the function");
  ccopt::PneCertificate cert = ccopt::verify_pne(*obj, part, point, tolerance);
  std::printf("function=%s\n", function.c_str());
  std::printf("partition=%s\n", ccopt::format_partition(cert.partition).c_str());
  std::printf("is_pne=%s\n", cert.is_pne ? "true" : "false");
  std::printf("is_strict=%s\n", cert.is_strict ? "true" : "false");
  for (std::size_t i = 0; i < cert.per_group_gap.size(); ++i)
    std::printf("group_%zu_gap=%.17g\n", i, cert.per_group_gap[i]);
  return 0;
}

int cmd_summarize(const std::vector<std::string>& files, double target) {
  std::vector<ccopt::RunRecord> records;
  for (const std::string& f : files) records.push_back(ccopt::read_csv_file(f));
  std::cout << ccopt::summary_csv(ccopt::summarize(records, target));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "JSON experiment config")->required();

  std::string trace_fn = "f1", trace_start = "5,5", trace_out;
  std::uint64_t trace_cycles = 10000;
  auto* trace = app.add_subcommand("trace", "best-response dynamics of a 2-d function");
  trace->add_option("--function", trace_fn, "objective id");
  trace->add_option("--start", trace_start, "comma-separated start point")->required();
  trace->add_option("--cycles", trace_cycles, "cycle cap");
  trace->add_option("--output", trace_out, "CSV output file (default stdout)");

  std::string pne_fn, pne_point, pne_partition;
  double pne_tol = 1e-10;
  auto* pne = app.add_subcommand("pne", "verify a pure Nash equilibrium candidate");
  pne->add_option("--function", pne_fn, "objective id")->required();
  pne->add_option("--point", pne_point, "comma-separated point")->required();
  pne->add_option("--partition", pne_partition, "1-based partition literal, e.g. [[1],[2]]");
  pne->add_option("--tolerance", pne_tol, "certification tolerance");

  std::vector<std::string> summarize_files;
  double summarize_target = 1e-10;
  auto* summarize = app.add_subcommand("summarize", "aggregate run CSVs");
  summarize->add_option("files", summarize_files, "RunRecord CSV files")->required();
  summarize->add_option("--target", summarize_target, "fitness target for evals-to-target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kUsageError;
  }

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path);
    if (app.got_subcommand(trace)) return cmd_trace(trace_fn, trace_start, trace_cycles, trace_out);
    if (app.got_subcommand(pne)) return cmd_pne(pne_fn, pne_point, pne_partition, pne_tol);
    if (app.got_subcommand(summarize)) return cmd_summarize(summarize_files, summarize_target);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
