#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ccopt/cc.hpp"
#include "ccopt/dcc.hpp"
#include "ccopt/lmcma.hpp"
#include "ccopt/objective.hpp"
#include "ccopt/partition.hpp"
#include "ccopt/rng.hpp"
#include "doctest.h"

using namespace ccopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double wall_seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_SUITE("dcc") {

TEST_CASE("resolve_config fills defaults and rejects invalid splits") {
  DccConfig cfg;
  cfg.p = 8;
  DccConfig r = resolve_config(cfg, 128);
  CHECK(r.p_es == 6);
  CHECK(r.p_cc == 2);
  CHECK(r.cycle_evals == 100 * default_lambda(128));

  cfg.p = 4;
  r = resolve_config(cfg, 16);
  CHECK(r.p_es == 3);
  CHECK(r.p_cc == 1);

  cfg = DccConfig{};
  cfg.p = 0;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 4;
  cfg.p_es = 4;
  cfg.p_cc = 1;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.k = 0;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.k = 17;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.elitist_fraction = 0.5;
  cfg.better_fraction = 0.2;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.better_fraction = 1.0;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.elitist_fraction = 0.0;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.meta_sigma_factors = {2.0, -0.5};
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 2;
  cfg.cycle_evals = 3;
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
  cfg = DccConfig{};
  cfg.p = 4;
  cfg.worker_use_weighted = {true, false};
  CHECK_THROWS_AS(resolve_config(cfg, 16), std::invalid_argument);
}

TEST_CASE("a single limited-memory worker reduces to the serial loop") {
  auto obj = make_rotated_shifted("ellipsoid", 16, 3);
  DccConfig cfg;
  cfg.p = 1;
  cfg.p_es = 1;
  cfg.p_cc = 0;
  const DccConfig rcfg = resolve_config(cfg, 16);

  MetaState meta = make_dcc_state(*obj, cfg, 7);
  REQUIRE(meta.es_workers.size() == 1);
  const double initial_mean_f = meta.best_f;
  for (int c = 0; c < 5; ++c) dcc_cycle(meta, *obj, cfg);

  Rng rng = worker_stream(7, 0);
  LmcmaState serial = make_lmcma_worker(*obj, rng, 3.0);
  std::uint64_t serial_evals = 0;
  for (int c = 0; c < 5; ++c) {
    std::uint64_t evals = 0;
    while (evals + serial.lambda() <= rcfg.cycle_evals) {
      std::uint64_t e = lmcma_step(serial, *obj, rng);
      evals += e;
      serial_evals += e;
    }
  }

  const LmcmaState& worker = meta.es_workers[0];
  CHECK(worker.mean() == serial.mean());
  CHECK(worker.sigma() == serial.sigma());
  CHECK(worker.best_fitness() == serial.best_fitness());
  CHECK(worker.best_point() == serial.best_point());
  CHECK(worker.generation() == serial.generation());
  CHECK(meta.best_f == std::min(initial_mean_f, serial.best_fitness()));
  CHECK(meta.evaluations == 1 + serial_evals);
  CHECK(meta.cycle == 5);
}

TEST_CASE("a single coevolution worker reduces to the serial cycle loop") {
  auto obj = make_rotated_shifted("schwefel12", 16, 5);
  DccConfig cfg;
  cfg.p = 1;
  cfg.p_es = 0;
  cfg.p_cc = 1;
  cfg.k = 4;
  cfg.cycle_evals = 2000;

  MetaState meta = make_dcc_state(*obj, cfg, 9);
  REQUIRE(meta.cc_workers.size() == 1);
  std::uint64_t used = 0;
  for (int c = 0; c < 5; ++c) used += dcc_cycle(meta, *obj, cfg);

  Rng rng = worker_stream(9, 0);
  Partition part = default_decompose(16, 4, rng.next_u64());
  std::vector<double> start(16);
  for (auto& v : start) v = rng.uniform(-10.0, 10.0);
  CcState serial = make_cc_state(*obj, part, start, kNaN, 3.0);
  std::uint64_t serial_used = 0;
  for (int c = 0; c < 5; ++c) serial_used += cc_cycle(serial, 2000 / 4, rng);

  CHECK(meta.cc_workers[0].context == serial.context);
  CHECK(meta.cc_workers[0].context_fitness == serial.context_fitness);
  CHECK(meta.cc_workers[0].cycle == serial.cycle);
  CHECK(used == serial_used);
  CHECK(meta.evaluations == 1 + used);
  CHECK(meta.best_f == serial.context_fitness);
}

TEST_CASE("meta_mean_update averages the better half with log-rank weights") {
  std::vector<double> m0{1.0, 2.0};
  MeanUpdate only = meta_mean_update({m0}, {5.0}, 0.05);
  CHECK(only.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(only.mean[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(only.elitists == std::vector<std::size_t>{0});

  std::vector<std::vector<double>> same(6, std::vector<double>{3.0, -1.0, 0.5});
  MeanUpdate u = meta_mean_update(same, {6, 5, 4, 3, 2, 1}, 1.0 / 20.0);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(u.mean[j] == doctest::Approx(same[0][j]).epsilon(1e-12));
  CHECK(u.elitists == std::vector<std::size_t>{5});

  // twenty workers at one twentieth keeps exactly one elitist, the best
  std::vector<std::vector<double>> means20(20, std::vector<double>{0.0});
  std::vector<double> fit20(20);
  for (std::size_t i = 0; i < 20; ++i) fit20[i] = 20.0 - static_cast<double>(i);
  MeanUpdate u20 = meta_mean_update(means20, fit20, 1.0 / 20.0);
  CHECK(u20.elitists.size() == 1);
  CHECK(u20.elitists[0] == 19);

  // the weights are the published log-rank profile over the better half
  std::vector<std::vector<double>> basis(6, std::vector<double>(6, 0.0));
  for (std::size_t i = 0; i < 6; ++i) basis[i][i] = 1.0;
  MeanUpdate ub = meta_mean_update(basis, {1, 2, 3, 4, 5, 6}, 0.4);
  std::vector<double> w = log_rank_weights(3);
  double sum = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(ub.mean[r] == doctest::Approx(w[r]).epsilon(1e-14));
    if (r > 0) CHECK(w[r] <= w[r - 1]);
    sum += w[r];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t r = 3; r < 6; ++r) CHECK(ub.mean[r] == 0.0);
  CHECK(ub.elitists == std::vector<std::size_t>{0, 1, 2});

  CHECK_THROWS_AS(meta_mean_update({}, {}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(meta_mean_update({m0}, {1.0, 2.0}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(meta_mean_update({{1.0, 2.0}, {1.0}}, {2.0, 1.0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("collective learning pools the better memories and injects directions") {
  Table1Objective sphere(BaseId::sphere, 8);
  std::vector<double> mean(8, 0.0);

  auto tagged_entry = [](std::size_t tag) {
    DirectionEntry e;
    e.path.assign(8, 0.0);
    e.path[tag % 8] = static_cast<double>(tag + 1);
    e.norm_sq = 1.0;
    e.birth = tag;
    return e;
  };

  std::vector<LmcmaState> workers;
  for (std::size_t w = 0; w < 5; ++w) {
    workers.emplace_back(mean, 3.0);
    workers.back().replace_memory({tagged_entry(w), tagged_entry(w + 8)});
  }
  std::vector<double> fitness{1.0, 2.0, 3.0, 4.0, 5.0};
  Rng rng(17);

  SUBCASE("non-elitists resample the best worker's pool") {
    collective_covariance_learning(workers, fitness, {}, 0.2, {0}, 0, rng);
    CHECK(workers[0].memory().size() == 2);
    CHECK(workers[0].memory()[0].path[0] == 1.0);
    for (std::size_t w = 1; w < 5; ++w) {
      for (const DirectionEntry& e : workers[w].memory()) {
        bool from_pool = e.path == workers[0].memory()[0].path ||
                         e.path == workers[0].memory()[1].path;
        CHECK(from_pool);
      }
      CHECK(workers[w].memory().size() == 2);
    }
  }

  SUBCASE("empty pool leaves every memory untouched") {
    workers[0].replace_memory({});
    std::vector<DirectionEntry> before = workers[3].memory();
    collective_covariance_learning(workers, fitness, {}, 0.2, {0}, 0, rng);
    REQUIRE(workers[3].memory().size() == before.size());
    CHECK(workers[3].memory()[0].path == before[0].path);
  }

  SUBCASE("injected directions are zero outside their group and unit norm") {
    Partition part = parse_partition("[[1,2,3,4],[5,6,7,8]]", 8);
    std::vector<double> start(8, 1.0);
    CcState cc = make_cc_state(sphere, part, start, kNaN, 3.0);

    collective_covariance_learning(workers, fitness, {cc}, 0.2, {0}, 2, rng);
    // the two worst non-elitists received embedded subspace directions
    for (std::size_t w : {4u, 3u}) {
      REQUIRE(workers[w].memory().size() == 2);
      for (std::size_t g = 0; g < 2; ++g) {
        const DirectionEntry& e = workers[w].memory()[g];
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < 8; ++j) {
          bool in_group = (g == 0) ? j < 4 : j >= 4;
          if (!in_group) CHECK(e.path[j] == 0.0);
          norm_sq += e.path[j] * e.path[j];
        }
        CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
    // remaining non-elitists fall back to the pool
    for (const DirectionEntry& e : workers[1].memory()) {
      bool from_pool = e.path == workers[0].memory()[0].path ||
                       e.path == workers[0].memory()[1].path;
      CHECK(from_pool);
    }
  }

  SUBCASE("fitness count mismatch is rejected") {
    std::vector<double> bad{1.0};
    CHECK_THROWS_AS(collective_covariance_learning(workers, bad, {}, 0.2, {0}, 0, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("cc_principal_directions embeds one unit vector per subspace") {
  Table1Objective sphere(BaseId::sphere, 6);
  Partition part = parse_partition("[[1,2],[3,4],[5,6]]", 6);
  std::vector<double> start(6, 0.5);
  CcState cc = make_cc_state(sphere, part, start, kNaN, 3.0);

  auto dirs = cc_principal_directions(cc, 6, 10);
  REQUIRE(dirs.size() == 3);
  for (std::size_t g = 0; g < 3; ++g) {
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      if (j / 2 != g) CHECK(dirs[g].path[j] == 0.0);
      norm_sq += dirs[g].path[j] * dirs[g].path[j];
    }
    CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(cc_principal_directions(cc, 6, 2).size() == 2);
}

TEST_CASE("meta_es_sigma brackets around the best-progress worker") {
  std::vector<double> out =
      meta_es_sigma({0.3, 1.0, 4.0, 9.0}, {0.1, 5.0, 0.3, 0.0}, {2.0, 0.5});
  CHECK(out == std::vector<double>{2.0, 0.5, 2.0, 0.5});

  CHECK(meta_es_sigma({0.7}, {1.0}, {2.0, 0.5}) == std::vector<double>{0.7});

  Rng rng(3);
  std::vector<double> sig(5), prog(5);
  for (auto& s : sig) s = std::exp(rng.uniform(-3.0, 3.0));
  for (auto& p : prog) p = rng.uniform(-1.0, 1.0);
  for (double s : meta_es_sigma(sig, prog, {2.0, 0.5})) CHECK(s > 0.0);

  CHECK_THROWS_AS(meta_es_sigma({1.0, 2.0}, {0.0}, {2.0, 0.5}), std::invalid_argument);
}

TEST_CASE("best fitness never increases across cycles") {
  for (const auto& base : base_names()) {
    auto obj = make_rotated_shifted(base, 16, 21);
    DccConfig cfg;
    cfg.p = 4;  // three full-space workers plus one decomposition worker
    cfg.cycle_evals = 240;
    MetaState meta = make_dcc_state(*obj, cfg, 31);
    double prev = meta.best_f;
    std::uint64_t prev_evals = meta.evaluations;
    for (int c = 0; c < 25; ++c) {
      dcc_cycle(meta, *obj, cfg);
      CHECK_MESSAGE(meta.best_f <= prev, base, " cycle ", c);
      CHECK(meta.evaluations > prev_evals);
      prev = meta.best_f;
      prev_evals = meta.evaluations;
    }
    CHECK(std::isfinite(meta.best_f));
  }
}

TEST_CASE("cycle evaluation accounting stays within one generation per worker") {
  auto obj = make_rotated_shifted("ellipsoid", 16, 3);
  DccConfig cfg;
  cfg.p = 4;
  const DccConfig rcfg = resolve_config(cfg, 16);
  MetaState meta = make_dcc_state(*obj, cfg, 11);
  const std::uint64_t lambda = default_lambda(16);
  for (int c = 0; c < 3; ++c) {
    std::uint64_t used = dcc_cycle(meta, *obj, cfg);
    CHECK(used <= 4 * rcfg.cycle_evals);
    CHECK(used + 4 * lambda >= 4 * rcfg.cycle_evals);
  }
}

TEST_CASE("failed workers are reinitialized from the meta mean") {
  auto obj = make_rotated_shifted("ellipsoid", 16, 3);
  DccConfig cfg;
  cfg.p = 3;
  cfg.p_es = 2;
  cfg.p_cc = 1;
  cfg.cycle_evals = 240;
  MetaState meta = make_dcc_state(*obj, cfg, 13);
  for (int c = 0; c < 2; ++c) dcc_cycle(meta, *obj, cfg);

  std::vector<double> poison = meta.es_workers[1].mean();
  poison[0] = kNaN;
  meta.es_workers[1].set_mean(poison);
  meta.cc_workers[0].context[0] = kNaN;

  dcc_cycle(meta, *obj, cfg);

  // the poisoned full-space worker restarted as a fresh state on a finite
  // mean; its sigma is then re-bracketed by the step-size meta step
  CHECK(meta.es_workers[1].finite());
  CHECK(meta.es_workers[1].generation() == 0);
  CHECK(meta.es_workers[1].sigma() > 0.0);
  // the poisoned decomposition worker restarted on the shared mean
  CHECK(meta.cc_workers[0].context_needs_eval);
  for (double v : meta.cc_workers[0].context) CHECK(std::isfinite(v));
  CHECK_FALSE(meta.cc_workers[0].fixed_point_flag);
  for (const CmaState& sub : meta.cc_workers[0].sub_states) CHECK(sub.sigma() == 3.0);
  CHECK(std::isfinite(meta.best_f));

  // the next cycle completes and repairs the restarted workers
  dcc_cycle(meta, *obj, cfg);
  CHECK(meta.es_workers[1].generation() > 0);
  CHECK_FALSE(meta.cc_workers[0].context_needs_eval);
  CHECK(std::isfinite(meta.cc_workers[0].context_fitness));
}

TEST_CASE("run_dcc honors targets, budgets and cycle caps deterministically") {
  Table1Objective sphere(BaseId::sphere, 16);
  DccConfig cfg;
  cfg.p = 2;
  cfg.p_es = 2;
  cfg.p_cc = 0;

  DccTermination term;
  term.fitness_target = 1e-10;
  term.max_evaluations = 300000;
  RunRecord rec = run_dcc(sphere, cfg, term, 41);
  CHECK(rec.status == RunStatus::target_reached);
  CHECK(rec.final_best() <= 1e-10);
  REQUIRE(rec.points.size() >= 2);
  for (std::size_t i = 1; i < rec.points.size(); ++i) {
    CHECK(rec.points[i].best_f <= rec.points[i - 1].best_f);
    CHECK(rec.points[i].evaluations > rec.points[i - 1].evaluations);
  }

  RunRecord again = run_dcc(sphere, cfg, term, 41);
  REQUIRE(again.points.size() == rec.points.size());
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    CHECK(again.points[i].best_f == rec.points[i].best_f);
    CHECK(again.points[i].evaluations == rec.points[i].evaluations);
  }
  RunRecord other = run_dcc(sphere, cfg, term, 42);
  CHECK(other.final_best() != rec.final_best());

  DccTermination none;
  none.max_evaluations = 0;
  RunRecord empty = run_dcc(sphere, cfg, none, 41);
  CHECK(empty.points.size() == 1);
  CHECK(empty.status == RunStatus::budget_exhausted);

  DccTermination capped;
  capped.fitness_target = 0.0;
  capped.max_cycles = 3;
  RunRecord three = run_dcc(sphere, cfg, capped, 41);
  CHECK(three.points.size() == 4);
  CHECK(three.status == RunStatus::budget_exhausted);
}

TEST_CASE("eight delayed workers finish well under a third of the serial wall time") {
  Table1Objective sphere(BaseId::sphere, 16);
  sphere.set_eval_delay_ms(1.0);

  DccConfig c8;
  c8.p = 8;
  c8.p_es = 8;
  c8.p_cc = 0;
  c8.cycle_evals = 200;
  MetaState m8 = make_dcc_state(sphere, c8, 1);
  double w8 = wall_seconds([&] { dcc_cycle(m8, sphere, c8); });

  DccConfig c1;
  c1.p = 1;
  c1.p_es = 1;
  c1.p_cc = 0;
  c1.cycle_evals = 1600;
  MetaState m1 = make_dcc_state(sphere, c1, 1);
  double w1 = wall_seconds([&] { dcc_cycle(m1, sphere, c1); });

  // equal workload up to per-worker generation rounding
  CHECK(m8.evaluations >= m1.evaluations - 8 * default_lambda(16));
  CHECK_MESSAGE(w8 <= 0.3 * w1, "parallel wall ", w8, " s vs serial ", w1, " s");
}

}  // TEST_SUITE
