#include <doctest.h>

#include <limits>
#include <sstream>

#include "nfloc/harness.hpp"

using namespace nfloc;

namespace {

ExperimentConfig desk(std::size_t l_frames, std::size_t trials) {
  ExperimentConfig cfg;
  cfg.waveform.l_frames = l_frames;
  cfg.trials = trials;
  cfg.seed = 1;
  return cfg;
}

std::vector<double> errors(const std::vector<TrialPair>& t, bool baseline) {
  std::vector<double> e;
  for (const auto& p : t) e.push_back(baseline ? p.baseline.error : p.proposed.error);
  return e;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("sweep variable names") {
    CHECK(parse_sweep_var("K") == SweepVar::k);
    CHECK(parse_sweep_var("l") == SweepVar::l);
    CHECK(parse_sweep_var("B") == SweepVar::b);
    CHECK(to_string(SweepVar::b) == "B");
    CHECK_THROWS_AS(parse_sweep_var("N"), std::invalid_argument);
  }

  TEST_CASE("sweep values map onto the configuration") {
    const ExperimentConfig cfg = desk(8, 1);
    CHECK(cfg.with(SweepVar::b, 5e7).waveform.n_subcarriers == 32);
    CHECK(cfg.with(SweepVar::b, 5e7).waveform.bandwidth() == doctest::Approx(5e7));
    CHECK(cfg.with(SweepVar::k, 32).layout.k == 32);
    CHECK(cfg.with(SweepVar::l, 16).waveform.l_frames == 16);
    CHECK_THROWS_AS(cfg.with(SweepVar::l, 0), std::invalid_argument);
    ExperimentConfig bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.gate_cells = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("summary statistics") {
    CHECK(rmse({3.0, 3.0, 3.0}) == doctest::Approx(3.0));
    CHECK(rmse({3.0, 4.0}) == doctest::Approx(std::sqrt(12.5)));
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    const auto c = cdf({2.0, 0.5, 1.0});
    CHECK(c == std::vector<double>{0.5, 1.0, 2.0});
    std::ostringstream os;
    write_cdf_csv(os, c);
    CHECK(os.str().rfind("error_m,cum_prob\n", 0) == 0);
    CHECK(os.str().find("2,1\n") != std::string::npos);
  }

  TEST_CASE("trial draws stay in the room and off the RIS wall") {
    const ExperimentConfig cfg = desk(8, 1);
    for (std::uint64_t i = 0; i < 500; ++i) {
      const TrialDraw d = draw_trial(cfg, trial_seed(cfg.seed, i));
      CHECK(cfg.room.contains(d.ue));
      CHECK(d.ue.z() == 0.0);
      CHECK(cfg.room.hi.y() - d.ue.y() >= cfg.wall_clearance);
      CHECK(std::abs(d.t0) <= cfg.clock_uncertainty);
    }
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  }

  TEST_CASE("runs are reproducible and independent of the worker count") {
    ExperimentConfig one = desk(8, 24);
    one.threads = 1;
    ExperimentConfig three = one;
    three.threads = 3;
    const auto a = run_trials(one, one.trials);
    const auto b = run_trials(one, one.trials);
    const auto c = run_trials(three, three.trials);
    CHECK(errors(a, false) == errors(b, false));
    CHECK(errors(a, true) == errors(b, true));
    CHECK(errors(a, false) == errors(c, false));
  }

  TEST_CASE("with a profile per tile the two labelers coincide") {
    const auto t = run_trials(desk(16, 40), 40);
    for (const auto& p : t) CHECK(p.proposed.error == p.baseline.error);
  }

  TEST_CASE("noiseless chain: resolvable groups are labeled and located exactly") {
    ExperimentConfig cfg = desk(8, 1);
    cfg.waveform.noise_psd = 0.0;
    cfg.multipath.j_paths = 0;
    const double cell = 1.0 / cfg.waveform.bandwidth();
    int resolvable = 0;
    for (std::uint64_t i = 0; i < 120; ++i) {
      const Observation obs = observe(cfg, draw_trial(cfg, trial_seed(cfg.seed, i)));
      const auto toas = all_toas(obs.scene);
      double closest = std::numeric_limits<double>::infinity();
      for (const auto& g : obs.groups.groups)
        for (TileIndex a : g.tiles)
          for (TileIndex b : g.tiles)
            if (a < b) closest = std::min(closest, std::abs(toas[a] - toas[b]));
      if (closest < cell) continue;  // same profile and under one cell apart: not separable
      ++resolvable;
      const TrialResult r = evaluate(cfg, obs, Labeler::proposed);
      CHECK(r.label_fraction == doctest::Approx(1.0));
      CHECK(r.error < 1e-3);
      CHECK_FALSE(r.censored);
    }
    CHECK(resolvable > 30);
  }

  TEST_CASE("proposed labeling beats the fixed-order baseline with shared profiles") {
    const SweepPoint p = summarize(8, run_trials(desk(8, 200), 200));
    CHECK(p.rmse_proposed < p.rmse_baseline);
    CHECK(p.median_proposed < median(p.errors_baseline));
    CHECK(p.label_acc > p.label_acc_baseline);
    CHECK(p.errors_proposed.size() == 200);
  }

  TEST_CASE("more frames, lower error") {
    ExperimentConfig cfg = desk(8, 100);
    cfg.sweep_var = SweepVar::l;
    cfg.sweep_values = {8, 16};
    const MetricsTable t = sweep(cfg);
    REQUIRE(t.points.size() == 2);
    CHECK(t.points[1].rmse_proposed < t.points[0].rmse_proposed);
    std::ostringstream os;
    write_sweep_csv(os, t);
    CHECK(os.str().rfind("sweep_value,rmse_proposed,rmse_baseline,peb,label_acc", 0) == 0);
  }

  TEST_CASE("heatmap covers the floor on the requested grid") {
    ExperimentConfig cfg = desk(8, 1);
    const auto cells = heatmap(cfg, 1.0);
    REQUIRE(cells.size() == 100);
    CHECK(cells.front().x == doctest::Approx(0.5));
    CHECK(cells.front().y == doctest::Approx(0.5));
    CHECK(cells.back().x == doctest::Approx(9.5));
    CHECK(cells.back().y == doctest::Approx(9.5));
    for (const auto& c : cells) CHECK(c.rmse >= 0.0);
    CHECK_THROWS_AS(heatmap(cfg, 0.0), std::invalid_argument);
  }
}
