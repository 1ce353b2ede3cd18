#include <chrono>
#include <cmath>

#include "nfloc/harness.hpp"

namespace nfloc {

namespace {

// Best-of-three average per call, each batch lasting at least ~20 ms.
template <typename Fn>
double time_per_call(Fn&& fn) {
  using clock = std::chrono::steady_clock;
  fn();
  std::size_t reps = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < reps; ++i) fn();
    if (std::chrono::duration<double>(clock::now() - t0).count() >= 0.02 || reps >= (1u << 20)) break;
    reps *= 2;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int batch = 0; batch < 3; ++batch) {
    const auto t0 = clock::now();
    for (std::size_t i = 0; i < reps; ++i) fn();
    best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count() / static_cast<double>(reps));
  }
  return best;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TimingReport timing_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  TimingReport report;
  const TrialDraw draw = draw_trial(cfg, trial_seed(cfg.seed, 0));

  std::vector<double> model, seconds;
  for (std::size_t n : {64u, 128u, 256u, 512u, 1024u}) {
    ExperimentConfig c = cfg;
    c.waveform.n_subcarriers = n;
    const Observation obs = observe(c, draw);
    const double t = time_per_call([&] { (void)spectrum_2d(obs.frames, c.oversampling); });
    const double size = static_cast<double>(obs.spectrum.n_bar * obs.spectrum.columns());
    report.rows.push_back({"spectrum", size, t});
    model.push_back(size * std::log2(size));
    seconds.push_back(t);
  }
  report.spectrum_exponent = log_slope(model, seconds);

  std::vector<double> ks, spl_seconds;
  for (std::size_t k : {8u, 16u, 32u, 64u}) {
    ExperimentConfig c = cfg;
    c.layout.k = k;
    c.waveform.l_frames = std::max(k / 2, c.k0 + 2);
    const Observation obs = observe(c, draw);
    const Scene known = receiver_view(c, obs.scene);
    const SplOptions spl = spl_options(c);
    const double t = time_per_call([&] {
      try {
        (void)run_spl(obs.groups, known, spl);
      } catch (const EstimationError&) {
      }
    });
    report.rows.push_back({"spl", static_cast<double>(k), t});
    ks.push_back(static_cast<double>(k));
    spl_seconds.push_back(t);
  }
  report.spl_exponent = log_slope(ks, spl_seconds);
  return report;
}

}  // namespace nfloc
