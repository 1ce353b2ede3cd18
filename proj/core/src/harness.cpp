#include "nfloc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <Eigen/Geometry>

#include "parallel.hpp"

namespace nfloc {

SweepVar parse_sweep_var(const std::string& name) {
  if (name == "K" || name == "k") return SweepVar::k;
  if (name == "L" || name == "l") return SweepVar::l;
  if (name == "B" || name == "b") return SweepVar::b;
  throw std::invalid_argument("unknown sweep variable '" + name + "' (expected K, L or B)");
}

std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::k: return "K";
    case SweepVar::l: return "L";
    case SweepVar::b: return "B";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  waveform.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (oversampling < 1) throw std::invalid_argument("oversampling must be >= 1");
  if (layout.k < 1) throw std::invalid_argument("need at least one tile");
  if (!(clock_uncertainty >= 0.0)) throw std::invalid_argument("clock uncertainty must be >= 0");
  if (!(gate_cells >= 0.0)) throw std::invalid_argument("gate must be >= 0 cells");
  if (!(wall_clearance >= 0.0)) throw std::invalid_argument("wall clearance must be >= 0");
  for (double v : sweep_values)
    if (!(v > 0.0)) throw std::invalid_argument("sweep values must be positive");
  if ((room.hi - room.lo).minCoeff() <= 0.0) throw std::invalid_argument("empty room");
}

ExperimentConfig ExperimentConfig::with(SweepVar var, double value) const {
  if (!(value > 0.0)) throw std::invalid_argument("sweep values must be positive");
  ExperimentConfig out = *this;
  const auto count = static_cast<std::size_t>(std::llround(value));
  switch (var) {
    case SweepVar::k:
      out.layout.k = count;
      break;
    case SweepVar::l:
      out.waveform.l_frames = count;
      break;
    case SweepVar::b:
      out.waveform.n_subcarriers = static_cast<std::size_t>(std::llround(value / waveform.spacing));
      if (out.waveform.n_subcarriers < 1) throw std::invalid_argument("bandwidth below one subcarrier");
      break;
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t run_seed, std::uint64_t index) {
  // splitmix64 over the pair
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(run_seed ^ mix(index));
}

TrialDraw draw_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(cfg.room.lo.x(), cfg.room.hi.x());
  std::uniform_real_distribution<double> uy(cfg.room.lo.y(), cfg.room.hi.y());
  const Vec3 wall_normal = cfg.layout.axis.cross(Vec3::UnitZ()).normalized();

  TrialDraw d;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 10000) throw std::invalid_argument("wall clearance leaves no room for the UE");
    d.ue = {ux(rng), uy(rng), 0.0};
    if (std::abs((d.ue - cfg.layout.center).dot(wall_normal)) >= cfg.wall_clearance) break;
  }
  d.t0 = std::uniform_real_distribution<double>(0.0, cfg.clock_uncertainty)(rng);
  d.phi0 = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  d.channel_seed = rng();
  d.noise_seed = rng();
  return d;
}

Observation observe(const ExperimentConfig& cfg, const TrialDraw& draw) {
  Observation o;
  const double lambda = cfg.waveform.wavelength();
  o.scene = build_scene(cfg.layout, cfg.p_bs, draw.ue, draw.t0, draw.phi0, lambda);
  MultipathConfig mp = cfg.multipath;
  mp.seed = draw.channel_seed;
  o.channel = realize_channel(o.scene, lambda, mp);
  o.assignment = assign(cfg.layout.k, cfg.waveform.l_frames, cfg.k0);
  o.frames = synthesize_frames(o.scene, o.channel.cascade, o.assignment, cfg.waveform, draw.noise_seed);
  o.spectrum = spectrum_2d(o.frames, cfg.oversampling);
  o.groups = extract_toas(o.spectrum, o.assignment, cfg.extract);
  return o;
}

double labeling_accuracy(const ToaGroups& groups, const LabelMap& labels, const Scene& scene) {
  const auto truth_toas = all_toas(scene);
  std::size_t correct = 0;
  for (const auto& g : groups.groups) {
    std::vector<TileIndex> truth = g.tiles;
    std::stable_sort(truth.begin(), truth.end(),
                     [&](TileIndex a, TileIndex b) { return truth_toas[a] > truth_toas[b]; });
    for (std::size_t j = 0; j < g.toas.size() && j < truth.size(); ++j)
      for (const auto& e : labels.entries)
        if (e.toa == g.toas[j] && std::find(g.tiles.begin(), g.tiles.end(), e.tile) != g.tiles.end()) {
          if (e.tile == truth[j]) ++correct;
          break;
        }
  }
  return scene.tile_count() == 0 ? 0.0
                                 : static_cast<double>(correct) / static_cast<double>(scene.tile_count());
}

Scene receiver_view(const ExperimentConfig& cfg, const Scene& truth) {
  Scene known = truth;
  known.p_ue = cfg.room.floor_center();
  known.t0 = 0.0;
  known.phi0 = 0.0;
  return known;
}

SplOptions spl_options(const ExperimentConfig& cfg) {
  SplOptions spl = cfg.spl;
  spl.solve.room = cfg.room;
  if (cfg.gate_cells > 0.0) spl.gate = cfg.gate_cells * kSpeedOfLight / cfg.waveform.bandwidth();
  return spl;
}

TrialResult evaluate(const ExperimentConfig& cfg, const Observation& obs, Labeler labeler) {
  const Scene known = receiver_view(cfg, obs.scene);
  const SplOptions spl = spl_options(cfg);

  TrialResult r;
  r.truth = obs.scene.p_ue;
  try {
    const SplResult s = labeler == Labeler::proposed ? run_spl(obs.groups, known, spl)
                                                     : run_fixed_order(obs.groups, known, spl.solve);
    r.estimate = s.position;
    r.bootstrap_error = (s.bootstrap - r.truth).norm();
    r.label_fraction = labeling_accuracy(obs.groups, s.labels, obs.scene);
  } catch (const EstimationError& e) {
    // charged at the failed solve's best iterate (the room center when no fix exists)
    r.censored = true;
    r.estimate = e.best_iterate();
    r.bootstrap_error = (r.estimate - r.truth).norm();
  }
  r.error = (r.estimate - r.truth).norm();
  return r;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  return evaluate(cfg, observe(cfg, draw_trial(cfg, seed)), Labeler::proposed);
}

TrialResult run_baseline_dft(const ExperimentConfig& cfg, std::uint64_t seed) {
  return evaluate(cfg, observe(cfg, draw_trial(cfg, seed)), Labeler::dft_1d);
}

double ground_peb(const ExperimentConfig& cfg, const Scene& scene, const ComplexVector& cascade) {
  if (cfg.waveform.noise_psd == 0.0) return 0.0;
  if (scene.tile_count() < 2) return std::numeric_limits<double>::infinity();
  const auto toas = all_toas(scene);
  const auto k_ref = static_cast<TileIndex>(std::min_element(toas.begin(), toas.end()) - toas.begin());
  const auto snrs = path_snrs(cascade, cfg.waveform.tx_power, cfg.waveform.noise_psd, cfg.waveform.l_frames);
  return fim(scene, snrs, cfg.waveform.bandwidth(), k_ref).peb_ground;
}

double peb_rms(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> pebs(cfg.trials);
  const double lambda = cfg.waveform.wavelength();
  detail::parallel_for(cfg.trials, worker_count(cfg), [&](std::size_t i) {
    const TrialDraw d = draw_trial(cfg, trial_seed(cfg.seed, i));
    const Scene s = build_scene(cfg.layout, cfg.p_bs, d.ue, d.t0, d.phi0, lambda);
    MultipathConfig mp = cfg.multipath;
    mp.seed = d.channel_seed;
    pebs[i] = ground_peb(cfg, s, realize_channel(s, lambda, mp).cascade);
  });
  return rmse(pebs);
}

TrialPair run_trial_pair(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Observation obs = observe(cfg, draw_trial(cfg, seed));
  TrialPair p;
  p.proposed = evaluate(cfg, obs, Labeler::proposed);
  p.baseline = evaluate(cfg, obs, Labeler::dft_1d);
  p.peb = ground_peb(cfg, obs.scene, obs.channel.cascade);
  return p;
}

std::size_t worker_count(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("RIS_NFLOC_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrialPair> run_trials(const ExperimentConfig& cfg, std::size_t count) {
  cfg.validate();
  std::vector<TrialPair> out(count);
  detail::parallel_for(count, worker_count(cfg),
                       [&](std::size_t i) { out[i] = run_trial_pair(cfg, trial_seed(cfg.seed, i)); });
  return out;
}

MetricsTable sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep_values.empty()) throw std::invalid_argument("sweep needs at least one value");
  MetricsTable table;
  table.var = cfg.sweep_var;
  for (double v : cfg.sweep_values) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig point = cfg.with(cfg.sweep_var, v);
    SweepPoint row = summarize(v, run_trials(point, point.trials));
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    table.points.push_back(std::move(row));
  }
  return table;
}

std::vector<HeatCell> heatmap(const ExperimentConfig& cfg, double resolution) {
  cfg.validate();
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  const auto nx = static_cast<std::size_t>(std::ceil((cfg.room.hi.x() - cfg.room.lo.x()) / resolution - 1e-9));
  const auto ny = static_cast<std::size_t>(std::ceil((cfg.room.hi.y() - cfg.room.lo.y()) / resolution - 1e-9));
  std::vector<HeatCell> cells(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      auto& c = cells[iy * nx + ix];
      c.x = std::min(cfg.room.lo.x() + (static_cast<double>(ix) + 0.5) * resolution, cfg.room.hi.x());
      c.y = std::min(cfg.room.lo.y() + (static_cast<double>(iy) + 0.5) * resolution, cfg.room.hi.y());
    }

  const std::size_t jobs = cells.size() * cfg.trials;
  std::vector<double> errors(jobs);
  detail::parallel_for(jobs, worker_count(cfg), [&](std::size_t j) {
    TrialDraw d = draw_trial(cfg, trial_seed(cfg.seed, j));
    const auto& cell = cells[j / cfg.trials];
    d.ue = {cell.x, cell.y, 0.0};
    errors[j] = evaluate(cfg, observe(cfg, d), Labeler::proposed).error;
  });
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto first = errors.begin() + static_cast<std::ptrdiff_t>(c * cfg.trials);
    cells[c].rmse = rmse({first, first + static_cast<std::ptrdiff_t>(cfg.trials)});
  }
  return cells;
}

}  // namespace nfloc
