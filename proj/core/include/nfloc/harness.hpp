#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nfloc/channel.hpp"
#include "nfloc/crb.hpp"
#include "nfloc/psp.hpp"
#include "nfloc/scene.hpp"
#include "nfloc/spectrum.hpp"
#include "nfloc/spl.hpp"
#include "nfloc/waveform.hpp"

namespace nfloc {

enum class SweepVar { k, l, b };
enum class Labeler { proposed, dft_1d };

SweepVar parse_sweep_var(const std::string& name);
std::string to_string(SweepVar v);

/// Everything a Monte Carlo run needs. Defaults are the desk-scale setup.
struct ExperimentConfig {
  RisLayout layout{16, 0.4, Vec3{5.0, 10.0, 2.0}, Vec3{1.0, 0.0, 0.0}, 4, 10};
  Vec3 p_bs{0.0, 5.0, 2.0};
  RoomBox room;
  WaveformConfig waveform{256, 1.5625e6, 28e9, 0.1, dbm_to_watts(-151.0), 8};
  std::size_t k0 = 4;
  MultipathConfig multipath;
  std::size_t oversampling = 4;
  double clock_uncertainty = 1e-6;  // T_a [s]
  double wall_clearance = 0.5;      // UE draws closer than this to the RIS wall are rejected
  ExtractOptions extract;
  SplOptions spl;
  /// Label gate in delay-resolution cells c/B; sets spl.gate per sweep point. 0 disables.
  double gate_cells = 0.1;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  SweepVar sweep_var = SweepVar::l;
  std::vector<double> sweep_values;
  std::size_t threads = 0;  // 0: RIS_NFLOC_THREADS or the hardware count

  void validate() const;
  /// Applies one sweep value (K, L or B; B is realised through N at fixed spacing).
  ExperimentConfig with(SweepVar var, double value) const;
};

/// Random quantities of one trial, all derived from the trial seed.
struct TrialDraw {
  Vec3 ue = Vec3::Zero();
  double t0 = 0.0;
  double phi0 = 0.0;
  std::uint64_t channel_seed = 0;
  std::uint64_t noise_seed = 0;
};

TrialDraw draw_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed);

/// Seed of trial `index` under the run seed.
std::uint64_t trial_seed(std::uint64_t run_seed, std::uint64_t index);

/// Signal chain up to the extracted ToA groups.
struct Observation {
  Scene scene;
  ChannelRealization channel;
  PspAssignment assignment;
  FrameMatrix frames;
  SpectrumMap spectrum;
  ToaGroups groups;
};

Observation observe(const ExperimentConfig& cfg, const TrialDraw& draw);

/// Fraction of all K paths whose label matches the true ToA ordering in its group.
double labeling_accuracy(const ToaGroups& groups, const LabelMap& labels, const Scene& scene);

struct TrialResult {
  double error = 0.0;           // metres; censored trials are charged the failed solve's best iterate
  double label_fraction = 0.0;
  double bootstrap_error = 0.0;
  bool censored = false;
  Vec3 estimate = Vec3::Zero();
  Vec3 truth = Vec3::Zero();
};

/// What the receiver knows: the observed scene with the UE position replaced by
/// the room floor centre and the clock and phase offsets zeroed.
Scene receiver_view(const ExperimentConfig& cfg, const Scene& truth);

/// cfg.spl with the room prior and the bandwidth-scaled label gate filled in.
SplOptions spl_options(const ExperimentConfig& cfg);

TrialResult evaluate(const ExperimentConfig& cfg, const Observation& obs, Labeler labeler);

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed);
TrialResult run_baseline_dft(const ExperimentConfig& cfg, std::uint64_t trial_seed);

struct TrialPair {
  TrialResult proposed;
  TrialResult baseline;
  double peb = 0.0;  // ground-constrained bound at the drawn position
};

/// Both labelers on one shared observation.
TrialPair run_trial_pair(const ExperimentConfig& cfg, std::uint64_t trial_seed);

struct SweepPoint {
  double value = 0.0;
  double rmse_proposed = 0.0;
  double rmse_baseline = 0.0;
  double rmse_proposed_uncensored = 0.0;  // censored trials left out
  double rmse_baseline_uncensored = 0.0;
  double peb = 0.0;  // root mean square over trials
  double label_acc = 0.0;
  double label_acc_baseline = 0.0;
  double censored_proposed = 0.0;  // fractions
  double censored_baseline = 0.0;
  double median_bootstrap = 0.0;
  double median_proposed = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> errors_proposed;  // trial order
  std::vector<double> errors_baseline;
};

struct MetricsTable {
  SweepVar var = SweepVar::l;
  std::vector<SweepPoint> points;
};

/// Ground-constrained PEB (x, y) for one drawn position, reference = earliest path.
double ground_peb(const ExperimentConfig& cfg, const Scene& scene, const ComplexVector& cascade);

/// Root mean square of ground_peb over cfg.trials drawn positions (no signal chain).
double peb_rms(const ExperimentConfig& cfg);

/// Runs `count` trials in parallel; slot i always holds trial i.
std::vector<TrialPair> run_trials(const ExperimentConfig& cfg, std::size_t count);

SweepPoint summarize(double value, const std::vector<TrialPair>& trials);
MetricsTable sweep(const ExperimentConfig& cfg);

std::vector<double> cdf(std::vector<double> errors);
double rmse(const std::vector<double>& errors);
double median(std::vector<double> values);

struct HeatCell {
  double x = 0.0;
  double y = 0.0;
  double rmse = 0.0;
};

/// Fixed UE grid (cell centres) with `cfg.trials` trials per cell.
std::vector<HeatCell> heatmap(const ExperimentConfig& cfg, double resolution);

struct TimingRow {
  std::string stage;
  double size = 0.0;
  double seconds = 0.0;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  double spectrum_exponent = 0.0;  // fitted against Nbar L log2(Nbar L)
  double spl_exponent = 0.0;       // fitted against K
};

TimingReport timing_benchmark(const ExperimentConfig& cfg);

/// Worker count: cfg.threads, else RIS_NFLOC_THREADS, else hardware concurrency.
std::size_t worker_count(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& os, const MetricsTable& table);
void write_cdf_csv(std::ostream& os, const std::vector<double>& sorted_errors);
void write_heatmap_csv(std::ostream& os, const std::vector<HeatCell>& cells);
void write_timing_csv(std::ostream& os, const TimingReport& report);

}  // namespace nfloc
