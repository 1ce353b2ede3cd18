#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "nfloc/selftest.hpp"

namespace nfloc::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const RunContext& ctx, const std::string& name) {
  const fs::path path = fs::path(ctx.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << std::setprecision(10);
  return os;
}

void report_point(std::ostream& log, const std::string& label, const SweepPoint& p) {
  log << label << "  rmse " << p.rmse_proposed << " m (baseline " << p.rmse_baseline << ")"
      << "  uncensored " << p.rmse_proposed_uncensored << " (" << p.rmse_baseline_uncensored << ")"
      << "  censored " << p.censored_proposed << " (" << p.censored_baseline << ")"
      << "  peb " << p.peb << "  label acc " << p.label_acc << " (" << p.label_acc_baseline << ")\n";
}

}  // namespace

int cmd_simulate(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.config.experiment;
  const auto trials = run_trials(cfg, cfg.trials);

  auto os = open_csv(ctx, "trials.csv");
  os << "trial,x_true,y_true,x_est,y_est,error_m,baseline_error_m,label_acc,censored,peb_m\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    os << i << ',' << t.proposed.truth.x() << ',' << t.proposed.truth.y() << ',' << t.proposed.estimate.x() << ','
       << t.proposed.estimate.y() << ',' << t.proposed.error << ',' << t.baseline.error << ','
       << t.proposed.label_fraction << ',' << (t.proposed.censored ? 1 : 0) << ',' << t.peb << '\n';
  }

  // labeling trace of the first trial
  const Observation obs = observe(cfg, draw_trial(cfg, trial_seed(cfg.seed, 0)));
  auto trace = open_csv(ctx, "trace.csv");
  try {
    write_trace_csv(trace, run_spl(obs.groups, receiver_view(cfg, obs.scene), spl_options(cfg)).trace);
  } catch (const EstimationError&) {
    write_trace_csv(trace, {});
  }

  report_point(*ctx.log, "simulate", summarize(0.0, trials));
  return ok;
}

int cmd_sweep(const RunContext& ctx) {
  const MetricsTable table = sweep(ctx.config.experiment);
  auto os = open_csv(ctx, "sweep.csv");
  write_sweep_csv(os, table);
  for (const auto& p : table.points) {
    std::ostringstream label;
    label << to_string(table.var) << "=" << p.value;
    report_point(*ctx.log, label.str(), p);
  }
  return ok;
}

int cmd_heatmap(const RunContext& ctx) {
  const auto cells = heatmap(ctx.config.experiment, ctx.config.heatmap_resolution_m);
  auto os = open_csv(ctx, "heatmap.csv");
  write_heatmap_csv(os, cells);
  std::vector<double> values;
  for (const auto& c : cells) values.push_back(c.rmse);
  *ctx.log << "heatmap  " << cells.size() << " cells, median cell rmse " << median(values) << " m\n";
  return ok;
}

int cmd_cdf(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.config.experiment;
  const SweepPoint p = summarize(0.0, run_trials(cfg, cfg.trials));
  auto os = open_csv(ctx, "cdf.csv");
  write_cdf_csv(os, cdf(p.errors_proposed));
  auto base = open_csv(ctx, "cdf_baseline.csv");
  write_cdf_csv(base, cdf(p.errors_baseline));
  report_point(*ctx.log, "cdf", p);
  return ok;
}

int cmd_peb(const RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.config.experiment;
  auto os = open_csv(ctx, "peb.csv");
  os << "sweep_value,peb\n";
  for (double v : cfg.sweep_values) {
    const double peb = peb_rms(cfg.with(cfg.sweep_var, v));
    os << v << ',' << peb << '\n';
    *ctx.log << to_string(cfg.sweep_var) << "=" << v << "  peb " << peb << " m\n";
  }
  *ctx.log << "base configuration (B = " << cfg.waveform.bandwidth() << " Hz)  peb " << peb_rms(cfg) << " m\n";
  return ok;
}

int cmd_bench(const RunContext& ctx) {
  const TimingReport report = timing_benchmark(ctx.config.experiment);
  auto os = open_csv(ctx, "timing.csv");
  write_timing_csv(os, report);
  *ctx.log << "spectrum exponent vs Nbar*L*log2(Nbar*L): " << report.spectrum_exponent << "\n"
           << "spl exponent vs K: " << report.spl_exponent << "\n";
  return ok;
}

int cmd_selftest(const RunContext& ctx) {
  bool all = true;
  for (const auto& c : run_selftest(ctx.config.experiment.seed)) {
    *ctx.log << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    all = all && c.passed;
  }
  return all ? ok : pipeline_failure;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Near-field UE localization with RIS tiles and 2D signal path classification", "ris-nfloc"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (created if missing)");

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--seed", "experiment.seed", "run seed"},
      {"--trials", "experiment.trials", "Monte Carlo trials (per sweep point / heatmap cell)"},
      {"--threads", "experiment.threads", "worker threads (0: RIS_NFLOC_THREADS or all cores)"},
      {"--var", "experiment.sweep_var", "sweep variable: K, L or B"},
      {"--values", "experiment.sweep_values", "comma-separated sweep values"},
      {"--resolution-m", "experiment.heatmap_resolution_m", "heatmap grid resolution"},
      {"--bandwidth-hz", "waveform.bandwidth_hz", "bandwidth; sets the subcarrier count at fixed spacing"},
      {"--noise-dbm", "waveform.noise_dbm", "noise level N0 in dBm, or 'off'"},
      {"--tiles", "scene.tiles", "number of RIS tiles K"},
      {"--frames", "psp.frames", "number of frames L"},
  };
  std::vector<std::string> values(std::size(flags));
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < std::size(flags); ++i)
    options.push_back(app.add_option(flags[i].name, values[i], flags[i].help));
  app.add_option("--set", sets, "override any config key: section.key=value (repeatable)");

  using Handler = int (*)(const RunContext&);
  const std::pair<const char*, Handler> commands[] = {
      {"simulate", cmd_simulate}, {"sweep", cmd_sweep}, {"heatmap", cmd_heatmap}, {"cdf", cmd_cdf},
      {"peb", cmd_peb},           {"bench", cmd_bench}, {"selftest", cmd_selftest},
  };
  const char* descriptions[] = {
      "Monte Carlo trials at one configuration (trials.csv, trace.csv)",
      "RMSE / PEB / labeling accuracy over a K, L or B sweep (sweep.csv)",
      "RMSE over a fixed UE grid (heatmap.csv)",
      "error distribution of proposed and baseline (cdf.csv, cdf_baseline.csv)",
      "position error bound over the sweep values (peb.csv)",
      "stage timings and fitted growth exponents (timing.csv)",
      "randomized property checks",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->fallthrough();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return config_error;
  }

  for (std::size_t i = 0; i < std::size(flags); ++i)
    if (options[i]->count() > 0) overrides[flags[i].key] = values[i];
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --set expects section.key=value, got '" << s << "'\n";
      return config_error;
    }
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }

  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.log = &out;
  boost::property_tree::ptree tree;
  try {
    tree = load_tree(config_path, overrides);
    ctx.config = from_tree(tree);
    fs::create_directories(out_dir);
    write_tree((fs::path(out_dir) / "config.ini").string(), tree);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return commands[i].second(ctx);
    } catch (const std::exception& e) {
      err << commands[i].first << " failed: " << e.what() << "\n";
      return pipeline_failure;
    }
  }
  return config_error;
}

}  // namespace nfloc::cli
