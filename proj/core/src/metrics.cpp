#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "nfloc/harness.hpp"

namespace nfloc {

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) return 0.0;
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> cdf(std::vector<double> errors) {
  std::sort(errors.begin(), errors.end());
  return errors;
}

SweepPoint summarize(double value, const std::vector<TrialPair>& trials) {
  SweepPoint p;
  p.value = value;
  std::vector<double> kept_proposed, kept_baseline, bootstrap, pebs;
  double acc = 0.0, acc_base = 0.0;
  std::size_t cens = 0, cens_base = 0;
  for (const auto& t : trials) {
    p.errors_proposed.push_back(t.proposed.error);
    p.errors_baseline.push_back(t.baseline.error);
    if (!t.proposed.censored) kept_proposed.push_back(t.proposed.error);
    if (!t.baseline.censored) kept_baseline.push_back(t.baseline.error);
    cens += t.proposed.censored ? 1 : 0;
    cens_base += t.baseline.censored ? 1 : 0;
    acc += t.proposed.label_fraction;
    acc_base += t.baseline.label_fraction;
    bootstrap.push_back(t.proposed.bootstrap_error);
    pebs.push_back(t.peb);
  }
  const auto n = static_cast<double>(std::max<std::size_t>(trials.size(), 1));
  p.rmse_proposed = rmse(p.errors_proposed);
  p.rmse_baseline = rmse(p.errors_baseline);
  p.rmse_proposed_uncensored = rmse(kept_proposed);
  p.rmse_baseline_uncensored = rmse(kept_baseline);
  p.peb = rmse(pebs);
  p.label_acc = acc / n;
  p.label_acc_baseline = acc_base / n;
  p.censored_proposed = static_cast<double>(cens) / n;
  p.censored_baseline = static_cast<double>(cens_base) / n;
  p.median_bootstrap = median(bootstrap);
  p.median_proposed = median(p.errors_proposed);
  return p;
}

void write_sweep_csv(std::ostream& os, const MetricsTable& table) {
  os << "sweep_value,rmse_proposed,rmse_baseline,peb,label_acc\n";
  for (const auto& p : table.points)
    os << p.value << ',' << p.rmse_proposed << ',' << p.rmse_baseline << ',' << p.peb << ','
       << p.label_acc << '\n';
}

void write_cdf_csv(std::ostream& os, const std::vector<double>& sorted_errors) {
  os << "error_m,cum_prob\n";
  const auto n = static_cast<double>(sorted_errors.size());
  for (std::size_t i = 0; i < sorted_errors.size(); ++i)
    os << sorted_errors[i] << ',' << static_cast<double>(i + 1) / n << '\n';
}

void write_heatmap_csv(std::ostream& os, const std::vector<HeatCell>& cells) {
  os << "x,y,rmse\n";
  for (const auto& c : cells) os << c.x << ',' << c.y << ',' << c.rmse << '\n';
}

void write_timing_csv(std::ostream& os, const TimingReport& report) {
  os << "stage,size,seconds\n";
  for (const auto& r : report.rows) os << r.stage << ',' << r.size << ',' << r.seconds << '\n';
}

}  // namespace nfloc
