#include "nfloc/spectrum.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <tuple>

#include <fftw3.h>

namespace nfloc {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is. Plans are
// cached per shape and executed through the new-array interface.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan forward_2d(int rows, int cols) { return get(rows, cols, FFTW_FORWARD); }
  /// 1D transform of length n (cols == 0 marks the 1D key).
  fftw_plan transform_1d(int n, int sign) { return get(n, 0, sign); }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  fftw_plan get(int rows, int cols, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const auto count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(std::max(cols, 1));
    auto* in = fftw_alloc_complex(count);
    auto* out = fftw_alloc_complex(count);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = cols > 0 ? fftw_plan_dft_2d(rows, cols, in, out, sign, flags)
                              : fftw_plan_dft_1d(rows, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// exp(-j 2 pi num / den) with the integer product reduced first.
Complex twiddle(std::size_t num, std::size_t den) {
  const double frac = static_cast<double>(num % den) / static_cast<double>(den);
  return std::polar(1.0, -kTwoPi * frac);
}

SpectrumMap make_map(const FrameMatrix& frames, std::size_t oversampling) {
  if (oversampling < 1) throw std::invalid_argument("oversampling factor must be >= 1");
  SpectrumMap map;
  map.oversampling = oversampling;
  map.cfg = frames.config;
  map.n_bar = oversampling * static_cast<std::size_t>(frames.s.rows());
  map.grid.resize(static_cast<Eigen::Index>(map.n_bar), frames.s.cols());
  return map;
}

SpectrumMap spectrum_fast(const FrameMatrix& frames, std::size_t oversampling) {
  SpectrumMap map = make_map(frames, oversampling);
  const auto n = static_cast<std::size_t>(frames.s.rows());
  const auto l = static_cast<std::size_t>(frames.s.cols());
  const std::size_t n_bar = map.n_bar;

  ComplexMatrix padded = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_bar), static_cast<Eigen::Index>(l));
  padded.topRows(static_cast<Eigen::Index>(n)) = frames.s;

  fftw_plan plan = PlanCache::instance().forward_2d(static_cast<int>(n_bar), static_cast<int>(l));
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(padded.data()),
                   reinterpret_cast<fftw_complex*>(map.grid.data()));

  // The transform is indexed from n = 1 and l = 1; FFTW starts at 0.
  std::vector<Complex> col_shift(l);
  for (std::size_t v = 0; v < l; ++v) col_shift[v] = twiddle(v, l);
  for (std::size_t u = 0; u < n_bar; ++u) {
    const Complex row_shift = twiddle(u, n_bar);
    for (std::size_t v = 0; v < l; ++v)
      map.grid(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) *= row_shift * col_shift[v];
  }
  return map;
}

SpectrumMap spectrum_dense(const FrameMatrix& frames, std::size_t oversampling) {
  SpectrumMap map = make_map(frames, oversampling);
  const auto n = static_cast<std::size_t>(frames.s.rows());
  const auto l = static_cast<std::size_t>(frames.s.cols());
  const std::size_t n_bar = map.n_bar;

  // Frame axis first: partial[n][v] = sum_l s_n(l) exp(-j 2 pi l v / L).
  ComplexMatrix partial = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l));
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t v = 0; v < l; ++v) {
      Complex acc{};
      for (std::size_t col = 0; col < l; ++col)
        acc += frames.s(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) * twiddle((col + 1) * v, l);
      partial(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(v)) = acc;
    }
  for (std::size_t u = 0; u < n_bar; ++u)
    for (std::size_t v = 0; v < l; ++v) {
      Complex acc{};
      for (std::size_t row = 0; row < n; ++row)
        acc += partial(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(v)) * twiddle((row + 1) * u, n_bar);
      map.grid(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = acc;
    }
  return map;
}

// Descending ToA order, carrying the per-peak metadata along.
void sort_descending(ToaGroup& g) {
  std::vector<std::size_t> order(g.toas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g.toas[a] > g.toas[b]; });
  ToaGroup sorted = g;
  for (std::size_t j = 0; j < order.size(); ++j) {
    sorted.toas[j] = g.toas[order[j]];
    sorted.magnitudes[j] = g.magnitudes[order[j]];
    sorted.u_bins[j] = g.u_bins[order[j]];
  }
  g = std::move(sorted);
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

// One column back in the subcarrier domain: y[n-1] for n = 1..N.
std::vector<Complex> column_subcarriers(const SpectrumMap& map, std::size_t v) {
  const auto rows = static_cast<int>(map.n_bar);
  std::vector<Complex> col(map.n_bar), x(map.n_bar);
  for (std::size_t u = 0; u < map.n_bar; ++u)
    col[u] = map.grid(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v));
  fftw_execute_dft(PlanCache::instance().transform_1d(rows, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(col.data()), reinterpret_cast<fftw_complex*>(x.data()));
  const std::size_t n = map.cfg.n_subcarriers;
  std::vector<Complex> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[(i + 1) % map.n_bar] / static_cast<double>(rows);
  return y;
}

// Y(x) = sum_n y[n-1] exp(-j 2 pi n x), x in cycles per subcarrier.
Complex dtft(const std::vector<Complex>& y, double x) {
  const Complex w = std::polar(1.0, -kTwoPi * x);
  Complex z = w, acc = 0.0;
  for (const Complex& yn : y) {
    acc += yn * z;
    z *= w;
  }
  return acc;
}

// Off-grid maximum of |Y(x)| within one bin either side of `center` (golden section).
double refine_peak(const std::vector<Complex>& y, double center, double bin) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = center - bin, hi = center + bin;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = std::abs(dtft(y, a)), fb = std::abs(dtft(y, b));
  for (int it = 0; it < 40; ++it) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = std::abs(dtft(y, a));
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = std::abs(dtft(y, b));
    }
  }
  return 0.5 * (lo + hi);
}

// y += sign * amp * exp(j 2 pi n x), n = 1..N
void add_tone(std::vector<Complex>& y, Complex amp, double x, double sign) {
  const Complex w = std::polar(1.0, kTwoPi * x);
  Complex z = w;
  for (auto& yn : y) {
    yn += sign * amp * z;
    z *= w;
  }
}

struct Tone {
  double x = 0.0;  // cycles per subcarrier
  Complex amp;
};

void successive_column(const SpectrumMap& map, ToaGroup& g, const ExtractOptions& options) {
  const std::size_t rows = map.n_bar;
  std::vector<double> mag(rows);
  std::vector<Complex> y = column_subcarriers(map, g.v_bin);
  const auto n = static_cast<double>(y.size());
  std::vector<Complex> padded(rows), spec(rows);
  const fftw_plan forward = PlanCache::instance().transform_1d(static_cast<int>(rows), FFTW_FORWARD);
  const double bin = 1.0 / static_cast<double>(rows);
  double strongest = 0.0;

  std::vector<Tone> tones;
  // Each tone against the column with every other tone removed, cyclically.
  auto refit = [&] {
    for (std::size_t sweep = 0; sweep < options.refit_sweeps && tones.size() > 1; ++sweep) {
      double moved = 0.0;
      for (auto& t : tones) {
        add_tone(y, t.amp, t.x, 1.0);
        const double x = refine_peak(y, t.x, bin);
        moved = std::max(moved, std::abs(x - t.x));
        t = {x, dtft(y, x) / n};
        add_tone(y, t.amp, t.x, -1.0);
      }
      if (moved < 1e-6 * bin) break;
    }
  };

  for (std::size_t j = 0; j < g.tiles.size(); ++j) {
    std::fill(padded.begin(), padded.end(), Complex{});
    for (std::size_t i = 0; i < y.size(); ++i) padded[(i + 1) % rows] += y[i];
    fftw_execute_dft(forward, reinterpret_cast<fftw_complex*>(padded.data()),
                     reinterpret_cast<fftw_complex*>(spec.data()));
    std::size_t best = 0;
    for (std::size_t u = 0; u < rows; ++u) {
      mag[u] = std::abs(spec[u]);
      if (mag[u] > mag[best]) best = u;
    }
    // floor from the residual: sidelobes of paths already removed do not raise it
    const double noise_floor = options.noise_threshold * median_of(mag);

    const double x = refine_peak(y, static_cast<double>(best) * bin, bin);
    const Complex peak = dtft(y, x);
    const double height = std::abs(peak);
    strongest = std::max(strongest, height);
    if (height <= 0.0 || height < noise_floor || height < options.relative_floor * strongest) break;
    tones.push_back({x, peak / n});
    add_tone(y, tones.back().amp, x, -1.0);
    // settle the tones found so far before looking for the next one, so the
    // bias they impose on each other is not mistaken for another path
    refit();
  }

  for (const auto& t : tones) {
    const double x = t.x - std::floor(t.x);
    g.toas.push_back(x * map.period_seconds());
    g.magnitudes.push_back(std::abs(t.amp) * n);
    g.u_bins.push_back(static_cast<std::size_t>(std::llround(x * static_cast<double>(rows))) % rows);
  }
  if (g.toas.size() < g.tiles.size()) g.under_detected = true;
}

}  // namespace

SpectrumMap spectrum_2d(const FrameMatrix& frames, std::size_t oversampling, SpectrumMethod method) {
  if (frames.s.size() == 0) throw std::invalid_argument("empty frame matrix");
  return method == SpectrumMethod::fast ? spectrum_fast(frames, oversampling)
                                        : spectrum_dense(frames, oversampling);
}

const ToaGroup* ToaGroups::find(PspIndex i) const {
  for (const auto& g : groups)
    if (g.psp == i) return &g;
  return nullptr;
}

std::vector<std::size_t> column_peaks(const SpectrumMap& map, std::size_t v, double threshold) {
  const auto rows = static_cast<std::size_t>(map.grid.rows());
  if (v >= map.columns()) throw std::out_of_range("spectrum column out of range");
  std::vector<double> mag(rows);
  for (std::size_t u = 0; u < rows; ++u)
    mag[u] = std::abs(map.grid(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)));

  std::vector<std::size_t> peaks;
  if (rows < 3) return peaks;
  for (std::size_t u = 0; u < rows; ++u) {
    const double left = mag[(u + rows - 1) % rows];
    const double right = mag[(u + 1) % rows];
    if (mag[u] > left && mag[u] >= right && mag[u] >= threshold && mag[u] > 0.0) peaks.push_back(u);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  return peaks;
}

double quadratic_refine(const SpectrumMap& map, std::size_t u, std::size_t v) {
  const auto rows = static_cast<std::size_t>(map.grid.rows());
  if (u >= rows || v >= map.columns()) throw std::out_of_range("spectrum bin out of range");
  auto mag = [&](std::size_t row) {
    return std::abs(map.grid(static_cast<Eigen::Index>(row % rows), static_cast<Eigen::Index>(v)));
  };
  const double a = mag(u + rows - 1);
  const double b = mag(u);
  const double c = mag(u + 1);
  const double curvature = a - 2.0 * b + c;
  double offset = 0.0;
  if (curvature < 0.0) offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
  else if (a != c) offset = a > c ? -0.5 : 0.5;  // monotone: clamp toward the larger side
  return (static_cast<double>(u) + offset) * map.bin_seconds();
}

void unwrap_toas(ToaGroups& groups, double period) {
  std::vector<double> all;
  for (const auto& g : groups.groups) all.insert(all.end(), g.toas.begin(), g.toas.end());
  if (all.size() < 2) return;
  std::sort(all.begin(), all.end());

  double widest = all.front() + period - all.back();  // gap across the wrap point
  double cut = -1.0;                                  // values <= cut get +period
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    const double gap = all[i + 1] - all[i];
    if (gap > widest) {
      widest = gap;
      cut = all[i];
    }
  }
  if (cut < 0.0) return;
  for (auto& g : groups.groups) {
    for (auto& t : g.toas)
      if (t <= cut) t += period;
    sort_descending(g);
  }
}

ToaGroups extract_toas(const SpectrumMap& map, const PspAssignment& assignment,
                       const ExtractOptions& options) {
  const std::size_t l = assignment.l_frames;
  if (map.columns() != l) throw std::invalid_argument("spectrum and assignment disagree on L");
  const auto rows = static_cast<std::size_t>(map.grid.rows());

  ToaGroups out;
  for (const auto& [psp, tiles] : assignment.groups) {
    ToaGroup g;
    g.psp = psp;
    g.tiles = tiles;
    // round(L * i / L) = i, folded into [0, L).
    g.v_bin = psp % l;

    if (options.method == ExtractMethod::successive) {
      successive_column(map, g, options);
    } else {
      std::vector<double> mag(rows);
      double col_max = 0.0;
      for (std::size_t u = 0; u < rows; ++u) {
        mag[u] = std::abs(map.grid(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(g.v_bin)));
        col_max = std::max(col_max, mag[u]);
      }
      const double threshold =
          std::max(options.noise_threshold * median_of(mag), options.relative_floor * col_max);
      auto peaks = column_peaks(map, g.v_bin, threshold);
      if (peaks.size() < tiles.size()) g.under_detected = true;
      peaks.resize(std::min(peaks.size(), tiles.size()));

      for (std::size_t u : peaks) {
        const double tau = options.refine ? quadratic_refine(map, u, g.v_bin)
                                          : static_cast<double>(u) * map.bin_seconds();
        g.toas.push_back(tau);
        g.magnitudes.push_back(mag[u]);
        g.u_bins.push_back(u);
      }
    }
    sort_descending(g);
    out.groups.push_back(std::move(g));
  }
  if (options.unwrap) unwrap_toas(out, map.period_seconds());
  return out;
}

void write_spectrum_csv(std::ostream& os, const SpectrumMap& map) {
  os << "u,v,magnitude\n";
  for (Eigen::Index u = 0; u < map.grid.rows(); ++u)
    for (Eigen::Index v = 0; v < map.grid.cols(); ++v) os << u << ',' << v << ',' << std::abs(map.grid(u, v)) << '\n';
}

}  // namespace nfloc
