#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "nfloc/psp.hpp"
#include "nfloc/waveform.hpp"

namespace nfloc {

/// Joint delay / phase-profile spectrum
///   S[u, v] = sum_l sum_n s_n(l) exp(-j 2 pi n u / Nbar) exp(-j 2 pi l v / L)
/// with n = 1..N, l = 1..L, u = 0..Nbar-1, v = 0..L-1 and Nbar = Qc * N
/// (zero padding along the subcarrier axis).
struct SpectrumMap {
  ComplexMatrix grid;  // Nbar x L
  std::size_t oversampling = 1;
  std::size_t n_bar = 0;
  WaveformConfig cfg;

  std::size_t columns() const { return static_cast<std::size_t>(grid.cols()); }
  /// Width of one delay bin in seconds: 1 / (Nbar * delta).
  double bin_seconds() const { return 1.0 / (static_cast<double>(n_bar) * cfg.spacing); }
  /// Unambiguous delay window 1 / delta.
  double period_seconds() const { return 1.0 / cfg.spacing; }
};

enum class SpectrumMethod { fast, dense };

/// Builds the map with FFTW (`fast`) or with the separable direct sum
/// (`dense`). Both agree to ~1e-9 relative.
SpectrumMap spectrum_2d(const FrameMatrix& frames, std::size_t oversampling,
                        SpectrumMethod method = SpectrumMethod::fast);

struct ToaGroup {
  PspIndex psp = 0;
  std::size_t v_bin = 0;
  std::vector<TileIndex> tiles;   // candidate labels, in tile order
  std::vector<double> toas;       // descending
  std::vector<double> magnitudes; // |S| at each detected peak, same order as toas
  std::vector<std::size_t> u_bins;
  bool under_detected = false;

  std::size_t dod() const { return tiles.size(); }
};

struct ToaGroups {
  std::vector<ToaGroup> groups;  // ascending PSP index

  const ToaGroup* find(PspIndex i) const;
};

enum class ExtractMethod {
  /// Strongest local maxima of |S[., v]|.
  peaks,
  /// Successive cancellation: take the strongest peak, fit its delay off-grid,
  /// subtract that path's response from the column, repeat. Sidelobes of a
  /// strong path are removed with it instead of being picked as paths.
  successive,
};

struct ExtractOptions {
  ExtractMethod method = ExtractMethod::successive;
  /// Peaks must reach this multiple of the column's median magnitude.
  double noise_threshold = 6.0;
  /// Peaks must also reach this fraction of the column's strongest peak.
  double relative_floor = 0.0;
  /// Three-point parabolic interpolation around each peak (peaks method only;
  /// successive cancellation always fits the delay off-grid).
  bool refine = false;
  /// Successive cancellation only: passes of re-fitting each component with the
  /// others subtracted. Removes the bias two close paths impose on each other.
  std::size_t refit_sweeps = 32;
  /// Remove the 1/delta wrap so all ToAs sit on one contiguous arc.
  bool unwrap = true;
};

/// Per-PSP path extraction. For PSP alpha(i) the column is v(i) = round(L alpha(i)) mod L,
/// and up to |L(i)| admitted components give the group's ToAs. A group with
/// fewer admitted components than tiles is flagged under-detected.
ToaGroups extract_toas(const SpectrumMap& map, const PspAssignment& assignment,
                       const ExtractOptions& options = {});

/// Local maxima of |S[., v]| above `threshold`, strongest first (ties to smaller u).
/// A bin is a maximum when it beats its left neighbor strictly and its right
/// neighbor or ties it; the column is treated as circular.
std::vector<std::size_t> column_peaks(const SpectrumMap& map, std::size_t v, double threshold);

/// Fractional-bin delay from a parabola through |S[u-1..u+1, v]| (circular),
/// clamped to +-0.5 bin. A neighborhood that is not a strict maximum returns
/// the bin center.
double quadratic_refine(const SpectrumMap& map, std::size_t u, std::size_t v);

/// Shifts ToAs (mod 1/delta) so that the largest circular gap falls at the wrap point.
void unwrap_toas(ToaGroups& groups, double period);

/// CSV dump of the magnitude surface: u,v,magnitude
void write_spectrum_csv(std::ostream& os, const SpectrumMap& map);

}  // namespace nfloc
