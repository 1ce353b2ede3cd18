#pragma once

#include <cstdint>
#include <iosfwd>

#include "nfloc/channel.hpp"
#include "nfloc/psp.hpp"

namespace nfloc {

struct WaveformConfig {
  std::size_t n_subcarriers = 256;
  double spacing = 1.5625e6;  // delta [Hz]
  double carrier = 28e9;      // f_c [Hz]
  double tx_power = 0.1;      // P [W]
  double noise_psd = 0.0;     // N0 [W]; per-cell noise variance is P * N0 / N
  std::size_t l_frames = 8;

  double bandwidth() const { return static_cast<double>(n_subcarriers) * spacing; }
  double frame_duration() const { return 1.0 / spacing; }
  double wavelength() const { return kSpeedOfLight / carrier; }
  /// f_n for the 1-based subcarrier index n.
  double subcarrier_frequency(std::size_t n) const;
  double noise_variance() const { return tx_power * noise_psd / static_cast<double>(n_subcarriers); }
  void validate() const;
};

/// Demodulated symbols s_n(l), N rows (subcarriers) by L columns (frames).
/// Row/column 0 correspond to n = 1 and l = 1.
struct FrameMatrix {
  ComplexMatrix s;
  WaveformConfig config;
};

/// Closed-form demodulator output for every (subcarrier, frame) cell plus
/// i.i.d. circular Gaussian noise of variance P*N0/N. `noise_psd == 0`
/// disables the noise draw entirely.
FrameMatrix synthesize_frames(const Scene& scene, const ComplexVector& cascade,
                              const PspAssignment& assignment, const WaveformConfig& cfg,
                              std::uint64_t noise_seed);

/// Little-endian dump: uint32 N, uint32 L, then N*L (float re, float im) pairs row-major.
void write_frames_binary(std::ostream& os, const FrameMatrix& frames);
ComplexMatrix read_frames_binary(std::istream& is);

}  // namespace nfloc
