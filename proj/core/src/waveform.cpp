#include "nfloc/waveform.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <istream>
#include <ostream>
#include <random>

namespace nfloc {

double WaveformConfig::subcarrier_frequency(std::size_t n) const {
  return carrier + (static_cast<double>(n) - 0.5 * static_cast<double>(n_subcarriers + 1)) * spacing;
}

void WaveformConfig::validate() const {
  if (n_subcarriers < 1) throw std::invalid_argument("need at least one subcarrier");
  if (l_frames < 1) throw std::invalid_argument("need at least one frame");
  if (!(spacing > 0.0)) throw std::invalid_argument("subcarrier spacing must be positive");
  if (!(carrier > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
  if (!(tx_power > 0.0)) throw std::invalid_argument("transmit power must be positive");
  if (!(noise_psd >= 0.0)) throw std::invalid_argument("noise PSD must be non-negative");
}

FrameMatrix synthesize_frames(const Scene& scene, const ComplexVector& cascade,
                              const PspAssignment& assignment, const WaveformConfig& cfg,
                              std::uint64_t noise_seed) {
  cfg.validate();
  if (assignment.l_frames != cfg.l_frames)
    throw std::invalid_argument("assignment frame count does not match waveform config");
  const std::size_t k_tiles = scene.tile_count();
  if (static_cast<std::size_t>(cascade.size()) != k_tiles || assignment.tile_count() != k_tiles)
    throw std::invalid_argument("cascade/assignment size does not match the scene");

  const auto n_rows = static_cast<Eigen::Index>(cfg.n_subcarriers);
  const auto n_cols = static_cast<Eigen::Index>(cfg.l_frames);
  FrameMatrix out;
  out.config = cfg;
  out.s = ComplexMatrix::Zero(n_rows, n_cols);

  const double amp = cfg.tx_power / static_cast<double>(cfg.n_subcarriers);
  // f_n = f_base + n * delta, with f_base folding in the carrier and centering offset.
  const double f_base = cfg.carrier - 0.5 * static_cast<double>(cfg.n_subcarriers + 1) * cfg.spacing;

  ComplexVector along_n(n_rows);
  ComplexVector along_l(n_cols);
  for (TileIndex k = 0; k < k_tiles; ++k) {
    const double tau = toa(scene, k);
    const double carrier_cycles = std::fmod(f_base * tau, 1.0);
    const Complex weight = amp * std::conj(cascade(static_cast<Eigen::Index>(k))) *
                           std::polar(1.0, kTwoPi * carrier_cycles);
    for (Eigen::Index n = 0; n < n_rows; ++n) {
      const double cycles = std::fmod(static_cast<double>(n + 1) * cfg.spacing * tau, 1.0);
      along_n(n) = std::polar(1.0, kTwoPi * cycles);
    }
    for (Eigen::Index l = 0; l < n_cols; ++l)
      along_l(l) = std::polar(1.0, phase_shift(assignment, k, static_cast<std::size_t>(l + 1)));
    out.s.noalias() += (weight * along_n) * along_l.transpose();
  }

  if (cfg.noise_psd > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * cfg.noise_variance()));
    for (Eigen::Index n = 0; n < n_rows; ++n)
      for (Eigen::Index l = 0; l < n_cols; ++l) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        out.s(n, l) += Complex{re, im};
      }
  }
  return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  os.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bits{};
  if (!is.read(reinterpret_cast<char*>(bits.data()), sizeof(T)))
    throw std::runtime_error("truncated frame dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_frames_binary(std::ostream& os, const FrameMatrix& frames) {
  put_le(os, static_cast<std::uint32_t>(frames.s.rows()));
  put_le(os, static_cast<std::uint32_t>(frames.s.cols()));
  for (Eigen::Index n = 0; n < frames.s.rows(); ++n)
    for (Eigen::Index l = 0; l < frames.s.cols(); ++l) {
      put_le(os, static_cast<float>(frames.s(n, l).real()));
      put_le(os, static_cast<float>(frames.s(n, l).imag()));
    }
}

ComplexMatrix read_frames_binary(std::istream& is) {
  const auto rows = get_le<std::uint32_t>(is);
  const auto cols = get_le<std::uint32_t>(is);
  ComplexMatrix s(rows, cols);
  for (Eigen::Index n = 0; n < s.rows(); ++n)
    for (Eigen::Index l = 0; l < s.cols(); ++l) {
      const float re = get_le<float>(is);
      const float im = get_le<float>(is);
      s(n, l) = Complex{re, im};
    }
  return s;
}

}  // namespace nfloc
