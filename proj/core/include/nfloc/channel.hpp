#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "nfloc/scene.hpp"

namespace nfloc {

/// Statistical multipath added on top of each per-element link.
///
/// For every tile and every link direction, `j_paths` extra rays are drawn with
/// excess length d_j ~ U[excess_min_m, excess_max_m] and amplitude
/// eps_j ~ CN(0, g^2 * 10^(relative_power_db/10)), where g is that tile's
/// direct-path attenuation on the same link.
struct MultipathConfig {
  std::size_t j_paths = 3;
  double relative_power_db = -15.0;
  double excess_min_m = 0.5;
  double excess_max_m = 5.0;
  std::uint64_t seed = 0;
  bool zero_amplitude = false;  // keep the draws but force eps_j = 0
};

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

struct ChannelRealization {
  ComplexMatrix forward;   // K x M, BS -> element
  ComplexMatrix backward;  // K x M, element -> UE
  ComplexVector cascade;   // K, c_k = b_k^T a_k
};

Complex forward_direct(const Scene& scene, double wavelength, TileIndex k, std::size_t m);
Complex backward_direct(const Scene& scene, double wavelength, TileIndex k, std::size_t m);

/// Direct plus multipath channels and the per-tile cascade gain. All tiles must
/// carry the same number of elements.
ChannelRealization realize_channel(const Scene& scene, double wavelength, const MultipathConfig& mp);

/// omega * c_k: every element of a tile shares one reflection coefficient.
Complex tile_gain(const ChannelRealization& ch, const Scene& scene, TileIndex k, Complex omega);

}  // namespace nfloc
