#include "nfloc/channel.hpp"

#include <random>
#include <stdexcept>

namespace nfloc {

namespace {

Complex direct_link(const Vec3& endpoint, const TilePose& tile, std::size_t m, double wavelength) {
  const double d_center = (endpoint - tile.center).norm();
  if (d_center <= 0.0) throw std::invalid_argument("endpoint coincides with tile center");
  const double d_elem = (endpoint - tile.element_positions.at(m)).norm();
  const double magnitude = wavelength / (4.0 * kPi * d_center);
  return std::polar(magnitude, -kTwoPi / wavelength * d_elem);
}

}  // namespace

Complex forward_direct(const Scene& scene, double wavelength, TileIndex k, std::size_t m) {
  return direct_link(scene.p_bs, scene.tiles.at(k), m, wavelength);
}

Complex backward_direct(const Scene& scene, double wavelength, TileIndex k, std::size_t m) {
  return direct_link(scene.p_ue, scene.tiles.at(k), m, wavelength) * std::polar(1.0, scene.phi0);
}

ChannelRealization realize_channel(const Scene& scene, double wavelength, const MultipathConfig& mp) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (scene.tiles.empty()) throw std::invalid_argument("scene has no tiles");
  if (mp.j_paths > 0 && !(mp.excess_min_m > 0.0 && mp.excess_max_m >= mp.excess_min_m))
    throw std::invalid_argument("multipath excess delays must be strictly positive");

  const std::size_t k_tiles = scene.tiles.size();
  const std::size_t m_elems = scene.tiles.front().element_count();
  for (const auto& t : scene.tiles)
    if (t.element_count() != m_elems) throw std::invalid_argument("tiles differ in element count");

  ChannelRealization ch;
  ch.forward.resize(static_cast<Eigen::Index>(k_tiles), static_cast<Eigen::Index>(m_elems));
  ch.backward.resizeLike(ch.forward);
  ch.cascade.resize(static_cast<Eigen::Index>(k_tiles));

  std::mt19937_64 rng(mp.seed);
  std::uniform_real_distribution<double> excess(mp.excess_min_m, mp.excess_max_m);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double rel_amp = std::sqrt(db_to_linear(mp.relative_power_db));
  const double wavenumber = kTwoPi / wavelength;

  struct Ray {
    Complex eps;
    double excess;
  };
  auto draw_rays = [&](double direct_gain) {
    std::vector<Ray> rays(mp.j_paths);
    const double sigma = direct_gain * rel_amp / std::sqrt(2.0);
    for (auto& r : rays) {
      r.excess = excess(rng);
      const double re = gauss(rng);
      const double im = gauss(rng);
      r.eps = mp.zero_amplitude ? Complex{} : Complex{sigma * re, sigma * im};
    }
    return rays;
  };

  for (std::size_t k = 0; k < k_tiles; ++k) {
    const auto& tile = scene.tiles[k];
    const double g_fwd = wavelength / (4.0 * kPi * (scene.p_bs - tile.center).norm());
    const double g_bwd = wavelength / (4.0 * kPi * (scene.p_ue - tile.center).norm());
    const auto fwd_rays = draw_rays(g_fwd);
    const auto bwd_rays = draw_rays(g_bwd);
    const Complex phase_offset = std::polar(1.0, scene.phi0);

    Complex c{};
    for (std::size_t m = 0; m < m_elems; ++m) {
      const double d_bs = (scene.p_bs - tile.element_positions[m]).norm();
      const double d_ue = (scene.p_ue - tile.element_positions[m]).norm();
      Complex a = forward_direct(scene, wavelength, k, m);
      for (const auto& r : fwd_rays) a += r.eps * std::polar(1.0, -wavenumber * (d_bs + r.excess));
      Complex b = backward_direct(scene, wavelength, k, m);
      for (const auto& r : bwd_rays)
        b += r.eps * std::polar(1.0, -wavenumber * (d_ue + r.excess)) * phase_offset;
      ch.forward(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = a;
      ch.backward(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = b;
      c += a * b;
    }
    ch.cascade(static_cast<Eigen::Index>(k)) = c;
  }
  return ch;
}

Complex tile_gain(const ChannelRealization& ch, const Scene& scene, TileIndex k, Complex omega) {
  if (k >= scene.tiles.size()) throw std::out_of_range("tile index out of range");
  return omega * ch.cascade(static_cast<Eigen::Index>(k));
}

}  // namespace nfloc
