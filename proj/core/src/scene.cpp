#include "nfloc/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace nfloc {

std::vector<Vec3> Scene::tile_centers() const {
  std::vector<Vec3> out;
  out.reserve(tiles.size());
  for (const auto& t : tiles) out.push_back(t.center);
  return out;
}

std::vector<Vec3> tile_centers(const RisLayout& layout) {
  if (layout.k < 1) throw std::invalid_argument("RIS layout needs at least one tile");
  if (std::abs(layout.axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("RIS axis must be a unit vector");
  if (!(layout.tile_spacing > 0.0) && layout.k > 1)
    throw std::invalid_argument("tile spacing must be positive");

  std::vector<Vec3> centers;
  centers.reserve(layout.k);
  const double mid = 0.5 * static_cast<double>(layout.k - 1);
  for (std::size_t i = 0; i < layout.k; ++i) {
    const double offset = (static_cast<double>(i) - mid) * layout.tile_spacing;
    centers.push_back(layout.center + offset * layout.axis);
  }
  return centers;
}

namespace {

// In-plane second axis for the element grid: vertical unless the RIS axis is
// itself vertical.
Vec3 grid_secondary_axis(const Vec3& axis) {
  Vec3 up{0.0, 0.0, 1.0};
  Vec3 w = up - axis.dot(up) * axis;
  if (w.norm() < 1e-9) {
    Vec3 alt{0.0, 1.0, 0.0};
    w = alt - axis.dot(alt) * axis;
  }
  return w.normalized();
}

}  // namespace

Scene build_scene(const RisLayout& layout, const Vec3& p_bs, const Vec3& p_ue, double t0,
                  double phi0, double wavelength) {
  if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
  if (std::abs(p_ue.z()) > 1e-12) throw std::invalid_argument("UE must lie on the ground (z = 0)");
  if (layout.m_x < 1 || layout.m_z < 1) throw std::invalid_argument("element grid must be non-empty");

  const auto centers = tile_centers(layout);
  const Vec3 ex = layout.axis;
  const Vec3 ez = grid_secondary_axis(layout.axis);
  const double half = 0.5 * wavelength;
  const double mid_x = 0.5 * static_cast<double>(layout.m_x - 1);
  const double mid_z = 0.5 * static_cast<double>(layout.m_z - 1);

  Scene scene;
  scene.p_bs = p_bs;
  scene.p_ue = p_ue;
  scene.t0 = t0;
  scene.phi0 = phi0;
  scene.tiles.reserve(centers.size());
  for (const auto& c : centers) {
    TilePose tile;
    tile.center = c;
    tile.m_x = layout.m_x;
    tile.m_z = layout.m_z;
    tile.element_positions.reserve(layout.m_x * layout.m_z);
    for (std::size_t ix = 0; ix < layout.m_x; ++ix) {
      for (std::size_t iz = 0; iz < layout.m_z; ++iz) {
        const double dx = (static_cast<double>(ix) - mid_x) * half;
        const double dz = (static_cast<double>(iz) - mid_z) * half;
        tile.element_positions.push_back(c + dx * ex + dz * ez);
      }
    }
    scene.tiles.push_back(std::move(tile));
  }
  return scene;
}

Scene scene_from_points(const std::vector<Vec3>& centers, const Vec3& p_bs, const Vec3& p_ue,
                        double t0, double phi0) {
  if (centers.empty()) throw std::invalid_argument("scene needs at least one tile");
  Scene scene;
  scene.p_bs = p_bs;
  scene.p_ue = p_ue;
  scene.t0 = t0;
  scene.phi0 = phi0;
  for (const auto& c : centers) {
    TilePose tile;
    tile.center = c;
    tile.element_positions = {c};
    scene.tiles.push_back(std::move(tile));
  }
  return scene;
}

double path_delay(const Vec3& p_bs, const Vec3& tile, const Vec3& p_ue) {
  return ((p_bs - tile).norm() + (p_ue - tile).norm()) / kSpeedOfLight;
}

double toa(const Scene& scene, TileIndex k) {
  if (k >= scene.tiles.size()) throw std::out_of_range("tile index out of range");
  return path_delay(scene.p_bs, scene.tiles[k].center, scene.p_ue) + scene.t0;
}

std::vector<double> all_toas(const Scene& scene) {
  std::vector<double> out(scene.tiles.size());
  for (TileIndex k = 0; k < out.size(); ++k) out[k] = toa(scene, k);
  return out;
}

}  // namespace nfloc
