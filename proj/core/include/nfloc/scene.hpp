#pragma once

#include <vector>

#include "nfloc/types.hpp"

namespace nfloc {

/// One RIS tile: its center and the element grid it carries.
struct TilePose {
  Vec3 center = Vec3::Zero();
  std::vector<Vec3> element_positions;
  std::size_t m_x = 1;
  std::size_t m_z = 1;
  int gamma = 1;  // reflection on/off, in {0, 1}

  std::size_t element_count() const { return element_positions.size(); }
};

/// Linear RIS: `k` tiles on a line through `center`, `tile_spacing` apart along `axis`.
struct RisLayout {
  std::size_t k = 64;
  double tile_spacing = 0.1;
  Vec3 center{5.0, 10.0, 2.0};
  Vec3 axis{1.0, 0.0, 0.0};
  std::size_t m_x = 4;
  std::size_t m_z = 10;
};

struct Scene {
  Vec3 p_bs = Vec3::Zero();
  Vec3 p_ue = Vec3::Zero();
  std::vector<TilePose> tiles;
  double t0 = 0.0;    // BS-UE clock offset [s]
  double phi0 = 0.0;  // carrier phase offset [rad]

  std::size_t tile_count() const { return tiles.size(); }
  const Vec3& tile_center(TileIndex k) const { return tiles.at(k).center; }
  std::vector<Vec3> tile_centers() const;
};

/// Tile centers only, symmetric about `layout.center`. Throws on K < 1 or a non-unit axis.
std::vector<Vec3> tile_centers(const RisLayout& layout);

/// Builds a scene from a linear RIS layout. Element grids are half-wavelength
/// rectangular arrays spanned by the RIS axis and the vertical; for a wall
/// along x at constant y this is the x-z plane facing the room.
Scene build_scene(const RisLayout& layout, const Vec3& p_bs, const Vec3& p_ue, double t0,
                  double phi0, double wavelength);

/// Scene from arbitrary tile centers (single-element tiles). Used by solvers
/// and tests that do not need a linear layout.
Scene scene_from_points(const std::vector<Vec3>& tile_centers, const Vec3& p_bs,
                        const Vec3& p_ue, double t0 = 0.0, double phi0 = 0.0);

/// BS -> tile k -> UE time of arrival including the clock offset.
double toa(const Scene& scene, TileIndex k);

/// Same, for an arbitrary UE position (clock offset excluded).
double path_delay(const Vec3& p_bs, const Vec3& tile, const Vec3& p_ue);

std::vector<double> all_toas(const Scene& scene);

}  // namespace nfloc
