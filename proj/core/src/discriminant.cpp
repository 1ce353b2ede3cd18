#include "nfloc/spl.hpp"

namespace nfloc {

double Discriminant::quadric(const Vec3& p) const {
  const double x = local_x(p);
  const double rho2 = std::max((p - center).squaredNorm() - x * x, 0.0);
  const double ux = semi_axes.x();
  const double uy = semi_axes.y();
  return x * x / (ux * ux) - rho2 / (uy * uy) - 1.0;
}

Discriminant build_discriminant(const Scene& scene, TileIndex k1, TileIndex k2) {
  if (k1 == k2) throw std::invalid_argument("discriminant needs two distinct tiles");
  const Vec3& a = scene.tile_center(k1);
  const Vec3& b = scene.tile_center(k2);
  const Vec3 ris_axis = scene.tiles.back().center - scene.tiles.front().center;
  if (ris_axis.dot(b - a) < 0.0) std::swap(k1, k2);

  Discriminant d;
  d.k1 = k1;
  d.k2 = k2;
  const Vec3& p1 = scene.tile_center(k1);
  const Vec3& p2 = scene.tile_center(k2);
  d.center = 0.5 * (p1 + p2);
  d.axis = (p2 - p1).normalized();

  const double ux = 0.5 * ((scene.p_bs - p1).norm() - (scene.p_bs - p2).norm());
  const double half_gap = 0.5 * (p2 - p1).norm();
  const double uy2 = half_gap * half_gap - ux * ux;
  const double uy = uy2 > 0.0 ? std::sqrt(uy2) : 0.0;
  d.semi_axes = {ux, uy, uy};
  d.degenerate = ux == 0.0 || uy == 0.0;
  return d;
}

bool in_region(const Vec3& p, const Vec3& p_bs, const Vec3& p_k1, const Vec3& p_k2) {
  return (p - p_k1).norm() - (p - p_k2).norm() >= (p_bs - p_k2).norm() - (p_bs - p_k1).norm();
}

bool explicit_region(const Discriminant& disc, const Vec3& p) {
  const double f = disc.quadric(p);
  const double x = disc.local_x(p);
  // BS nearer k1: the region is the inside of the branch around k2.
  if (disc.semi_axes.x() < 0.0) return f >= 0.0 && x >= 0.0;
  // BS nearer k2: everything except the inside of the branch around k1.
  return !(f > 0.0 && x < 0.0);
}

std::pair<TileIndex, TileIndex> label_pair(std::pair<double, double> toas,
                                           std::pair<TileIndex, TileIndex> tiles,
                                           const Vec3& p_estimate, const Scene& scene) {
  if (toas.first < toas.second) throw std::invalid_argument("label_pair expects descending ToAs");
  const auto [k1, k2] = tiles;
  if (in_region(p_estimate, scene.p_bs, scene.tile_center(k1), scene.tile_center(k2))) return {k1, k2};
  return {k2, k1};
}

}  // namespace nfloc
