#pragma once

#include <algorithm>

#include "nfloc/psp.hpp"
#include "nfloc/scene.hpp"
#include "nfloc/spectrum.hpp"

namespace nfloc::test {

/// ToA groups straight from the forward model: every group complete, ToAs descending.
inline ToaGroups exact_groups(const Scene& scene, const PspAssignment& a) {
  const auto toas = all_toas(scene);
  ToaGroups out;
  for (const auto& [psp, tiles] : a.groups) {
    ToaGroup g;
    g.psp = psp;
    g.v_bin = psp % a.l_frames;
    g.tiles = tiles;
    for (TileIndex k : tiles) {
      g.toas.push_back(toas[k]);
      g.magnitudes.push_back(1.0);
      g.u_bins.push_back(0);
    }
    std::sort(g.toas.rbegin(), g.toas.rend());
    out.groups.push_back(g);
  }
  return out;
}

inline Scene desk_scene(const Vec3& ue, std::size_t k = 16, double t0 = 2e-7) {
  return build_scene(RisLayout{k, 0.4, {5, 10, 2}, {1, 0, 0}, 1, 1}, {0, 5, 2}, ue, t0, 0.0, 0.0107);
}

}  // namespace nfloc::test
