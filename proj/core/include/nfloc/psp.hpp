#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "nfloc/types.hpp"

namespace nfloc {

/// 1-based index i of the phase-shift profile alpha(i) = i / L.
using PspIndex = std::size_t;

/// Per-tile phase-shift profiles and the label groups they induce.
///
/// `groups` holds every PSP in use, exclusive ones included; `k0_set` lists
/// the tiles whose PSP nobody else shares (the bootstrap anchors).
struct PspAssignment {
  std::size_t l_frames = 0;
  std::vector<double> beta;           // per tile, in (0, 1]
  std::vector<PspIndex> psp_of_tile;  // per tile, 1..L
  std::vector<TileIndex> k0_set;
  std::size_t k0_size = 0;
  std::map<PspIndex, std::vector<TileIndex>> groups;

  std::size_t tile_count() const { return beta.size(); }
  std::size_t degree_of_duplication(PspIndex i) const;
  std::size_t max_degree_of_duplication() const;
  bool sufficient() const { return l_frames >= tile_count(); }
};

/// (1/L, 2/L, ..., L/L).
std::vector<double> psp_list(std::size_t l_frames);

struct AssignOptions {
  /// Lift the K0 >= 3 requirement. Only meaningful for exercising the
  /// assignment rule itself; such an assignment cannot bootstrap a position.
  bool allow_small_k0 = false;
};

/// Evenly spaced exclusive anchors get the last K0 profiles; the remaining
/// tiles cycle through alpha(1)..alpha(L-K0) in tile order. With L >= K every
/// tile receives an exclusive profile (the last K of the list).
PspAssignment assign(std::size_t k_tiles, std::size_t l_frames, std::size_t k0_size,
                     AssignOptions options = {});

/// theta_k(frame) = 2 pi beta_k frame, reduced to [0, 2 pi). `frame` is 1-based.
double phase_shift(const PspAssignment& assignment, TileIndex k, std::size_t frame);

/// CSV dump: tile_index,beta,group_id
void write_assignment_csv(std::ostream& os, const PspAssignment& assignment);

}  // namespace nfloc
