#include "nfloc/psp.hpp"

#include <algorithm>
#include <ostream>

namespace nfloc {

std::size_t PspAssignment::degree_of_duplication(PspIndex i) const {
  auto it = groups.find(i);
  return it == groups.end() ? 0 : it->second.size();
}

std::size_t PspAssignment::max_degree_of_duplication() const {
  std::size_t dod = 0;
  for (const auto& [i, tiles] : groups) dod = std::max(dod, tiles.size());
  return dod;
}

std::vector<double> psp_list(std::size_t l_frames) {
  if (l_frames < 1) throw std::invalid_argument("need at least one frame");
  std::vector<double> out(l_frames);
  for (std::size_t i = 1; i <= l_frames; ++i)
    out[i - 1] = static_cast<double>(i) / static_cast<double>(l_frames);
  return out;
}

PspAssignment assign(std::size_t k_tiles, std::size_t l_frames, std::size_t k0_size,
                     AssignOptions options) {
  if (k_tiles < 1) throw std::invalid_argument("need at least one tile");
  if (l_frames < 1) throw std::invalid_argument("need at least one frame");
  if (k0_size < 3 && !options.allow_small_k0)
    throw std::invalid_argument("at least 3 exclusive-PSP tiles are required to bootstrap a position");
  if (k0_size < 2 && l_frames < k_tiles)
    throw std::invalid_argument("even spacing of exclusive tiles needs K0 >= 2");

  PspAssignment a;
  a.l_frames = l_frames;
  a.beta.assign(k_tiles, 0.0);
  a.psp_of_tile.assign(k_tiles, 0);
  const auto alpha = [l_frames](PspIndex i) {
    return static_cast<double>(i) / static_cast<double>(l_frames);
  };
  auto give = [&](TileIndex k, PspIndex i) {
    a.psp_of_tile[k] = i;
    a.beta[k] = alpha(i);
    a.groups[i].push_back(k);
  };

  if (l_frames >= k_tiles) {
    const std::size_t first = l_frames - k_tiles + 1;
    for (TileIndex k = 0; k < k_tiles; ++k) {
      give(k, first + k);
      a.k0_set.push_back(k);
    }
    a.k0_size = k_tiles;
    return a;
  }

  if (l_frames <= k0_size)
    throw std::invalid_argument("insufficient PSP budget: L must exceed K0 when L < K");
  if (k0_size > k_tiles) throw std::invalid_argument("K0 cannot exceed K");

  a.k0_size = k0_size;
  std::vector<bool> exclusive(k_tiles, false);
  for (std::size_t j = 0; j < k0_size; ++j) {
    const TileIndex k = (j * (k_tiles - 1)) / (k0_size - 1);
    exclusive[k] = true;
    a.k0_set.push_back(k);
    give(k, l_frames - k0_size + 1 + j);
  }

  const std::size_t shared = l_frames - k0_size;
  std::size_t cursor = 0;
  for (TileIndex k = 0; k < k_tiles; ++k) {
    if (exclusive[k]) continue;
    give(k, 1 + cursor % shared);
    ++cursor;
  }
  return a;
}

double phase_shift(const PspAssignment& assignment, TileIndex k, std::size_t frame) {
  if (k >= assignment.tile_count()) throw std::out_of_range("tile index out of range");
  // beta = i / L exactly, so reduce the integer product before scaling.
  const std::size_t i = assignment.psp_of_tile[k];
  const std::size_t l = assignment.l_frames;
  return kTwoPi * static_cast<double>((i * frame) % l) / static_cast<double>(l);
}

void write_assignment_csv(std::ostream& os, const PspAssignment& assignment) {
  os << "tile_index,beta,group_id\n";
  for (TileIndex k = 0; k < assignment.tile_count(); ++k)
    os << k << ',' << assignment.beta[k] << ',' << assignment.psp_of_tile[k] << '\n';
}

}  // namespace nfloc
