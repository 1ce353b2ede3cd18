#pragma once

#include <vector>

#include <Eigen/Core>

#include "nfloc/types.hpp"

namespace nfloc {

struct LabeledToa {
  double toa = 0.0;  // seconds
  TileIndex tile = 0;
};

/// Extracted ToAs and the tiles they were attributed to.
struct LabelMap {
  std::vector<LabeledToa> entries;
  bool complete = false;  // every tile of the scene received a path

  std::size_t size() const { return entries.size(); }
  bool has_tile(TileIndex k) const;
  void add(double toa, TileIndex tile);  // throws on a duplicate tile
};

/// Linearised hyperbolic system A p = d_ref c + b built against the
/// reference tile (smallest labeled ToA). Each row k encodes
///   Gamma_k = c (tau_k - tau_ref) - (|p_bs - p_k| - |p_bs - p_ref|) = d_k - d_ref,
/// so the BS leg and the clock offset both drop out.
struct TdoaSystem {
  Eigen::MatrixXd a_matrix;  // rows x 3, p_k - p_ref
  Eigen::VectorXd c_vector;  // -Gamma_k
  Eigen::VectorXd b_vector;  // (|p_k|^2 - |p_ref|^2 - Gamma_k^2) / 2
  TileIndex ref_tile = 0;
  Vec3 ref_pos = Vec3::Zero();
  std::vector<TileIndex> tiles;  // non-reference tiles, row order
  std::vector<Vec3> anchors;     // their positions
  Eigen::VectorXd gammas;        // Gamma_k per row [m]

  Eigen::Index rows() const { return a_matrix.rows(); }
  /// Gamma_k - (|p - p_k| - |p - p_ref|) for every row.
  Eigen::VectorXd residuals(const Vec3& p) const;
};

TdoaSystem build_system(const LabelMap& labels, const std::vector<Vec3>& tile_positions,
                        const Vec3& p_bs);

struct SolveOptions {
  RoomBox room;
  bool use_room_prior = true;
  double rank_condition = 1e8;  // above this A is treated as rank deficient
  int max_iterations = 100;
  double step_tolerance = 1e-10;  // metres
};

enum class SolvePath { linear_3d, linear_2d, nls };

struct TdoaSolution {
  Vec3 position = Vec3::Zero();
  SolvePath path = SolvePath::nls;
  int iterations = 0;
  double cost = 0.0;  // sum of squared row residuals
};

/// Closed form p = G d_ref + h closed through |p - p_ref| = d_ref when A has
/// full column rank (first on x,y,z, then on x,y with z = 0); otherwise
/// damped Gauss-Newton on the ground plane from the room centre.
/// Throws EstimationError when every route fails.
TdoaSolution solve(const TdoaSystem& system, const SolveOptions& options = {});

Vec3 solve_position(const TdoaSystem& system, const SolveOptions& options = {});

}  // namespace nfloc
