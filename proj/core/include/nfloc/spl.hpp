#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nfloc/psp.hpp"
#include "nfloc/scene.hpp"
#include "nfloc/spectrum.hpp"
#include "nfloc/tdoa.hpp"

namespace nfloc {

/// Hyperboloid of two sheets with foci at tiles k1 and k2, written in a local
/// frame whose x' axis runs from k1 to k2 and whose origin is their midpoint:
///   f(p) = x'^2 / ux^2 - rho^2 / uy^2 - 1,   rho^2 = |p - center|^2 - x'^2.
/// ux = (d_bs,k1 - d_bs,k2) / 2 and uy = uz = sqrt(e^2 - ux^2), e = |p_k2 - p_k1| / 2.
struct Discriminant {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Zero();  // (ux, uy, uz)
  Vec3 axis = Vec3::UnitX();      // unit, k1 -> k2
  TileIndex k1 = 0;
  TileIndex k2 = 0;
  bool degenerate = false;

  double quadric(const Vec3& p) const;
  double local_x(const Vec3& p) const { return (p - center).dot(axis); }
};

/// Orders the pair so that k1 precedes k2 along the RIS axis (first to last tile).
Discriminant build_discriminant(const Scene& scene, TileIndex k1, TileIndex k2);

/// Path via k1 is at least as long as the path via k2 when the UE sits at p:
///   |p - p_k1| - |p - p_k2| >= |p_bs - p_k2| - |p_bs - p_k1|.
bool in_region(const Vec3& p, const Vec3& p_bs, const Vec3& p_k1, const Vec3& p_k2);

/// The same region evaluated through the quadric. The branch used depends on
/// which side of the pair the BS is on (sign of ux). Meaningless when degenerate.
bool explicit_region(const Discriminant& disc, const Vec3& p);

/// (label of the later ToA, label of the earlier ToA).
std::pair<TileIndex, TileIndex> label_pair(std::pair<double, double> toas,
                                           std::pair<TileIndex, TileIndex> tiles,
                                           const Vec3& p_estimate, const Scene& scene);

/// Tiles proposed for a group's descending ToAs, position by position.
struct LabelHypothesis {
  std::vector<TileIndex> sequence;
  double residual = 0.0;  // metres, residual labeling only
  std::size_t swaps = 0;  // sort labeling only
};

/// Bubble sort with the pairwise discriminant as comparator. `tiles` in RIS
/// order form the initial hypothesis; ties keep that order.
LabelHypothesis spl_sort(const std::vector<TileIndex>& tiles, const std::vector<double>& toas,
                         const Vec3& p_estimate, const Scene& scene);

/// Checks every non-adjacent pair of the hypothesis against the discriminant.
bool verify_nonadjacent(const LabelHypothesis& hypothesis, const Vec3& p_estimate,
                        const Scene& scene);

/// TDoA fix from the singleton (exclusive-PSP) groups alone. Throws
/// EstimationError when fewer than three of them produced a ToA.
Vec3 bootstrap_position(const ToaGroups& groups, const Scene& scene, const SolveOptions& solve = {});

inline constexpr std::size_t kResidualCap = 8;

/// Exhaustive search for the permutation minimising
///   sum_m | Gamma_{q_m} - (|p~ - p_{q_m}| - |p~ - p_ref|) |
/// where Gamma is measured from the group's ToAs against (toa_ref, k_ref).
LabelHypothesis spl_residual(const std::vector<TileIndex>& tiles, const std::vector<double>& toas,
                             const Vec3& p_estimate, const Scene& scene, double toa_ref,
                             TileIndex k_ref, std::size_t cap = kResidualCap);

enum class SplMethod {
  hybrid,   // sort, residual when the non-adjacent check fails
  sort,     // sort only
  residual  // residual only
};

struct SplOptions {
  SplMethod method = SplMethod::hybrid;
  std::size_t residual_cap = kResidualCap;
  SolveOptions solve;
  /// Label every group against this position instead of the running estimate.
  std::optional<Vec3> fixed_estimate;
  /// A labeled shared-group path is dropped when its range difference to the
  /// reference misses the running estimate's prediction by more than this (m).
  /// Infinity disables gating.
  double gate = std::numeric_limits<double>::infinity();
};

struct TraceRow {
  PspIndex group = 0;
  std::size_t dod = 0;
  std::string method;  // exclusive | pair | sort | residual | skipped
  std::size_t swaps = 0;
  double residual = 0.0;
};

struct SplResult {
  LabelMap labels;
  Vec3 bootstrap = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  std::vector<TraceRow> trace;
};

/// Labels singletons, bootstraps from them, then labels shared groups in
/// ascending DoD and re-solves after each one. Under-detected groups are skipped.
SplResult run_spl(const ToaGroups& groups, const Scene& scene, const SplOptions& options = {});

/// Fixed labeling for shared groups: ascending tile index against descending
/// ToAs, then one solve over everything.
SplResult run_fixed_order(const ToaGroups& groups, const Scene& scene,
                          const SolveOptions& solve = {});

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace nfloc
