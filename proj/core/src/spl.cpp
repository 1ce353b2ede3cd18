#include "nfloc/spl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace nfloc {

LabelHypothesis spl_sort(const std::vector<TileIndex>& tiles, const std::vector<double>& toas,
                         const Vec3& p_estimate, const Scene& scene) {
  if (tiles.size() != toas.size()) throw std::invalid_argument("group tiles and ToAs differ in size");
  LabelHypothesis h;
  h.sequence = tiles;
  const std::size_t m = tiles.size();
  const std::size_t swap_cap = m * (m - 1) / 2;
  bool swapped = true;
  while (swapped && h.swaps < swap_cap) {
    swapped = false;
    for (std::size_t j = 0; j + 1 < m; ++j) {
      const auto [later, earlier] =
          label_pair({toas[j], toas[j + 1]}, {h.sequence[j], h.sequence[j + 1]}, p_estimate, scene);
      if (later != h.sequence[j]) {
        h.sequence[j] = later;
        h.sequence[j + 1] = earlier;
        ++h.swaps;
        swapped = true;
      }
    }
  }
  return h;
}

bool verify_nonadjacent(const LabelHypothesis& hypothesis, const Vec3& p_estimate, const Scene& scene) {
  const auto& q = hypothesis.sequence;
  for (std::size_t a = 0; a < q.size(); ++a)
    for (std::size_t b = a + 2; b < q.size(); ++b)
      if (!in_region(p_estimate, scene.p_bs, scene.tile_center(q[a]), scene.tile_center(q[b])))
        return false;
  return true;
}

LabelHypothesis spl_residual(const std::vector<TileIndex>& tiles, const std::vector<double>& toas,
                             const Vec3& p_estimate, const Scene& scene, double toa_ref,
                             TileIndex k_ref, std::size_t cap) {
  if (tiles.size() != toas.size()) throw std::invalid_argument("group tiles and ToAs differ in size");
  if (tiles.size() > cap)
    throw std::invalid_argument("group of " + std::to_string(tiles.size()) +
                                " shared paths exceeds the residual labeling cap; use a larger L or fewer tiles");
  const Vec3& p_ref = scene.tile_center(k_ref);
  const double bs_ref = (scene.p_bs - p_ref).norm();
  const double d_ref = (p_estimate - p_ref).norm();

  std::vector<TileIndex> perm = tiles;
  std::sort(perm.begin(), perm.end());
  LabelHypothesis best;
  best.residual = std::numeric_limits<double>::infinity();
  do {
    double e = 0.0;
    for (std::size_t m = 0; m < perm.size(); ++m) {
      const Vec3& pq = scene.tile_center(perm[m]);
      const double gamma = kSpeedOfLight * (toas[m] - toa_ref) - ((scene.p_bs - pq).norm() - bs_ref);
      e += std::abs(gamma - ((p_estimate - pq).norm() - d_ref));
    }
    if (e < best.residual) {
      best.residual = e;
      best.sequence = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

// BS -> tile -> p, in meters.
double path_length(const Scene& scene, TileIndex k, const Vec3& p) {
  const Vec3& pk = scene.tile_center(k);
  return (scene.p_bs - pk).norm() + (p - pk).norm();
}

// Singleton groups that produced their path.
LabelMap singleton_labels(const ToaGroups& groups, std::vector<TraceRow>* trace) {
  LabelMap labels;
  for (const auto& g : groups.groups) {
    if (g.dod() != 1) continue;
    const bool found = g.toas.size() == 1;
    if (found) labels.add(g.toas.front(), g.tiles.front());
    if (trace) trace->push_back({g.psp, 1, found ? "exclusive" : "skipped", 0, 0.0});
  }
  return labels;
}

Vec3 solve_labels(const LabelMap& labels, const Scene& scene, const SolveOptions& solve) {
  return solve_position(build_system(labels, scene.tile_centers(), scene.p_bs), solve);
}

Vec3 fix_from(const LabelMap& labels, const Scene& scene, const SolveOptions& solve) {
  if (labels.size() < 3)
    throw EstimationError("fewer than three exclusive paths detected", solve.room.floor_center());
  return solve_labels(labels, scene, solve);
}

const LabeledToa& reference_of(const LabelMap& labels) {
  return *std::min_element(labels.entries.begin(), labels.entries.end(),
                           [](const auto& a, const auto& b) { return a.toa < b.toa; });
}

}  // namespace

Vec3 bootstrap_position(const ToaGroups& groups, const Scene& scene, const SolveOptions& solve) {
  return fix_from(singleton_labels(groups, nullptr), scene, solve);
}

SplResult run_spl(const ToaGroups& groups, const Scene& scene, const SplOptions& options) {
  SplResult res;
  res.labels = singleton_labels(groups, &res.trace);
  Vec3 p = options.fixed_estimate ? *options.fixed_estimate : fix_from(res.labels, scene, options.solve);
  res.bootstrap = p;

  std::vector<const ToaGroup*> shared;
  for (const auto& g : groups.groups)
    if (g.dod() >= 2) shared.push_back(&g);
  std::stable_sort(shared.begin(), shared.end(), [](auto a, auto b) { return a->dod() < b->dod(); });

  for (const ToaGroup* g : shared) {
    TraceRow row{g->psp, g->dod(), "skipped", 0, 0.0};
    if (g->under_detected || g->toas.size() != g->dod()) {
      res.trace.push_back(row);
      continue;
    }
    LabelHypothesis h;
    if (g->dod() == 2) {
      const auto [a, b] = label_pair({g->toas[0], g->toas[1]}, {g->tiles[0], g->tiles[1]}, p, scene);
      h.sequence = {a, b};
      row.method = "pair";
    } else {
      bool use_residual = options.method == SplMethod::residual;
      if (!use_residual) {
        h = spl_sort(g->tiles, g->toas, p, scene);
        row.method = "sort";
        row.swaps = h.swaps;
        use_residual = options.method == SplMethod::hybrid && !verify_nonadjacent(h, p, scene);
      }
      if (use_residual) {
        const auto& ref = reference_of(res.labels);
        h = spl_residual(g->tiles, g->toas, p, scene, ref.toa, ref.tile, options.residual_cap);
        row.method = "residual";
        row.residual = h.residual;
      }
    }
    const LabeledToa ref = reference_of(res.labels);
    const double ref_range = path_length(scene, ref.tile, p);
    for (std::size_t j = 0; j < h.sequence.size(); ++j) {
      const double measured = kSpeedOfLight * (g->toas[j] - ref.toa);
      const double predicted = path_length(scene, h.sequence[j], p) - ref_range;
      if (std::abs(measured - predicted) <= options.gate) res.labels.add(g->toas[j], h.sequence[j]);
    }
    res.trace.push_back(row);

    if (!options.fixed_estimate) {
      try {
        p = solve_labels(res.labels, scene, options.solve);
      } catch (const EstimationError&) {
        // keep the previous estimate for the next group
      }
    }
  }
  res.labels.complete = res.labels.size() == scene.tile_count();
  res.position = options.fixed_estimate ? solve_labels(res.labels, scene, options.solve) : p;
  return res;
}

SplResult run_fixed_order(const ToaGroups& groups, const Scene& scene, const SolveOptions& solve) {
  SplResult res;
  res.labels = singleton_labels(groups, &res.trace);
  for (const auto& g : groups.groups) {
    if (g.dod() < 2) continue;
    const bool usable = !g.under_detected && g.toas.size() == g.dod();
    if (usable)
      for (std::size_t j = 0; j < g.toas.size(); ++j) res.labels.add(g.toas[j], g.tiles[j]);
    res.trace.push_back({g.psp, g.dod(), usable ? "fixed" : "skipped", 0, 0.0});
  }
  res.labels.complete = res.labels.size() == scene.tile_count();
  res.position = fix_from(res.labels, scene, solve);
  res.bootstrap = res.position;
  return res;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "group,dod,method,swaps,residual\n";
  for (const auto& r : trace)
    os << r.group << ',' << r.dod << ',' << r.method << ',' << r.swaps << ',' << r.residual << '\n';
}

}  // namespace nfloc
