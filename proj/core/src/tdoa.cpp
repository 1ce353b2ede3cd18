#include "nfloc/tdoa.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include <Eigen/Dense>

namespace nfloc {

bool LabelMap::has_tile(TileIndex k) const {
  return std::any_of(entries.begin(), entries.end(), [k](const LabeledToa& e) { return e.tile == k; });
}

void LabelMap::add(double toa, TileIndex tile) {
  if (has_tile(tile)) throw std::invalid_argument("tile labeled twice");
  entries.push_back({toa, tile});
}

Eigen::VectorXd TdoaSystem::residuals(const Vec3& p) const {
  Eigen::VectorXd r(rows());
  const double d_ref = (p - ref_pos).norm();
  for (Eigen::Index i = 0; i < rows(); ++i)
    r(i) = gammas(i) - ((p - anchors[static_cast<std::size_t>(i)]).norm() - d_ref);
  return r;
}

TdoaSystem build_system(const LabelMap& labels, const std::vector<Vec3>& tile_positions,
                        const Vec3& p_bs) {
  if (labels.size() < 3) throw std::invalid_argument("need at least 3 labeled paths for a TDoA fix");
  // Canonical row order so that equal label sets give bit-identical systems.
  auto entries = labels.entries;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.tile < b.tile; });
  for (const auto& e : entries)
    if (e.tile >= tile_positions.size()) throw std::out_of_range("labeled tile outside the scene");

  const auto ref = std::min_element(entries.begin(), entries.end(),
                                    [](const auto& a, const auto& b) { return a.toa < b.toa; });
  TdoaSystem sys;
  sys.ref_tile = ref->tile;
  sys.ref_pos = tile_positions[ref->tile];
  const double tau_ref = ref->toa;
  const double bs_ref = (p_bs - sys.ref_pos).norm();

  const auto rows = static_cast<Eigen::Index>(entries.size() - 1);
  sys.a_matrix.resize(rows, 3);
  sys.c_vector.resize(rows);
  sys.b_vector.resize(rows);
  sys.gammas.resize(rows);
  Eigen::Index row = 0;
  for (const auto& e : entries) {
    if (e.tile == sys.ref_tile) continue;
    const Vec3& pk = tile_positions[e.tile];
    const double gamma = kSpeedOfLight * (e.toa - tau_ref) - ((p_bs - pk).norm() - bs_ref);
    sys.a_matrix.row(row) = (pk - sys.ref_pos).transpose();
    sys.c_vector(row) = -gamma;
    sys.b_vector(row) = 0.5 * (pk.squaredNorm() - sys.ref_pos.squaredNorm() - gamma * gamma);
    sys.gammas(row) = gamma;
    sys.tiles.push_back(e.tile);
    sys.anchors.push_back(pk);
    ++row;
  }
  return sys;
}

namespace {

double cost_at(const TdoaSystem& sys, const Vec3& p) { return sys.residuals(p).squaredNorm(); }

// Closed form on the first `dims` coordinates (the rest pinned to zero).
std::optional<TdoaSolution> closed_form(const TdoaSystem& sys, Eigen::Index dims,
                                        const SolveOptions& opt) {
  if (sys.rows() < dims) return std::nullopt;
  const Eigen::MatrixXd a = sys.a_matrix.leftCols(dims);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s(dims - 1) <= 0.0 || s(0) / s(dims - 1) > opt.rank_condition) return std::nullopt;

  Vec3 g = Vec3::Zero();
  Vec3 h = Vec3::Zero();
  g.head(dims) = svd.solve(sys.c_vector);
  h.head(dims) = svd.solve(sys.b_vector);

  // |g d + h - p_ref|^2 = d^2
  const Vec3 w = h - sys.ref_pos;
  const double qa = g.squaredNorm() - 1.0;
  const double qb = 2.0 * g.dot(w);
  const double qc = w.squaredNorm();
  std::vector<double> roots;
  if (std::abs(qa) < 1e-12) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // numerically stable pair
    const double q = -0.5 * (qb + std::copysign(sq, qb));
    if (q != 0.0) roots.push_back(qc / q);
    roots.push_back(q / qa);
  }

  std::optional<TdoaSolution> best;
  for (double d : roots) {
    if (!(d > 0.0)) continue;
    const Vec3 p = g * d + h;
    if (opt.use_room_prior && !opt.room.contains(p, 1e-6)) continue;
    const double c = cost_at(sys, p);
    if (!best || c < best->cost) {
      best = TdoaSolution{p, dims == 3 ? SolvePath::linear_3d : SolvePath::linear_2d, 0, c};
    }
  }
  return best;
}

TdoaSolution ground_nls_from(const TdoaSystem& sys, const SolveOptions& opt, Vec3 p) {
  double cost = cost_at(sys, p);
  double lambda = -1.0;
  Vec3 best = p;
  double best_cost = cost;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double d_ref = std::max((p - sys.ref_pos).norm(), 1e-12);
    Eigen::MatrixXd jac(sys.rows(), 2);
    for (Eigen::Index i = 0; i < sys.rows(); ++i) {
      const Vec3& pk = sys.anchors[static_cast<std::size_t>(i)];
      const double d_k = std::max((p - pk).norm(), 1e-12);
      const Vec3 grad = (p - pk) / d_k - (p - sys.ref_pos) / d_ref;
      jac.row(i) = -grad.head<2>().transpose();
    }
    const Eigen::VectorXd r = sys.residuals(p);
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d jtr = jac.transpose() * r;
    if (lambda < 0.0) lambda = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-12);

    Eigen::Matrix2d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);

    Vec3 trial = p;
    trial.head<2>() += step;
    trial.z() = 0.0;
    // Steps that leave the room are rejected rather than clamped: a clamped
    // iterate can land on the RIS wall, where a collinear array has zero gradient.
    const bool outside = opt.use_room_prior && !opt.room.contains(trial);
    const double trial_cost = outside ? cost : cost_at(sys, trial);

    if (!outside && trial_cost <= cost) {
      const double moved = (trial - p).norm();
      p = trial;
      cost = trial_cost;
      lambda = std::max(lambda / 3.0, 1e-15);
      if (cost < best_cost) {
        best = p;
        best_cost = cost;
      }
      if (moved < opt.step_tolerance || cost == 0.0) return {p, SolvePath::nls, it, cost};
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) return {best, SolvePath::nls, it, best_cost};  // stationary
    }
  }
  throw EstimationError("Gauss-Newton did not converge", best);
}

// Levenberg-Marquardt from a 3 x 3 grid of floor points; the lowest final cost wins.
// One start is not enough: walls and the array's mirror ambiguity trap single runs.
TdoaSolution ground_nls(const TdoaSystem& sys, const SolveOptions& opt) {
  const Vec3 lo = opt.room.lo, span = opt.room.hi - opt.room.lo;
  std::optional<TdoaSolution> best;
  Vec3 best_failed = opt.room.floor_center();
  double best_failed_cost = std::numeric_limits<double>::infinity();
  for (double fy : {0.5, 1.0 / 6.0, 5.0 / 6.0})
    for (double fx : {0.5, 1.0 / 6.0, 5.0 / 6.0}) {
      const Vec3 start{lo.x() + fx * span.x(), lo.y() + fy * span.y(), 0.0};
      try {
        const TdoaSolution sol = ground_nls_from(sys, opt, start);
        if (!best || sol.cost < best->cost) best = sol;
      } catch (const EstimationError& e) {
        const double c = cost_at(sys, e.best_iterate());
        if (c < best_failed_cost) {
          best_failed_cost = c;
          best_failed = e.best_iterate();
        }
      }
    }
  if (!best) throw EstimationError("Gauss-Newton did not converge", best_failed);
  return *best;
}

}  // namespace

TdoaSolution solve(const TdoaSystem& system, const SolveOptions& options) {
  if (system.rows() < 2) throw std::invalid_argument("under-determined TDoA system");
  if (auto sol = closed_form(system, 3, options)) return *sol;
  if (auto sol = closed_form(system, 2, options)) return *sol;
  return ground_nls(system, options);
}

Vec3 solve_position(const TdoaSystem& system, const SolveOptions& options) {
  return solve(system, options).position;
}

}  // namespace nfloc
