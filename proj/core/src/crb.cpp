#include "nfloc/crb.hpp"

#include <Eigen/Dense>

namespace nfloc {

double toa_variance(double bandwidth, double snr_k, double snr_ref) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (snr_k < 0.0 || snr_ref < 0.0) throw std::invalid_argument("SNR must be non-negative");
  if (snr_k == 0.0 || snr_ref == 0.0) return std::numeric_limits<double>::infinity();
  const double zeta = 1.0 / (1.0 / snr_k + 1.0 / snr_ref);
  return 1.0 / (8.0 * kPi * kPi * bandwidth * bandwidth * zeta);
}

Vec3 tdoa_gradient(const Vec3& p, const Vec3& p_k, const Vec3& p_ref) {
  return (p - p_k) / (kSpeedOfLight * (p - p_k).norm()) -
         (p - p_ref) / (kSpeedOfLight * (p - p_ref).norm());
}

namespace {

double observable_trace(const Eigen::MatrixXd& j, double tol, int* rank, double* cond) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
  const auto& ev = eig.eigenvalues();  // ascending
  const double top = ev(ev.size() - 1);
  *rank = 0;
  double trace = 0.0;
  if (top <= 0.0) return std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > tol * top) {
      ++*rank;
      trace += 1.0 / ev(i);
    }
  *cond = ev(0) > 0.0 ? top / ev(0) : std::numeric_limits<double>::infinity();
  return trace;
}

}  // namespace

FimResult fim(const Scene& scene, const std::vector<double>& snrs, double bandwidth, TileIndex k_ref,
              const FimOptions& options) {
  const std::size_t k_tiles = scene.tile_count();
  if (k_tiles < 2) throw std::invalid_argument("Fisher information needs at least two tiles");
  if (snrs.size() != k_tiles) throw std::invalid_argument("one SNR per tile required");
  if (k_ref >= k_tiles) throw std::out_of_range("reference tile out of range");

  FimResult r;
  r.per_tile_sigma2.assign(k_tiles, 0.0);
  r.per_tile_zeta.assign(k_tiles, 0.0);
  const Vec3& p_ref = scene.tile_center(k_ref);
  for (TileIndex k = 0; k < k_tiles; ++k) {
    if (k == k_ref) continue;
    const double sigma2 = toa_variance(bandwidth, snrs[k], snrs[k_ref]);
    r.per_tile_sigma2[k] = sigma2;
    r.per_tile_zeta[k] = 1.0 / (8.0 * kPi * kPi * bandwidth * bandwidth * sigma2);
    if (!std::isfinite(sigma2)) continue;
    if (sigma2 == 0.0) throw std::invalid_argument("noiseless path: the bound is zero");
    const Vec3 g = tdoa_gradient(scene.p_ue, scene.tile_center(k), p_ref);
    r.fim.noalias() += (g * g.transpose()) / sigma2;
  }

  int ground_rank = 0;
  double ground_cond = 0.0;
  const double full = observable_trace(r.fim, options.rank_tolerance, &r.rank, &r.condition);
  const double ground = observable_trace(r.fim.topLeftCorner<2, 2>(), options.rank_tolerance,
                                         &ground_rank, &ground_cond);
  // A single direction of information cannot fix a position, even on the floor.
  if (r.rank >= (options.strict ? 3 : 2)) r.peb = std::sqrt(full);
  if (ground_rank == 2) r.peb_ground = std::sqrt(ground);
  return r;
}

std::vector<double> path_snrs(const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>& cascade,
                              double tx_power, double noise_psd, std::size_t l_frames) {
  std::vector<double> out(static_cast<std::size_t>(cascade.size()));
  for (Eigen::Index k = 0; k < cascade.size(); ++k)
    out[static_cast<std::size_t>(k)] =
        noise_psd > 0.0 ? tx_power * std::norm(cascade(k)) * static_cast<double>(l_frames) / noise_psd
                        : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace nfloc
