#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "nfloc/scene.hpp"

namespace nfloc {

/// sigma^2 = 1 / (8 pi^2 B^2 zeta), zeta = (1/snr_k + 1/snr_ref)^-1.
/// Returns +inf when either SNR is zero.
double toa_variance(double bandwidth, double snr_k, double snr_ref);

/// Gradient of mu_k(p) = (|p - p_k| - |p - p_ref|) / c with respect to p.
Vec3 tdoa_gradient(const Vec3& p, const Vec3& p_k, const Vec3& p_ref);

struct FimResult {
  Eigen::Matrix3d fim = Eigen::Matrix3d::Zero();
  /// sqrt(trace(J^+)) over the numerically observable subspace. +inf below
  /// rank 2, or below full rank when `strict` is set.
  double peb = std::numeric_limits<double>::infinity();
  /// Same bound for the ground-constrained (x, y) problem.
  double peb_ground = std::numeric_limits<double>::infinity();
  int rank = 0;
  double condition = std::numeric_limits<double>::infinity();
  std::vector<double> per_tile_sigma2;  // seconds^2, zero for the reference
  std::vector<double> per_tile_zeta;
};

struct FimOptions {
  /// Singular values below this fraction of the largest count as unobservable.
  double rank_tolerance = 1e-10;
  /// Report an infinite PEB whenever J is rank deficient instead of
  /// restricting the trace to the observable subspace.
  bool strict = false;
};

/// Fisher information of the TDoA set against `k_ref`, clock terms neglected.
FimResult fim(const Scene& scene, const std::vector<double>& snrs, double bandwidth,
              TileIndex k_ref, const FimOptions& options = {});

/// Post-integration SNR of each path: P |c_k|^2 L / N0 (per-subcarrier
/// P|c_k|^2 / (N N0) summed coherently over N subcarriers and L frames).
std::vector<double> path_snrs(const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>& cascade,
                              double tx_power, double noise_psd, std::size_t l_frames);

}  // namespace nfloc
