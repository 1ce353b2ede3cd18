#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace nfloc {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

/// Propagation speed used throughout the model (exactly 3e8 m/s, not CODATA).
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Zero-based RIS tile index. Tiles are numbered along the RIS axis.
using TileIndex = std::size_t;

/// Axis-aligned room box. The UE lives on its floor (z = 0).
struct RoomBox {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{10.0, 10.0, 3.0};

  bool contains(const Vec3& p, double slack = 1e-9) const {
    return (p.array() >= lo.array() - slack).all() && (p.array() <= hi.array() + slack).all();
  }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(lo).cwiseMin(hi); }
  Vec3 floor_center() const { return {0.5 * (lo.x() + hi.x()), 0.5 * (lo.y() + hi.y()), 0.0}; }
};

/// Raised when a solver cannot produce an estimate. Carries the best iterate seen.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, Vec3 best_iterate)
      : std::runtime_error(what), best_(std::move(best_iterate)) {}
  const Vec3& best_iterate() const noexcept { return best_; }

 private:
  Vec3 best_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

}  // namespace nfloc
