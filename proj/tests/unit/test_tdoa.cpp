#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "nfloc/tdoa.hpp"

using namespace nfloc;

namespace {

LabelMap labels_of(const Scene& s, const std::vector<TileIndex>& tiles) {
  LabelMap m;
  for (TileIndex k : tiles) m.add(toa(s, k), k);
  return m;
}

std::vector<TileIndex> first(std::size_t n) {
  std::vector<TileIndex> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = i;
  return t;
}

}  // namespace

TEST_SUITE("tdoa") {
  TEST_CASE("clock offset drops out of the system") {
    const Scene a = test::desk_scene({3, 4, 0}, 16, 0.0);
    const Scene b = test::desk_scene({3, 4, 0}, 16, 7.3e-7);
    const auto sa = build_system(labels_of(a, first(16)), a.tile_centers(), a.p_bs);
    const auto sb = build_system(labels_of(b, first(16)), b.tile_centers(), b.p_bs);
    CHECK((sa.gammas - sb.gammas).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sa.ref_tile == sb.ref_tile);
  }

  TEST_CASE("Gamma equals the UE-side range difference") {
    const Scene s = test::desk_scene({8, 2, 0});
    const auto sys = build_system(labels_of(s, first(16)), s.tile_centers(), s.p_bs);
    const double d_ref = (s.p_ue - sys.ref_pos).norm();
    for (Eigen::Index i = 0; i < sys.rows(); ++i)
      CHECK(sys.gammas(i) == doctest::Approx((s.p_ue - sys.anchors[static_cast<std::size_t>(i)]).norm() - d_ref).epsilon(1e-9));
    CHECK(sys.residuals(s.p_ue).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sys.rows() == 15);
  }

  TEST_CASE("reference is the earliest labeled ToA") {
    const Scene s = test::desk_scene({1, 3, 0});
    const auto sys = build_system(labels_of(s, first(16)), s.tile_centers(), s.p_bs);
    for (TileIndex k = 0; k < 16; ++k) CHECK(toa(s, sys.ref_tile) <= toa(s, k));
  }

  TEST_CASE("collinear tiles leave A with rank one") {
    const Scene s = test::desk_scene({5, 5, 0}, 4);
    const auto sys = build_system(labels_of(s, first(4)), s.tile_centers(), s.p_bs);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.a_matrix);
    CHECK(lu.rank() == 1);
  }

  TEST_CASE("four non-coplanar anchors: closed form is exact") {
    const Vec3 ue{3.0, 4.0, 1.0};
    const Scene s = scene_from_points({{0, 10, 0}, {10, 10, 1}, {5, 10, 3}, {0, 0, 3}, {10, 0, 0}}, {5, 5, 2}, ue, 1e-7);
    const auto sol = solve(build_system(labels_of(s, first(5)), s.tile_centers(), s.p_bs), {RoomBox{}, false});
    CHECK(sol.path == SolvePath::linear_3d);
    CHECK((sol.position - ue).norm() < 1e-6);
  }

  TEST_CASE("collinear RIS: ground-plane iteration finds the floor position") {
    const Scene s = test::desk_scene({5, 5, 0});
    const auto sol = solve(build_system(labels_of(s, first(16)), s.tile_centers(), s.p_bs));
    CHECK(sol.path == SolvePath::nls);
    CHECK((sol.position - s.p_ue).norm() < 1e-4);
  }

  TEST_CASE("too few labels") {
    const Scene s = test::desk_scene({5, 5, 0});
    CHECK_THROWS_AS(build_system(labels_of(s, {0, 1}), s.tile_centers(), s.p_bs), std::invalid_argument);
    LabelMap m;
    m.add(1e-8, 3);
    CHECK_THROWS_AS(m.add(2e-8, 3), std::invalid_argument);
    CHECK(m.has_tile(3));
    CHECK_FALSE(m.has_tile(2));
  }

  TEST_CASE("translating the whole scene translates the fix") {
    const Vec3 shift{2.0, -1.0, 0.0};
    const Scene s = test::desk_scene({4, 6, 0});
    std::vector<Vec3> moved;
    for (const auto& c : s.tile_centers()) moved.push_back(c + shift);
    const Scene t = scene_from_points(moved, s.p_bs + shift, s.p_ue + shift, s.t0);
    SolveOptions opt;
    opt.room.lo += shift;
    opt.room.hi += shift;
    const Vec3 a = solve_position(build_system(labels_of(s, first(16)), s.tile_centers(), s.p_bs));
    const Vec3 b = solve_position(build_system(labels_of(t, first(16)), t.tile_centers(), t.p_bs), opt);
    CHECK((b - (a + shift)).norm() < 1e-5);
  }

  TEST_CASE("more noisy labels do not hurt on average") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, 2e-11);
    std::uniform_real_distribution<double> x(1, 9), y(1, 8);
    double few = 0.0, many = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Scene s = test::desk_scene({x(rng), y(rng), 0});
      LabelMap m;
      for (TileIndex k = 0; k < 16; ++k) m.add(toa(s, k) + noise(rng), k);
      LabelMap sub;
      for (TileIndex k : {0, 5, 10, 15}) sub.add(m.entries[k].toa, k);
      few += (solve_position(build_system(sub, s.tile_centers(), s.p_bs)) - s.p_ue).squaredNorm();
      many += (solve_position(build_system(m, s.tile_centers(), s.p_bs)) - s.p_ue).squaredNorm();
    }
    CHECK(many <= few);
  }
}
