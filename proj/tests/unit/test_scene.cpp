#include <doctest.h>

#include <cmath>

#include "nfloc/scene.hpp"

using namespace nfloc;

TEST_SUITE("scene") {
  TEST_CASE("64-tile layout spans 6.3 m about the center") {
    const auto c = tile_centers(RisLayout{64, 0.1, {5, 10, 2}, {1, 0, 0}, 4, 10});
    REQUIRE(c.size() == 64);
    CHECK((c.front() - Vec3(1.85, 10, 2)).norm() < 1e-12);
    CHECK((c.back() - Vec3(8.15, 10, 2)).norm() < 1e-12);
  }

  TEST_CASE("single tile sits at the layout center") {
    const auto c = tile_centers(RisLayout{1, 0.1, {5, 10, 2}, {1, 0, 0}, 4, 10});
    REQUIRE(c.size() == 1);
    CHECK((c[0] - Vec3(5, 10, 2)).norm() == 0.0);
  }

  TEST_CASE("default layout carries 4x10 element tiles") {
    const Scene s = build_scene(RisLayout{}, {0, 5, 2}, {5, 5, 0}, 0.0, 0.0, kSpeedOfLight / 28e9);
    REQUIRE(s.tile_count() == 64);
    for (const auto& t : s.tiles) CHECK(t.element_count() == 40);
    CHECK((s.p_bs - Vec3(0, 5, 2)).norm() == 0.0);
  }

  TEST_CASE("layout rejects zero tiles and non-unit axes") {
    CHECK_THROWS_AS(tile_centers(RisLayout{0, 0.1, {5, 10, 2}, {1, 0, 0}, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(tile_centers(RisLayout{4, 0.1, {5, 10, 2}, {2, 0, 0}, 1, 1}), std::invalid_argument);
  }

  TEST_CASE("hand-computed time of arrival") {
    const Scene s = scene_from_points({{5, 10, 2}}, {0, 5, 2}, {5, 5, 0});
    const double expected = (std::sqrt(50.0) + std::sqrt(29.0)) / 3e8;
    CHECK(toa(s, 0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(toa(s, 0) == doctest::Approx(4.1521e-8).epsilon(1e-4));
  }

  TEST_CASE("clock offset adds to every ToA") {
    const Scene a = scene_from_points({{5, 10, 2}}, {0, 5, 2}, {5, 5, 0}, 0.0);
    const Scene b = scene_from_points({{5, 10, 2}}, {0, 5, 2}, {5, 5, 0}, 1e-6);
    CHECK(toa(b, 0) - toa(a, 0) == doctest::Approx(1e-6).epsilon(1e-12));
  }

  TEST_CASE("mirror-symmetric tiles give equal ToAs") {
    const Scene s = scene_from_points({{3, 10, 2}, {7, 10, 2}}, {5, 0, 2}, {5, 4, 0});
    CHECK(toa(s, 0) == doctest::Approx(toa(s, 1)).epsilon(1e-15));
  }

  TEST_CASE("path_delay matches toa without the clock") {
    const Scene s = scene_from_points({{2, 10, 1}}, {0, 5, 2}, {3, 4, 0}, 5e-7);
    CHECK(path_delay(s.p_bs, s.tile_center(0), s.p_ue) + 5e-7 == doctest::Approx(toa(s, 0)).epsilon(1e-15));
  }
}
