#include <doctest.h>

#include <cmath>

#include "nfloc/channel.hpp"

using namespace nfloc;

namespace {

constexpr double kLambda = 0.0107;

Scene full_scene(const Vec3& ue, double phi0 = 0.0) {
  return build_scene(RisLayout{4, 0.1, {5, 10, 2}, {1, 0, 0}, 4, 10}, {0, 5, 2}, ue, 0.0, phi0, kLambda);
}

}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("one wavelength away: magnitude lambda/(4 pi d), phase wraps to zero") {
    const Scene s = scene_from_points({{kLambda, 0, 0}}, {0, 0, 0}, {0, 5, 0});
    const Complex a = forward_direct(s, kLambda, 0, 0);
    CHECK(std::abs(a) == doctest::Approx(kLambda / (4 * kPi * kLambda)).epsilon(1e-12));
    CHECK(std::abs(std::arg(a)) < 1e-9);
  }

  TEST_CASE("attenuation uses the tile center, so it is equal across elements") {
    const Scene s = full_scene({5, 5, 0});
    const double m0 = std::abs(forward_direct(s, kLambda, 2, 0));
    for (std::size_t m = 1; m < 40; ++m) CHECK(std::abs(forward_direct(s, kLambda, 2, m)) == doctest::Approx(m0));
  }

  TEST_CASE("doubling distance halves the magnitude") {
    const Scene a = scene_from_points({{0, 0, 0}}, {3, 0, 0}, {0, 5, 0});
    const Scene b = scene_from_points({{0, 0, 0}}, {6, 0, 0}, {0, 5, 0});
    CHECK(std::abs(forward_direct(b, kLambda, 0, 0)) ==
          doctest::Approx(0.5 * std::abs(forward_direct(a, kLambda, 0, 0))).epsilon(1e-12));
  }

  TEST_CASE("backward link with zero phase offset is the forward form at the UE") {
    const Vec3 ue{2, 3, 0};
    const Scene s = full_scene(ue);
    Scene swapped = s;
    swapped.p_bs = ue;
    for (std::size_t m = 0; m < 40; m += 7)
      CHECK(std::abs(backward_direct(s, kLambda, 1, m) - forward_direct(swapped, kLambda, 1, m)) < 1e-15);
  }

  TEST_CASE("phase offset pi negates the backward link without changing its magnitude") {
    const Scene s0 = full_scene({2, 3, 0}, 0.0);
    const Scene s1 = full_scene({2, 3, 0}, kPi);
    const Scene s2 = full_scene({2, 3, 0}, 1.234);
    const Complex b0 = backward_direct(s0, kLambda, 3, 5);
    CHECK(std::abs(backward_direct(s1, kLambda, 3, 5) + b0) < 1e-15);
    CHECK(std::abs(backward_direct(s2, kLambda, 3, 5)) == doctest::Approx(std::abs(b0)));
  }

  TEST_CASE("no multipath: cascade is the direct inner product") {
    const Scene s = full_scene({4, 6, 0});
    MultipathConfig mp;
    mp.j_paths = 0;
    const auto ch = realize_channel(s, kLambda, mp);
    for (TileIndex k = 0; k < 4; ++k) {
      Complex c = 0.0;
      for (std::size_t m = 0; m < 40; ++m) c += forward_direct(s, kLambda, k, m) * backward_direct(s, kLambda, k, m);
      CHECK(std::abs(ch.cascade(static_cast<Eigen::Index>(k)) - c) <= 1e-12 * std::abs(c));
    }
  }

  TEST_CASE("fixed seed gives a bit-identical realization") {
    const Scene s = full_scene({4, 6, 0});
    MultipathConfig mp;
    mp.seed = 99;
    const auto a = realize_channel(s, kLambda, mp);
    const auto b = realize_channel(s, kLambda, mp);
    CHECK(a.cascade == b.cascade);
    CHECK(a.forward == b.forward);
    CHECK(a.backward == b.backward);
  }

  TEST_CASE("zero-amplitude multipath equals none") {
    const Scene s = full_scene({4, 6, 0});
    MultipathConfig none;
    none.j_paths = 0;
    MultipathConfig zero;
    zero.j_paths = 3;
    zero.zero_amplitude = true;
    CHECK(realize_channel(s, kLambda, none).cascade == realize_channel(s, kLambda, zero).cascade);
  }

  TEST_CASE("multipath changes the cascade only modestly at -15 dB") {
    const Scene s = full_scene({4, 6, 0});
    MultipathConfig none;
    none.j_paths = 0;
    const auto direct = realize_channel(s, kLambda, none).cascade;
    const auto with = realize_channel(s, kLambda, MultipathConfig{}).cascade;
    CHECK((with - direct).norm() > 0.0);
    CHECK((with - direct).norm() < direct.norm());
  }

  TEST_CASE("tile gain under switching and unit-modulus configurations") {
    const Scene s = full_scene({4, 6, 0});
    const auto ch = realize_channel(s, kLambda, MultipathConfig{});
    CHECK(tile_gain(ch, s, 1, 0.0) == Complex(0.0, 0.0));
    CHECK(tile_gain(ch, s, 1, 1.0) == ch.cascade(1));
    for (double theta : {0.3, 1.7, 4.0})
      CHECK(std::abs(tile_gain(ch, s, 1, std::polar(1.0, -theta))) == doctest::Approx(std::abs(ch.cascade(1))));
    CHECK_THROWS_AS(tile_gain(ch, s, 9, 1.0), std::out_of_range);
  }

  TEST_CASE("bad inputs are rejected") {
    const Scene s = full_scene({4, 6, 0});
    CHECK_THROWS_AS(realize_channel(s, 0.0, MultipathConfig{}), std::invalid_argument);
    MultipathConfig bad;
    bad.excess_min_m = 0.0;
    CHECK_THROWS_AS(realize_channel(s, kLambda, bad), std::invalid_argument);
  }
}
