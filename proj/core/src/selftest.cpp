#include "nfloc/selftest.hpp"

#include <random>
#include <sstream>

#include "nfloc/crb.hpp"
#include "nfloc/spectrum.hpp"
#include "nfloc/spl.hpp"
#include "nfloc/tdoa.hpp"

namespace nfloc {

namespace {

using Rng = std::mt19937_64;

Vec3 uniform_in(Rng& rng, const Vec3& lo, const Vec3& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {lo.x() + u(rng) * (hi.x() - lo.x()), lo.y() + u(rng) * (hi.y() - lo.y()),
          lo.z() + u(rng) * (hi.z() - lo.z())};
}

LabelMap exact_labels(const Scene& scene) {
  LabelMap m;
  for (TileIndex k = 0; k < scene.tile_count(); ++k) m.add(toa(scene, k), k);
  return m;
}

SelftestCheck discriminant_equivalence(Rng& rng) {
  std::size_t agree = 0, used = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 bs = uniform_in(rng, {-5, -5, -5}, {15, 15, 5});
    const Vec3 p = uniform_in(rng, {-5, -5, -5}, {15, 15, 5});
    const Scene s = scene_from_points({uniform_in(rng, {0, 0, 0}, {10, 10, 3}),
                                       uniform_in(rng, {0, 0, 0}, {10, 10, 3})},
                                      bs, Vec3::Zero());
    const Discriminant d = build_discriminant(s, 0, 1);
    if (d.degenerate) continue;
    ++used;
    agree += in_region(p, bs, s.tile_center(d.k1), s.tile_center(d.k2)) == explicit_region(d, p);
  }
  std::ostringstream os;
  os << agree << "/" << used << " non-degenerate draws agree";
  return {"discriminant equivalence", agree == used, os.str()};
}

SelftestCheck noiseless_inversion(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    std::vector<Vec3> tiles;
    for (int k = 0; k < 8; ++k) tiles.push_back(uniform_in(rng, {0, 0, 0.5}, {10, 10, 3}));
    const Scene s = scene_from_points(tiles, uniform_in(rng, {0, 0, 0}, {10, 10, 3}),
                                      uniform_in(rng, {0, 0, 0}, {10, 10, 0}), 3e-7);
    const Vec3 est = solve_position(build_system(exact_labels(s), s.tile_centers(), s.p_bs));
    worst = std::max(worst, (est - s.p_ue).norm());
  }
  std::ostringstream os;
  os << "worst error " << worst << " m";
  return {"noiseless inversion", worst < 1e-6, os.str()};
}

SelftestCheck collinear_inversion() {
  const Scene s = build_scene(RisLayout{}, {0, 5, 2}, {5, 5, 0}, 1e-7, 0.0, kSpeedOfLight / 28e9);
  const Vec3 est = solve_position(build_system(exact_labels(s), s.tile_centers(), s.p_bs));
  std::ostringstream os;
  os << "error " << (est - s.p_ue).norm() << " m";
  return {"collinear ground fallback", (est - s.p_ue).norm() < 1e-4, os.str()};
}

SelftestCheck labeling_at_truth(Rng& rng) {
  std::size_t perfect = 0;
  const int scenes = 100;
  for (int i = 0; i < scenes; ++i) {
    RisLayout layout{16, 0.4, {5, 10, 2}, {1, 0, 0}, 1, 1};
    const Vec3 ue = uniform_in(rng, {0, 0, 0}, {10, 9.5, 0});
    const Scene s = build_scene(layout, {0, 5, 2}, ue, 2e-7, 0.0, 0.01);
    const PspAssignment a = assign(16, 8, 4);
    ToaGroups groups;
    const auto toas = all_toas(s);
    for (const auto& [psp, tiles] : a.groups) {
      ToaGroup g;
      g.psp = psp;
      g.tiles = tiles;
      for (TileIndex k : tiles) g.toas.push_back(toas[k]);
      std::sort(g.toas.rbegin(), g.toas.rend());
      groups.groups.push_back(g);
    }
    SplOptions opt;
    opt.fixed_estimate = ue;
    const SplResult r = run_spl(groups, s, opt);
    bool ok = r.labels.complete;
    for (const auto& e : r.labels.entries) ok = ok && e.toa == toas[e.tile];
    perfect += ok;
  }
  std::ostringstream os;
  os << perfect << "/" << scenes << " scenes labeled perfectly";
  return {"labeling at true position", perfect == static_cast<std::size_t>(scenes), os.str()};
}

SelftestCheck gradient_check(Rng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = uniform_in(rng, {0, 0, 0}, {10, 9, 0});
    const Vec3 pk = uniform_in(rng, {0, 9.5, 1}, {10, 10, 3});
    const Vec3 pr = uniform_in(rng, {0, 9.5, 1}, {10, 10, 3});
    const Vec3 g = tdoa_gradient(p, pk, pr);
    const double h = 1e-4;
    Vec3 fd;
    for (int c = 0; c < 3; ++c) {
      Vec3 up = p, dn = p;
      up(c) += h;
      dn(c) -= h;
      auto mu = [&](const Vec3& q) { return ((q - pk).norm() - (q - pr).norm()) / kSpeedOfLight; };
      fd(c) = (mu(up) - mu(dn)) / (2 * h);
    }
    worst = std::max(worst, (fd - g).norm() / g.norm());
  }
  std::ostringstream os;
  os << "worst relative error " << worst;
  return {"TDoA gradient", worst < 1e-6, os.str()};
}

SelftestCheck spectrum_paths(Rng& rng) {
  WaveformConfig cfg;
  cfg.n_subcarriers = 64;
  cfg.l_frames = 8;
  cfg.noise_psd = 1e-15;
  const Scene s = build_scene(RisLayout{8, 0.8, {5, 10, 2}, {1, 0, 0}, 1, 1}, {0, 5, 2},
                              uniform_in(rng, {1, 1, 0}, {9, 9, 0}), 1e-7, 0.3, cfg.wavelength());
  ComplexVector cascade = ComplexVector::Ones(8);
  const FrameMatrix f = synthesize_frames(s, cascade, assign(8, 8, 4), cfg, rng());
  const SpectrumMap a = spectrum_2d(f, 2, SpectrumMethod::fast);
  const SpectrumMap b = spectrum_2d(f, 2, SpectrumMethod::dense);
  const double rel = (a.grid - b.grid).norm() / b.grid.norm();
  std::ostringstream os;
  os << "relative difference " << rel;
  return {"spectrum fast vs dense", rel < 1e-9, os.str()};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SelftestCheck> out;
  out.push_back(discriminant_equivalence(rng));
  out.push_back(noiseless_inversion(rng));
  out.push_back(collinear_inversion());
  out.push_back(labeling_at_truth(rng));
  out.push_back(gradient_check(rng));
  out.push_back(spectrum_paths(rng));
  return out;
}

}  // namespace nfloc
