#include <cmath>
#include <random>

#include "doctest.h"
#include "sobext/curves.hpp"
#include "sobext/errors.hpp"

using namespace sobext;

namespace {

// Omega = {y > 0} on [-1/4, 1/4] x [-5/4, 1/4].
VoxelDomain half_plane(int k) {
  Grid g;
  g.dim = 2;
  g.level = k;
  const int n = 1 << k;
  g.origin = {-n / 4, -5 * n / 4, 0};
  g.size = {n / 2, 3 * n / 2, 1};
  std::vector<std::uint8_t> occ(g.cells());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = g.center(g.coords(i))[1] > 0;
  return make_domain(g, occ, "half_plane");
}

VoxelDomain random_domain(int n, std::mt19937& rng) {
  Grid g;
  g.dim = 2;
  g.level = 5;
  g.size = {n, n, 1};
  std::bernoulli_distribution b(0.35);
  std::vector<std::uint8_t> occ(g.cells());
  for (auto& v : occ) v = b(rng);
  return make_domain(g, occ, "random");
}

std::vector<double> bellman_ford(const GeodesicSolver& s, std::size_t src, std::size_t n) {
  std::vector<double> d(n, std::numeric_limits<double>::infinity());
  d[src] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (!std::isfinite(d[u])) continue;
      for (const auto& [v, w] : s.neighbors(u))
        if (d[u] + w < d[v]) {
          d[v] = d[u] + w;
          changed = true;
        }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("vertical segment below a half plane") {
  const VoxelDomain dom = half_plane(10);
  const DistanceField df = distance_transform(dom);
  const GeodesicSolver s(dom, df, {Side::Complement, 1.5, WeightKind::Power});
  const GeodesicPath p = s.solve({0, -0.25, 0}, {0, -1, 0});
  CHECK(std::abs(p.cost - 1.0) < 0.05);
  CHECK(p.length == doctest::Approx(0.75).epsilon(0.01));
  // Scale covariance at lambda = 1/2.
  const GeodesicPath q = s.solve({0, -0.125, 0}, {0, -0.5, 0});
  CHECK(std::abs(q.cost / p.cost / std::pow(0.5, 0.5) - 1) < 0.03);
  // Refinement changes the cost by at most 2 percent.
  const VoxelDomain coarse = half_plane(9);
  const DistanceField dc = distance_transform(coarse);
  const GeodesicSolver sc(coarse, dc, {Side::Complement, 1.5, WeightKind::Power});
  CHECK(std::abs(sc.solve({0, -0.25, 0}, {0, -1, 0}).cost / p.cost - 1) < 0.02);
}

TEST_CASE("Dijkstra equals Bellman-Ford") {
  std::mt19937 rng(99);
  for (int t = 0; t < 6; ++t) {
    const VoxelDomain dom = random_domain(t < 3 ? 32 : 64, rng);
    const DistanceField df = distance_transform(dom);
    for (GeodesicOptions opt : {GeodesicOptions{Side::Complement, 1.5, WeightKind::Power},
                                GeodesicOptions{Side::Interior, 1.25, WeightKind::Power},
                                GeodesicOptions{Side::Complement, 1.0, WeightKind::Power},
                                GeodesicOptions{Side::Interior, 1.5, WeightKind::InverseDistance}}) {
      const GeodesicSolver s(dom, df, opt);
      std::size_t src = 0;
      while (!s.on_side(src)) ++src;
      const auto dj = s.costs_from(src);
      const auto bf = bellman_ford(s, src, dom.grid.cells());
      for (std::size_t v = 0; v < dj.size(); ++v) REQUIRE(dj[v] == bf[v]);
    }
  }
}

TEST_CASE("geodesic edge cases") {
  const VoxelDomain dom = half_plane(6);
  const DistanceField df = distance_transform(dom);
  const GeodesicSolver s(dom, df, {Side::Complement, 1.5, WeightKind::Power});
  const GeodesicPath e = s.solve({0, -0.5, 0}, {0, -0.5, 0});
  CHECK(e.cost == 0);
  CHECK(e.points.size() == 1);
  CHECK_THROWS_AS(GeodesicSolver(dom, df, {Side::Complement, 2.0, WeightKind::Power}), Error);

  // Two separate complement pockets.
  Grid g;
  g.dim = 2;
  g.level = 4;
  g.size = {16, 16, 1};
  std::vector<std::uint8_t> occ(g.cells(), 1);
  occ[g.index(3, 3, 0)] = occ[g.index(12, 12, 0)] = 0;
  const VoxelDomain pockets = make_domain(g, occ, "pockets");
  const DistanceField dp = distance_transform(pockets);
  const GeodesicSolver sp(pockets, dp, {Side::Complement, 1.5, WeightKind::Power});
  try {
    sp.solve(g.center({3, 3, 0}), g.center({12, 12, 0}));
    CHECK(false);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Unreachable);
  }
}

TEST_CASE("unit weight bars boundary cells") {
  const VoxelDomain dom = half_plane(6);
  const DistanceField df = distance_transform(dom);
  const GeodesicSolver s(dom, df, {Side::Complement, 1.0, WeightKind::Power});
  const double h = dom.grid.h();
  // Endpoints in the barred row still connect, through the row below.
  const GeodesicPath p = s.solve({-0.125, -h / 2, 0}, {0.125, -h / 2, 0});
  for (std::size_t k = 1; k + 1 < p.points.size(); ++k) {
    const Idx3 c = dom.grid.cell_of(p.points[k]);
    if (k > 1 && k + 2 < p.points.size()) CHECK(s.admissible(dom.grid.index(c)));
  }
  CHECK(p.cost > 0.25);
  CHECK(p.cost == doctest::Approx(p.length));
}

TEST_CASE("triangle inequality through a waypoint") {
  const VoxelDomain dom = build_domain(GeneratorSpec::parse("ball:r=0.3"), 7);
  const DistanceField df = distance_transform(dom);
  const GeodesicSolver s(dom, df, {Side::Complement, 1.5, WeightKind::Power});
  const Vec3 a{0.2, 0.5, 0}, b{0.5, 0.85, 0}, c{0.8, 0.5, 0};
  const double h = dom.grid.h();
  const double edge = 2 * std::sqrt(2.0) * h * std::pow(h / 2, -0.5);
  CHECK(s.solve(a, c).cost <= s.solve(a, b).cost + s.solve(b, c).cost + edge);
}

TEST_CASE("disk geodesics scale like separation^(2-p)") {
  ScanOptions opt;
  std::vector<double> cost;
  for (double r : {0.2, 0.4}) {
    GeneratorSpec spec = GeneratorSpec::parse("ball");
    spec.params["r"] = r;
    const VoxelDomain dom = build_domain(spec, 8);
    CurvePair cp;
    cp.z1 = {0.5 - r, 0.5, 0};
    cp.z2 = {0.5 + r, 0.5, 0};
    cp.separation = 2 * r;
    cost.push_back(evaluate_pairs(dom, {cp}, opt).pairs[0].cost);
  }
  CHECK(std::isfinite(cost[0]));
  CHECK(std::abs(cost[1] / cost[0] / std::pow(2.0, 0.5) - 1) < 0.1);
}

TEST_CASE("curve condition scan on a disk") {
  const VoxelDomain dom = build_domain(GeneratorSpec::parse("ball"), 7);
  ScanOptions opt;
  opt.pairs_per_scale = 4;
  const auto rep = curve_condition_scan(dom, opt);
  REQUIRE(rep.scales.size() >= 3);
  const auto [lo, hi] = std::minmax_element(rep.scale_max.begin(), rep.scale_max.end());
  CHECK(*hi / *lo <= 4);
  for (const auto& cp : rep.pairs) CHECK(cp.ratio >= 0);
  CHECK(rep.sup_ratio == *hi);
}

TEST_CASE("cusp channel ratios grow at fine scales") {
  const auto rep = cusp_scan(2, 1.5, {0.0625, 0.03125, 0.015625}, 4);
  REQUIRE(rep.pairs.size() == 3);
  CHECK(rep.pairs[1].ratio > rep.pairs[0].ratio);
  CHECK(rep.pairs[2].ratio > 1.2 * rep.pairs[1].ratio);
  CHECK_THROWS_AS(cusp_scan(2, 1.5, {0.25}), Error);
}

TEST_CASE("cig constants") {
  const VoxelDomain disk = build_domain(GeneratorSpec::parse("ball"), 7);
  const DistanceField dd = distance_transform(disk);
  const double e = 2 * disk.grid.h();
  const CigReport c = cig_check(disk, dd, {e, 0.5, 0}, {1 - e, 0.5, 0});
  CHECK(c.cig_d <= 2);
  CHECK(c.cig_l >= c.cig_d);
  const CigReport same = cig_check(disk, dd, {0.5, 0.5, 0}, {0.5, 0.5, 0});
  CHECK(same.cig_d == 0);
  CHECK(same.cig_l == 0);
  // Opposite slit banks at distance s from the tip: the slit is
  // self-similar about its tip, so the constants do not depend on s.
  const VoxelDomain slit = build_domain(GeneratorSpec::parse("slit_square"), 8);
  const DistanceField ds = distance_transform(slit);
  std::vector<double> cd;
  for (double s : {0.2, 0.1, 0.05}) {
    const CigReport r = cig_check(slit, ds, {0.5 - s, 0.5 + s / 4, 0}, {0.5 - s, 0.5 - s / 4, 0});
    CHECK(r.path.length > 2 * s);
    cd.push_back(r.cig_d);
  }
  for (double v : cd) CHECK(std::abs(v / cd[0] - 1) < 0.15);
}

TEST_CASE("John constants") {
  const VoxelDomain disk = build_domain(GeneratorSpec::parse("ball"), 7);
  const DistanceField dd = distance_transform(disk);
  const JohnReport jd = john_check(disk, dd, {0.5, 0.5, 0}, 48);
  CHECK(jd.samples.size() == 48);
  CHECK(jd.j <= 1.5);
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 7);
  const DistanceField ds = distance_transform(sq);
  const JohnReport corner = john_check_points(sq, ds, {0.5, 0.5, 0}, {{0, 0, 0}});
  CHECK(corner.j <= 3);
  CHECK(john_check(sq, ds, {0.5, 0.5, 0}, 32).j <= 3);
  CHECK_THROWS_AS(john_check(sq, ds, {1.5, 0.5, 0}, 4), Error);
  // The cusp generator removes a thin spike from the square; the domain
  // itself stays John near the tip.
  std::vector<double> j;
  for (int k : {7, 8}) {
    const VoxelDomain cusp = build_domain(GeneratorSpec::parse("outward_cusp"), k);
    j.push_back(john_check(cusp, distance_transform(cusp), {0.5, 0.25, 0}, 32).j);
  }
  CHECK(std::abs(j[1] / j[0] - 1) < 0.1);
}

TEST_CASE("path export") {
  const VoxelDomain dom = half_plane(5);
  const DistanceField df = distance_transform(dom);
  const GeodesicSolver s(dom, df, {Side::Complement, 1.5, WeightKind::Power});
  const std::string svg = path_svg({s.solve({0, -0.25, 0}, {0.1, -1, 0})}, dom);
  CHECK(svg.find("<path") != std::string::npos);
}
