#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "sobext/errors.hpp"
#include "sobext/loops.hpp"
#include "sobext/whitney.hpp"

using namespace sobext;

namespace {

std::vector<std::uint8_t> select(const Grid& g, const std::function<bool(const Vec3&)>& f) {
  std::vector<std::uint8_t> occ(g.cells(), 0);
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = f(g.center(g.coords(i))) ? 1 : 0;
  return occ;
}

std::vector<std::uint8_t> random_occ(const Grid& g, std::mt19937& rng, double density) {
  std::bernoulli_distribution b(density);
  std::vector<std::uint8_t> occ(g.cells());
  for (auto& v : occ) v = b(rng) ? 1 : 0;
  return occ;
}

Grid square_grid(int k, int n) {
  Grid g;
  g.dim = 2;
  g.level = k;
  g.size = {n, n, 1};
  return g;
}

}  // namespace

TEST_CASE("full grid surface") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 5);
  const VoxelSet a = make_set(sq.grid, sq.occ, &sq);
  const auto f = boundary_faces(a);
  CHECK(perimeter_whole(f) == 4.0);
  CHECK(f.on_boundary == f.faces.size());
  const VoxelDomain cu = build_domain(GeneratorSpec::parse("cube:dim=3"), 4);
  CHECK(perimeter_whole(boundary_faces(make_set(cu.grid, cu.occ))) == 6.0);
}

TEST_CASE("half square classes and perimeters") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 6);
  const VoxelSet a = make_set(sq.grid, select(sq.grid, [](const Vec3& x) { return x[1] < 0.5; }), &sq);
  const auto f = boundary_faces(a);
  CHECK(f.interior == 64);
  CHECK(f.exterior == 0);
  // Bottom side plus the lower halves of the vertical sides.
  CHECK(f.on_boundary * f.face_area() == 2.0);
  CHECK(perimeter_in(f) == 1.0);
  CHECK(perimeter_whole(f) == 3.0);
  for (const Face& face : f.faces)
    if (face.cls == FaceClass::Interior) {
      CHECK(face.axis == 1);
      CHECK(f.centroid(face)[1] == 0.5);
    }
  CHECK(perimeter_ball(f, {0.5, 0.5, 0}, 0.25, true) == doctest::Approx(0.5));
  CHECK(perimeter_ball(f, {0.5, 0.5, 0}, 0.25, false) == doctest::Approx(0.5));
}

TEST_CASE("face count matches a neighbor scan") {
  std::mt19937 rng(7);
  const Grid g = square_grid(5, 32);
  for (int t = 0; t < 20; ++t) {
    const auto occ = random_occ(g, rng, 0.45);
    const VoxelSet a = make_set(g, occ);
    std::size_t expect = 0;
    auto at = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < 32 && j < 32 && occ[g.index(i, j, 0)];
    };
    for (int j = -1; j < 32; ++j)
      for (int i = -1; i < 32; ++i) {
        expect += at(i, j) != at(i + 1, j) && j >= 0;
        expect += at(i, j) != at(i, j + 1) && i >= 0;
      }
    const auto serial = boundary_faces(a, nullptr, Exec::Serial);
    const auto parallel = boundary_faces(a, nullptr, Exec::Parallel);
    CHECK(serial.faces.size() == expect);
    CHECK(parallel.faces.size() == expect);
  }
}

TEST_CASE("interface is symmetric under complement inside the grid") {
  std::mt19937 rng(11);
  const Grid g = square_grid(5, 32);
  const auto occ = random_occ(g, rng, 0.5);
  auto inv = occ;
  for (auto& v : inv) v = !v;
  auto inner = [&](const BoundaryFaceSet& f) {
    std::set<std::tuple<int, int, int>> s;
    for (const Face& face : f.faces) {
      Idx3 d = face.cell;
      ++d[face.axis];
      if (g.contains(face.cell) && g.contains(d)) s.insert({face.axis, face.cell[0], face.cell[1]});
    }
    return s;
  };
  CHECK(inner(boundary_faces(make_set(g, occ))) == inner(boundary_faces(make_set(g, inv))));
}

TEST_CASE("digitized disk perimeter is the l1 perimeter") {
  for (int k : {8, 9}) {
    const VoxelDomain d = build_domain(GeneratorSpec::parse("ball:r=0.4"), k);
    const double per = perimeter_whole(boundary_faces(make_set(d.grid, d.occ)));
    CHECK(std::abs(per / (4 * 0.8) - 1) < 0.03);
  }
}

TEST_CASE("weighted integral along the mid line") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 10);
  const VoxelSet a = make_set(sq.grid, select(sq.grid, [](const Vec3& x) { return x[1] < 0.5; }), &sq);
  const auto f = boundary_faces(a);
  const DistanceField dist = distance_transform(sq);
  const WeightedIntegral w = weighted_boundary_integral(f, dist, 1.5);
  CHECK(std::abs(w.interior / (2 * std::sqrt(2.0)) - 1) < 0.05);
  CHECK(w.exterior == 0);
  CHECK(w.touching_faces == f.on_boundary);
  CHECK(w.touching == doctest::Approx(2.0));
  const WeightedIntegral ws = weighted_boundary_integral(f, dist, 1.5);
  CHECK(ws.finite == w.finite);
  CHECK_THROWS_AS(weighted_boundary_integral(f, dist, 2.0), Error);
  try {
    weighted_boundary_integral(f, dist, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedExponent);
  }
}

TEST_CASE("weighted integral of Whitney cubes") {
  for (const char* tag : {"cube", "ball", "cube:dim=3"}) {
    const VoxelDomain dom = build_domain(GeneratorSpec::parse(tag), std::string(tag) == "cube:dim=3" ? 5 : 7);
    const auto dec = whitney_decompose(dom);
    const DistanceField dist = distance_transform(dom);
    const int n = dom.grid.dim;
    const double p = 1.5;
    for (std::size_t i = 0; i < dec.cubes.size(); i += 7) {
      std::vector<std::uint8_t> occ(dom.grid.cells(), 0);
      for (std::size_t c = 0; c < occ.size(); ++c) occ[c] = dec.label[c] == static_cast<int>(i);
      const auto f = boundary_faces(make_set(dom.grid, occ, &dom));
      const double l = dec.side(static_cast<int>(i));
      const double w = weighted_boundary_integral(f, dist, p).finite;
      const double scale = 2 * n * std::pow(l, n - 1);
      CHECK(w >= std::pow(4 * std::sqrt(n) * l, 1 - p) * scale * (1 - 1e-12));
      CHECK(w <= std::pow(l, 1 - p) * scale * (1 + 1e-12));
    }
  }
}

TEST_CASE("weighted integral is monotone in p") {
  for (const char* set : {"half", "disk"}) {
    const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 8);
    auto pred = std::string(set) == "half"
                    ? std::function<bool(const Vec3&)>([](const Vec3& x) { return x[1] < 0.5; })
                    : [](const Vec3& x) { return std::hypot(x[0] - 0.4, x[1] - 0.6) < 0.3; };
    const auto f = boundary_faces(make_set(sq.grid, select(sq.grid, pred), &sq));
    const DistanceField dist = distance_transform(sq);
    double prev = 0;
    for (double p : {1.1, 1.3, 1.5, 1.7, 1.9}) {
      const double w = weighted_boundary_integral(f, dist, p).finite;
      CHECK(w > prev);
      prev = w;
    }
  }
}

TEST_CASE("isoperimetric ratios") {
  for (int n : {2, 3}) {
    Grid g;
    g.dim = n;
    g.level = 4;
    g.size = {32, 16, n == 3 ? 16 : 1};
    const DyadicCube q{n, 0, {0, 0, 0}}, q2{n, 0, {1, 0, 0}};
    const VoxelSet half = make_set(g, select(g, [](const Vec3& x) { return x[0] < 1; }));
    CHECK(isoperimetric_cube_pair(half, q, q2).ratio == doctest::Approx(1.0));
    const VoxelSet tiny = make_set(g, select(g, [](const Vec3& x) {
      return x[0] > 0.25 && x[0] < 0.5 && x[1] > 0.25 && x[1] < 0.5 && (x[2] == 0 || (x[2] > 0.25 && x[2] < 0.5));
    }));
    CHECK(isoperimetric_cube_pair(tiny, q, q2).ratio == doctest::Approx(2.0 * n));
    const DyadicCube far{n, 0, {0, 0, 0}}, diag{n, 1, {2, 2, 0}};
    CHECK_THROWS_AS(isoperimetric_cube_pair(half, far, diag), Error);
    const DyadicCube small{n, 3, {8, 0, 0}};
    CHECK_THROWS_AS(isoperimetric_cube_pair(half, q, small), Error);
  }
}

TEST_CASE("isoperimetric Monte Carlo floor") {
  std::mt19937 rng(2024);
  const Grid g = square_grid(6, 64);
  double worst = 1e300;
  for (int t = 0; t < 500; ++t) {
    const int lev = std::uniform_int_distribution<int>(2, 4)(rng);
    const int span = 1 << lev;
    std::uniform_int_distribution<int> pick(0, span - 2);
    DyadicCube q{2, lev, {pick(rng), pick(rng), 0}};
    DyadicCube q2 = q;
    q2.index[t % 2] += 1;
    const auto occ = random_occ(g, rng, std::uniform_real_distribution<double>(0.05, 0.95)(rng));
    const auto r = isoperimetric_cube_pair(make_set(g, occ), q, q2);
    if (r.inside > 0 && r.outside > 0) worst = std::min(worst, r.ratio);
  }
  CHECK(worst > 0);
  CHECK(worst < 1e300);
}

TEST_CASE("isoperimetric ball form") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 7);
  const VoxelSet a = make_set(sq.grid, select(sq.grid, [](const Vec3& x) { return x[1] < 0.5; }), &sq);
  const auto r = isoperimetric_ball(a, {0.5, 0.5, 0}, 0.25);
  // Chord of length 2r against half a disk.
  CHECK(r.inside == doctest::Approx(r.outside).epsilon(0.02));
  CHECK(r.ratio == doctest::Approx(0.5 / std::sqrt(M_PI * 0.0625 / 2)).epsilon(0.03));
}

TEST_CASE("density profiles") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 8);
  const VoxelSet a = make_set(sq.grid, sq.occ, &sq);
  const double h = sq.grid.h();
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05, 0.02};
  const auto center = density_profile(a, {0.5, 0.5, 0}, radii, DensityBase::Domain);
  for (double v : center.ratios) CHECK(v == 1.0);
  CHECK_FALSE(center.truncated);
  const auto corner = density_profile(a, {0, 0, 0}, radii, DensityBase::Whole);
  CHECK(corner.truncated);
  for (std::size_t k = 0; k < radii.size(); ++k)
    CHECK(std::abs(corner.ratios[k] - 0.25) <= 2 * h / radii[k]);
  const auto flat = density_profile(a, {0.5, 0, 0}, radii, DensityBase::Whole);
  for (std::size_t k = 0; k < radii.size(); ++k)
    CHECK(std::abs(flat.ratios[k] - 0.5) <= 2 * h / radii[k]);
  CHECK_THROWS_AS(density_profile(a, {0.5, 0.5, 0}, {h}, DensityBase::Domain), Error);
  const auto implicit = density_profile_implicit(
      [](const Vec3& x) { return x[0] > 0 && x[1] > 0; }, 2, {0, 0, 0}, radii);
  for (double v : implicit.ratios) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("jordan loops of a disk and an annulus") {
  const Grid g = square_grid(7, 128);
  const auto disk = make_set(g, select(g, [](const Vec3& x) { return std::hypot(x[0] - 0.5, x[1] - 0.5) < 0.3; }));
  const auto dl = jordan_loops(disk);
  REQUIRE(dl.size() == 1);
  CHECK(dl[0].outer());
  CHECK(dl[0].parent == -1);
  const auto ann = make_set(g, select(g, [](const Vec3& x) {
    const double r = std::hypot(x[0] - 0.5, x[1] - 0.5);
    return r < 0.4 && r > 0.2;
  }));
  const auto al = jordan_loops(ann);
  REQUIRE(al.size() == 2);
  const int outer = al[0].outer() ? 0 : 1;
  CHECK(al[outer].outer());
  CHECK_FALSE(al[1 - outer].outer());
  CHECK(al[1 - outer].parent == outer);
  CHECK(al[1 - outer].depth == 1);
  CHECK(loops_svg(al, g).find("<path") != std::string::npos);
}

TEST_CASE("diagonal contacts split loops") {
  const Grid g = square_grid(2, 4);
  std::vector<std::uint8_t> occ(16, 0);
  occ[g.index(1, 1, 0)] = occ[g.index(2, 2, 0)] = 1;
  const auto l = jordan_loops(make_set(g, occ));
  REQUIRE(l.size() == 2);
  for (const auto& loop : l) CHECK(loop.vertices.size() == 4);
  // Ring whose hole meets the outside at one corner: the loops share that
  // vertex, one counter-clockwise and one clockwise.
  std::vector<std::uint8_t> ring(16, 0);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) ring[g.index(i, j, 0)] = !(i == 1 && j == 1) && !(i == 2 && j == 2);
  ring[g.index(3, 3, 0)] = 0;
  const auto r = jordan_loops(make_set(g, ring));
  REQUIRE(r.size() == 2);
  int holes = 0;
  for (const auto& loop : r) holes += !loop.outer();
  CHECK(holes == 1);
}

TEST_CASE("jordan loops of random sets") {
  const Grid g = square_grid(6, 64);
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937 rng(seed);
    const auto occ = random_occ(g, rng, 0.5);
    const VoxelSet a = make_set(g, occ);
    const auto loops = jordan_loops(a);
    std::size_t edges = 0;
    for (const auto& l : loops) {
      edges += l.vertices.size();
      std::set<std::array<int, 2>> seen(l.vertices.begin(), l.vertices.end());
      REQUIRE(seen.size() == l.vertices.size());
      if (l.parent >= 0) CHECK(loops[l.parent].outer() != l.outer());
    }
    REQUIRE(edges == boundary_faces(a).faces.size());
    const auto w = winding_field(loops, g);
    for (std::size_t c = 0; c < occ.size(); ++c) REQUIRE(w[c] == occ[c]);
  }
}
