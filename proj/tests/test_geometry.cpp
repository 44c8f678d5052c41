#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "sobext/cantor.hpp"
#include "sobext/distance.hpp"
#include "sobext/domain.hpp"
#include "sobext/dyadic.hpp"
#include "sobext/errors.hpp"

using namespace sobext;

namespace {

// O(N^2) oracle: squared lattice distance to the nearest site.
std::vector<std::uint32_t> brute_edt(const std::vector<std::uint8_t>& sites, Idx3 size,
                                     std::array<bool, 3> periodic) {
  std::vector<Idx3> pts;
  for (int k = 0; k < size[2]; ++k)
    for (int j = 0; j < size[1]; ++j)
      for (int i = 0; i < size[0]; ++i)
        if (sites[(static_cast<std::size_t>(k) * size[1] + j) * size[0] + i]) pts.push_back({i, j, k});
  std::vector<std::uint32_t> out(sites.size(), kInfSq);
  std::size_t idx = 0;
  for (int k = 0; k < size[2]; ++k)
    for (int j = 0; j < size[1]; ++j)
      for (int i = 0; i < size[0]; ++i, ++idx) {
        const Idx3 c{i, j, k};
        for (const auto& p : pts) {
          std::uint32_t d = 0;
          for (int a = 0; a < 3; ++a) {
            int g = std::abs(c[a] - p[a]);
            if (periodic[a]) g = std::min(g, size[a] - g);
            d += static_cast<std::uint32_t>(g * g);
          }
          out[idx] = std::min(out[idx], d);
        }
      }
  return out;
}

VoxelDomain random_domain(int n, unsigned seed, double density) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution in(density);
  Grid g;
  g.dim = 2;
  g.level = 5;
  g.size = {n, n, 1};
  std::vector<std::uint8_t> occ(g.cells());
  for (auto& v : occ) v = in(rng);
  occ[0] = 1;
  return make_domain(g, occ, "random");
}

}  // namespace

TEST_CASE("edt matches brute force, open and periodic") {
  std::mt19937 rng(7);
  for (Idx3 size : {Idx3{32, 32, 1}, Idx3{11, 9, 7}, Idx3{40, 1, 1}}) {
    for (auto periodic : {std::array<bool, 3>{false, false, false},
                          std::array<bool, 3>{true, false, true}}) {
      std::vector<std::uint8_t> sites(static_cast<std::size_t>(size[0]) * size[1] * size[2]);
      std::bernoulli_distribution pick(0.03);
      for (auto& s : sites) s = pick(rng);
      const auto want = brute_edt(sites, size, periodic);
      CHECK(edt_sq(sites, size, periodic, Exec::Serial) == want);
      CHECK(edt_sq(sites, size, periodic, Exec::Parallel) == want);
    }
  }
  const std::vector<std::uint8_t> none(64, 0);
  for (auto v : edt_sq(none, {8, 8, 1})) CHECK(v == kInfSq);
}

TEST_CASE("distance field equals brute force over face centroids") {
  const VoxelDomain dom = random_domain(32, 3, 0.7);
  const DistanceField df = distance_transform(dom);
  std::vector<std::array<int, 2>> centroids;  // half-spacing units
  const Grid& g = dom.grid;
  for (int j = -1; j < 32; ++j)
    for (int i = -1; i < 32; ++i) {
      const bool here = dom.in({i, j, 0});
      if (i >= 0 || j >= 0) {
        if (j >= 0 && here != dom.in({i + 1, j, 0})) centroids.push_back({2 * i + 2, 2 * j + 1});
        if (i >= 0 && here != dom.in({i, j + 1, 0})) centroids.push_back({2 * i + 1, 2 * j + 2});
      }
    }
  CHECK(centroids.size() == dom.boundary_face_count());
  for (std::size_t idx = 0; idx < g.cells(); ++idx) {
    const Idx3 c = g.coords(idx);
    std::uint32_t best = kInfSq;
    for (const auto& p : centroids) {
      const int dx = 2 * c[0] + 1 - p[0], dy = 2 * c[1] + 1 - p[1];
      best = std::min<std::uint32_t>(best, dx * dx + dy * dy);
    }
    REQUIRE(df.center_sq(c) == best);
  }
}

TEST_CASE("distance at symmetric centers") {
  const VoxelDomain square = build_domain(GeneratorSpec::parse("cube"), 6);
  const DistanceField ds = distance_transform(square);
  CHECK(std::abs(ds.center({32, 32, 0}) - 0.5) <= square.grid.h());
  const VoxelDomain ball = build_domain(GeneratorSpec::parse("ball:r=0.5"), 7);
  const DistanceField db = distance_transform(ball);
  CHECK(std::abs(db.center({64, 64, 0}) - 0.5) <= ball.grid.h());
}

TEST_CASE("vertex field gives box-to-boundary distance") {
  const VoxelDomain dom = random_domain(16, 11, 0.8);
  const DistanceField dv = vertex_distance(dom);
  const Grid& g = dom.grid;
  // Boundary faces as boxes in cell units.
  struct Box {
    int lo[2], hi[2];
  };
  std::vector<Box> faces;
  for (int j = -1; j < 16; ++j)
    for (int i = -1; i < 16; ++i) {
      const bool here = dom.in({i, j, 0});
      if (j >= 0 && here != dom.in({i + 1, j, 0})) faces.push_back({{i + 1, j}, {i + 1, j + 1}});
      if (i >= 0 && here != dom.in({i, j + 1, 0})) faces.push_back({{i, j + 1}, {i + 1, j + 1}});
    }
  for (int side : {1, 2, 4}) {
    for (int j = 0; j + side <= 16; j += side)
      for (int i = 0; i + side <= 16; i += side) {
        int best = 1 << 30;
        for (const auto& f : faces) {
          int d = 0;
          const int qlo[2] = {i, j}, qhi[2] = {i + side, j + side};
          for (int a = 0; a < 2; ++a) {
            const int gap = std::max({0, f.lo[a] - qhi[a], qlo[a] - f.hi[a]});
            d += gap * gap;
          }
          best = std::min(best, d);
        }
        std::uint32_t got = kInfSq;
        for (int y = j; y <= j + side; ++y)
          for (int x = i; x <= i + side; ++x) got = std::min(got, dv.vertex_sq({x, y, 0}));
        REQUIRE(got == static_cast<std::uint32_t>(4 * best));
      }
  }
  (void)g;
}

TEST_CASE("periodic slab distance is the gap to the two planes") {
  const VoxelDomain slab = build_domain(GeneratorSpec::parse("slab"), 4);
  CHECK(slab.grid.size[0] == 32);
  CHECK(slab.boundary_face_count() == 64);
  const DistanceField df = distance_transform(slab);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 16; ++j) {
      const double y = (j + 0.5) / 16;
      CHECK(df.center({i, j, 0}) == doctest::Approx(std::min(y, 1 - y)));
    }
}

TEST_CASE("generators") {
  const VoxelDomain cube = build_domain(GeneratorSpec::parse("cube"), 4);
  CHECK(cube.count() == 256);
  CHECK(cube.boundary_face_count() == 64);
  CHECK(cube.connected);

  const VoxelDomain ball6 = build_domain(GeneratorSpec::parse("ball:r=0.5"), 6);
  CHECK(std::abs(ball6.measure() - M_PI / 4) <= 0.02 * M_PI / 4);
  const VoxelDomain ball12 = build_domain(GeneratorSpec::parse("ball:r=0.5"), 12);
  CHECK(std::abs(ball6.measure() - ball12.measure()) <= 0.02 * ball12.measure());

  const VoxelDomain slit = build_domain(GeneratorSpec::parse("slit_square:len=0.5"), 9);
  CHECK(slit.count() == 512u * 512u - 256u);
  CHECK(slit.connected);

  const VoxelDomain cusp = build_domain(GeneratorSpec::parse("outward_cusp:alpha=2"), 8);
  CHECK(cusp.connected);
  CHECK(cusp.measure() == doctest::Approx(1 - 2.0 / 3 * std::pow(0.5, 3)).epsilon(0.01));

  // Koch prefractal area: A_0 (8/5 - 3/5 (4/9)^k) for an equilateral A_0.
  const double r = 0.45, a0 = 3 * std::sqrt(3.0) / 4 * r * r;
  const VoxelDomain flake = build_domain(GeneratorSpec::parse("snowflake_approx:iter=3"), 10);
  CHECK(flake.connected);
  CHECK(flake.measure() ==
        doctest::Approx(a0 * (1.6 - 0.6 * std::pow(4.0 / 9, 3))).epsilon(0.01));

  const VoxelDomain ball3 = build_domain(GeneratorSpec::parse("ball:dim=3"), 5);
  CHECK(ball3.grid.dim == 3);
  CHECK(ball3.measure() == doctest::Approx(M_PI / 6).epsilon(0.03));
}

TEST_CASE("measure changes under refinement within the boundary collar") {
  for (const char* tag : {"ball", "slit_square", "outward_cusp", "snowflake_approx:iter=2"}) {
    const auto spec = GeneratorSpec::parse(tag);
    for (int k = 6; k <= 8; ++k) {
      const VoxelDomain a = build_domain(spec, k), b = build_domain(spec, k + 1);
      const double perimeter = a.boundary_face_count() * a.grid.face_area();
      CHECK(std::abs(a.measure() - b.measure()) <= perimeter * a.grid.h());
    }
  }
}

TEST_CASE("generator errors") {
  Grid g;
  g.size = {4, 4, 1};
  CHECK_THROWS_AS(make_domain(g, std::vector<std::uint8_t>(16, 0), "empty"), Error);
  try {
    build_domain(GeneratorSpec::parse("cantor_tube:depth=1"), 10);
    FAIL("expected ResolutionTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResolutionTooCoarse);
  }
  try {
    build_domain(GeneratorSpec::parse("ball"), 15, BuildLimits{1 << 20});
    FAIL("expected ResourceLimit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceLimit);
  }
  CHECK_THROWS_AS(GeneratorSpec::parse("ball:r"), Error);
  CHECK_THROWS_AS(analytic_set(GeneratorSpec::parse("torus")), Error);
}

TEST_CASE("generator spec round trip") {
  const auto spec = GeneratorSpec::parse("outward_cusp:alpha=2.125,win_x=0.1");
  CHECK(GeneratorSpec::parse(spec.to_string()).params == spec.params);
  CHECK(spec.get("alpha", 0) == 2.125);
}

TEST_CASE("voxd round trip and bit layout") {
  Grid g;
  g.level = 3;
  g.origin = {-2, 1, 0};
  g.size = {5, 2, 1};
  std::vector<std::uint8_t> occ{1, 0, 1, 1, 0, 0, 0, 0, 0, 1};
  const VoxelDomain dom = make_domain(g, occ, "hand");
  const std::string path = "voxd_roundtrip.voxd";
  write_voxd(dom, path);
  const VoxelDomain back = read_voxd(path);
  CHECK(back.grid == dom.grid);
  CHECK(back.occ == dom.occ);
  CHECK(back.name == "hand");
  std::ifstream is(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(is)), {});
  CHECK(text.rfind("VOXD1\n2\n3\n-1/4 1/8\n3/8 3/8\nhand\n", 0) == 0);
  // x fastest, least significant bit first.
  CHECK(static_cast<unsigned char>(text[text.size() - 2]) == 0b00001101);
  CHECK(static_cast<unsigned char>(text[text.size() - 1]) == 0b00000010);
  std::remove(path.c_str());
}

TEST_CASE("cantor closed forms") {
  const CantorTubeSpec s = build_cantor_tube(1);
  CHECK(static_cast<double>(s.l[1]) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(static_cast<double>(s.l[1]) == doctest::Approx(0.183940).epsilon(1e-5));
  CHECK(static_cast<double>(s.e[1]) == doctest::Approx(0.210707).epsilon(1e-5));
  CHECK(static_cast<double>(s.c[0]) == doctest::Approx(0.0263384).epsilon(1e-5));
  CHECK(static_cast<double>(s.c[1]) == doctest::Approx(0.000411537).epsilon(1e-5));
  CHECK(s.cubes[1].size() == 8);
  CHECK(s.curves[1].size() == 8);
  for (const auto& L : s.curves[1]) {
    CHECK(polyline_length(L.vertices) >= 8 * s.c[1]);
    CHECK(L.piece_count() % 2 == 0);
  }
  const CantorAudit a = audit_cantor(s);
  CHECK(a.ok);
  CHECK(a.min_curve_gap_sq_over_c_sq >= 4);
}

TEST_CASE("cantor depth two measure and serialization") {
  const CantorTubeSpec s = build_cantor_tube(2);
  CHECK(static_cast<double>(cantor_measure(s, 2)) == doctest::Approx(std::exp(-4.5)).epsilon(1e-12));
  CHECK(static_cast<double>(cantor_measure(s, 2)) == doctest::Approx(0.0111090).epsilon(1e-5));
  const std::string text = serialize_cantor(s);
  const CantorTubeSpec back = parse_cantor(text);
  CHECK(serialize_cantor(back) == text);
  CHECK(audit_cantor(back).ok);
}

TEST_CASE("cantor audit catches a broken curve") {
  CantorTubeSpec s = build_cantor_tube(1);
  s.curves[1][3].vertices[1][2] += s.c[1] / 3;  // no longer axis-parallel
  const CantorAudit a = audit_cantor(s);
  CHECK_FALSE(a.ok);
  CHECK_THROWS_AS(build_cantor_tube(2, std::vector<double>{0.3, 0.2}), Error);
  CHECK_THROWS_AS(build_cantor_tube(1, std::vector<double>{0.5}), Error);
}

TEST_CASE("tube membership") {
  const CantorTubeSpec s = build_cantor_tube(1);
  const TubeIndex index(s);
  for (const auto& L : s.curves[1]) {
    const RPoint& v = L.vertices[2];
    const Vec3 x{static_cast<double>(v[0]), static_cast<double>(v[1]), static_cast<double>(v[2])};
    CHECK(index.tube_of(x) == std::pair<int, int>{1, L.cube});
  }
  CHECK_FALSE(index.in_tubes({0.01, 0.01, 0.01}));
  CHECK(index.cube_of({0.5, 0.5, 0.5}, 1) == -1);
  const RPoint& lo = s.cubes[1][5].lo;
  CHECK(index.cube_of({static_cast<double>(lo[0]) + 0.01, static_cast<double>(lo[1]) + 0.01,
                       static_cast<double>(lo[2]) + 0.01},
                      1) == 5);
}

TEST_CASE("dyadic predicates") {
  const DyadicCube q{2, 1, {0, 0, 0}};
  const DyadicCube r{2, 2, {2, 1, 0}};
  CHECK(dyadic::touches(q, r));
  CHECK(dyadic::shares_face(q, r));
  const DyadicCube corner{2, 2, {2, 2, 0}};
  CHECK(dyadic::touches(q, corner));
  CHECK_FALSE(dyadic::shares_face(q, corner));
  CHECK(dyadic::contains(q, DyadicCube{2, 2, {1, 1, 0}}));
  CHECK_FALSE(dyadic::interiors_overlap(q, r));
}
