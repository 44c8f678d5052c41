#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "sobext/whitney.hpp"

using namespace sobext;

namespace {

// Independent verifier: boundary faces listed explicitly, distances by
// exhaustive box-to-box gaps, all predicates in integer cell units.
struct Oracle {
  struct Box {
    std::int64_t lo[3], hi[3];
  };
  std::vector<Box> faces;
  const VoxelDomain& dom;

  explicit Oracle(const VoxelDomain& d) : dom(d) {
    const Grid& g = d.grid;
    const int kr = g.dim == 3 ? 1 : 0;
    for (int k = -kr; k < g.size[2]; ++k)
      for (int j = -1; j < g.size[1]; ++j)
        for (int i = -1; i < g.size[0]; ++i) {
          const Idx3 c{i, j, k};
          const bool here = d.in(c);
          for (int a = 0; a < g.dim; ++a) {
            Idx3 up = c;
            ++up[a];
            bool inside_pair = true;
            for (int b = 0; b < g.dim; ++b)
              if (b != a && (c[b] < 0 || c[b] >= g.size[b])) inside_pair = false;
            if (!inside_pair || (c[a] < 0 && up[a] < 0)) continue;
            if (d.in(up) == here) continue;
            Box f;
            for (int b = 0; b < 3; ++b) {
              f.lo[b] = c[b];
              f.hi[b] = c[b] + 1;
            }
            f.lo[a] = f.hi[a] = c[a] + 1;
            if (g.dim == 2) f.lo[2] = 0, f.hi[2] = 1;
            faces.push_back(f);
          }
        }
  }

  std::int64_t dist_sq(const Idx3& lo, std::int64_t s) const {
    std::int64_t best = INT64_MAX;
    for (const Box& f : faces) {
      std::int64_t d = 0;
      for (int a = 0; a < dom.grid.dim; ++a) {
        const std::int64_t gap = std::max<std::int64_t>({0, f.lo[a] - (lo[a] + s), lo[a] - f.hi[a]});
        d += gap * gap;
      }
      best = std::min(best, d);
    }
    return best;
  }

  bool inside(const Idx3& lo, std::int64_t s) const {
    const int kmax = dom.grid.dim == 3 ? static_cast<int>(s) : 1;
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j < s; ++j)
        for (int i = 0; i < s; ++i)
          if (!dom.in({lo[0] + i, lo[1] + j, lo[2] + k})) return false;
    return true;
  }
};

bool touches(const WhitneyDecomposition& dec, int a, int b) {
  const Idx3 la = dec.lo_cell(a), lb = dec.lo_cell(b);
  const std::int64_t sa = dec.side_cells(a), sb = dec.side_cells(b);
  for (int ax = 0; ax < dec.grid.dim; ++ax)
    if (la[ax] > lb[ax] + sb || lb[ax] > la[ax] + sa) return false;
  return true;
}

void exhaustive_check(const VoxelDomain& dom, const WhitneyDecomposition& dec) {
  const Oracle oracle(dom);
  const int n = dom.grid.dim;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const Idx3 lo = dec.lo_cell(static_cast<int>(i));
    const std::int64_t s = dec.side_cells(static_cast<int>(i));
    REQUIRE(oracle.inside(lo, s));
    const std::int64_t d2 = oracle.dist_sq(lo, s);
    CHECK(d2 >= s * s);
    CHECK(d2 <= 16 * n * s * s);
    std::int64_t vol = 1;
    for (int a = 0; a < n; ++a) vol *= s;
    covered += static_cast<std::size_t>(vol);
  }
  CHECK(covered + dec.collar_cells == dom.count());
  for (std::size_t a = 0; a < dec.cubes.size(); ++a)
    for (std::size_t b = a + 1; b < dec.cubes.size(); ++b) {
      if (!touches(dec, static_cast<int>(a), static_cast<int>(b))) continue;
      const double r = dec.side(static_cast<int>(a)) / dec.side(static_cast<int>(b));
      CHECK(r >= 0.25);
      CHECK(r <= 4.0);
    }
}

}  // namespace

TEST_CASE("square decomposition passes the exhaustive verifier") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 6);
  const WhitneyDecomposition dec = whitney_decompose(sq, 6);
  exhaustive_check(sq, dec);
  CHECK(audit_whitney(dec, sq).ok());
  CHECK(dec.collar_cells > 0);
}

TEST_CASE("exhaustive verifier on the other generators") {
  for (const char* tag : {"ball", "slit_square", "outward_cusp", "snowflake_approx:iter=2"}) {
    const VoxelDomain dom = build_domain(GeneratorSpec::parse(tag), 6);
    const WhitneyDecomposition dec = whitney_decompose(dom);
    exhaustive_check(dom, dec);
    CHECK(audit_whitney(dec, dom).ok());
  }
  const VoxelDomain ball3 = build_domain(GeneratorSpec::parse("ball:dim=3"), 4);
  const WhitneyDecomposition dec3 = whitney_decompose(ball3);
  exhaustive_check(ball3, dec3);
}

TEST_CASE("truncation coarser than the grid leaves a thicker collar") {
  const VoxelDomain dom = build_domain(GeneratorSpec::parse("ball"), 7);
  const WhitneyDecomposition fine = whitney_decompose(dom, 7);
  const WhitneyDecomposition coarse = whitney_decompose(dom, 5);
  CHECK(coarse.collar_cells > fine.collar_cells);
  CHECK(audit_whitney(coarse, dom).ok());
  const DistanceField df = distance_transform(dom);
  // Collar cells sit within 4 sqrt(n) 2^-L of the boundary.
  for (std::size_t idx = 0; idx < coarse.collar.size(); ++idx)
    if (coarse.collar[idx])
      CHECK(df.center(dom.grid.coords(idx)) <= 4 * std::sqrt(2.0) * std::ldexp(1.0, -5) + dom.grid.h());
}

TEST_CASE("slab decomposition is periodic in x") {
  const VoxelDomain slab = build_domain(GeneratorSpec::parse("slab"), 6);
  const WhitneyDecomposition dec = whitney_decompose(slab);
  CHECK(audit_whitney(dec, slab).ok());
  const Grid& g = dec.grid;
  // Level of the covering cube depends on y only.
  for (int j = 0; j < g.size[1]; ++j) {
    const int first = dec.label[g.index(0, j, 0)];
    const int level = first < 0 ? -1 : dec.cubes[first].level;
    for (int i = 0; i < g.size[0]; ++i) {
      const int id = dec.label[g.index(i, j, 0)];
      REQUIRE((id < 0 ? -1 : dec.cubes[id].level) == level);
    }
  }
}

TEST_CASE("ball level counts grow like 2^k") {
  for (int K : {9, 10}) {
    const VoxelDomain ball = build_domain(GeneratorSpec::parse("ball"), K);
    const WhitneyDecomposition dec = whitney_decompose(ball);
    const auto hist = level_histogram(dec);
    // Least squares slope of log2(count) over the three finest levels.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = K - 2; k <= K; ++k) {
      const double y = std::log2(static_cast<double>(hist[k]));
      sx += k;
      sy += y;
      sxx += k * k;
      sxy += k * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.15));
  }
}

TEST_CASE("exterior decomposition of the square") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 5);
  const int margin = 2 << 5;
  const WhitneyDecomposition ext = exterior_whitney(sq, margin);
  const VoxelDomain comp = exterior_domain(sq, margin);
  CHECK(audit_whitney(ext, comp).ok());
  exhaustive_check(comp, ext);
  CHECK(std::count(ext.synthetic.begin(), ext.synthetic.end(), 1) > 0);
  // Mirror symmetry of the cube set about x = 1/2.
  std::set<std::array<std::int64_t, 3>> cubes;
  for (const auto& q : ext.cubes) cubes.insert({q.level, q.index[0], q.index[1]});
  for (const auto& q : ext.cubes) {
    const std::int64_t mirrored = (std::int64_t{1} << q.level) - 1 - q.index[0];
    CHECK(cubes.count({q.level, mirrored, q.index[1]}) == 1);
  }
}

TEST_CASE("face pairs and export") {
  const VoxelDomain sq = build_domain(GeneratorSpec::parse("cube"), 4);
  const WhitneyDecomposition dec = whitney_decompose(sq);
  for (const auto& [a, b] : dec.face_pairs) CHECK(dyadic::shares_face(dec.cubes[a], dec.cubes[b]));
  for (const auto& [a, b] : dec.touch_pairs) CHECK(dyadic::touches(dec.cubes[a], dec.cubes[b]));
  CHECK(dec.touch_pairs.size() > dec.face_pairs.size());
  const std::string text = whitney_text(dec);
  CHECK(text.rfind("whitney 2 4 4 ", 0) == 0);
  CHECK(whitney_svg(dec).find("<rect") != std::string::npos);
}
