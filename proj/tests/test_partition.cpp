#include <cmath>
#include <random>

#include "doctest.h"
#include "sobext/errors.hpp"
#include "sobext/partition.hpp"

using namespace sobext;

namespace {

struct Fixture {
  VoxelDomain dom;
  WhitneyDecomposition dec;
  PartitionOfUnity pou;
  Fixture(const char* tag, int k)
      : dom(build_domain(GeneratorSpec::parse(tag), k)), dec(whitney_decompose(dom)), pou(dec) {}

  Vec3 random_covered(std::mt19937& rng) const {
    std::uniform_real_distribution<double> u(0, 1);
    const Vec3 lo = dom.grid.lo(), hi = dom.grid.hi();
    for (;;) {
      Vec3 x{0, 0, 0};
      for (int a = 0; a < dom.grid.dim; ++a) x[a] = lo[a] + u(rng) * (hi[a] - lo[a]);
      if (dec.cube_at(x) >= 0) return x;
    }
  }
};

}  // namespace

TEST_CASE("bump profile") {
  CHECK(bump_profile(0) == 1);
  CHECK(bump_profile(1) == 0);
  CHECK(bump_profile(0.5) == 0.5);
  CHECK(bump_profile(-2) == 1);
  CHECK(bump_profile(3) == 0);
}

TEST_CASE("partition sums to one and is exact at centers") {
  for (const char* tag : {"ball", "slit_square", "snowflake_approx:iter=2"}) {
    Fixture f(tag, 7);
    std::mt19937 rng(12345);
    for (int t = 0; t < 10000; ++t) {
      const Vec3 x = f.random_covered(rng);
      double sum = 0;
      for (const auto& [id, v] : f.pou.evaluate(x)) {
        CHECK(v >= 0);
        CHECK(f.pou.cube_distance(id, x) < f.dec.side(id) / 16);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1) <= 1e-9);
    }
    for (std::size_t i = 0; i < f.dec.cubes.size(); ++i) {
      const auto v = f.pou.evaluate(f.dec.cubes[i].center());
      REQUIRE(v.size() == 1);
      CHECK(v[0].first == static_cast<int>(i));
      CHECK(v[0].second == 1.0);
    }
  }
}

TEST_CASE("psi is one on the half cube") {
  Fixture f("ball", 6);
  for (std::size_t i = 0; i < f.dec.cubes.size(); i += 7) {
    const Vec3 c = f.dec.cubes[i].center();
    const double q = f.dec.side(static_cast<int>(i)) / 4;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1}) CHECK(f.pou.psi(static_cast<int>(i), {c[0] + sx * q, c[1] + sy * q, 0}) == 1.0);
  }
}

TEST_CASE("equal neighbours split a shared face evenly") {
  Fixture f("cube", 5);
  int checked = 0;
  for (const auto& [a, b] : f.dec.face_pairs) {
    if (f.dec.cubes[a].level != f.dec.cubes[b].level) continue;
    const Vec3 ca = f.dec.cubes[a].center(), cb = f.dec.cubes[b].center();
    const Vec3 mid{(ca[0] + cb[0]) / 2, (ca[1] + cb[1]) / 2, 0};
    const auto v = f.pou.evaluate_in(a, mid);
    double pa = 0, pb = 0;
    for (const auto& [id, w] : v) {
      if (id == a) pa = w;
      if (id == b) pb = w;
    }
    CHECK(pa == doctest::Approx(0.5));
    CHECK(pb == doctest::Approx(0.5));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("collar and outside points are rejected") {
  Fixture f("ball", 6);
  bool saw_collar = false;
  for (std::size_t idx = 0; idx < f.dec.collar.size() && !saw_collar; ++idx) {
    if (!f.dec.collar[idx]) continue;
    try {
      f.pou.evaluate(f.dom.grid.center(f.dom.grid.coords(idx)));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CollarPoint);
      saw_collar = true;
    }
  }
  CHECK(saw_collar);
  CHECK_THROWS_AS(f.pou.evaluate({0.01, 0.01, 0}), Error);
}

TEST_CASE("analytic gradients agree with central differences") {
  Fixture f("snowflake_approx:iter=2", 7);
  std::mt19937 rng(5);
  int compared = 0;
  for (int t = 0; t < 3000; ++t) {
    const Vec3 x = f.random_covered(rng);
    const int home = f.dec.cube_at(x);
    const double eta = 1e-7;
    for (const auto& [id, vg] : f.pou.gradients_in(home, x)) {
      for (int a = 0; a < 2; ++a) {
        Vec3 xp = x, xm = x;
        xp[a] += eta;
        xm[a] -= eta;
        double fp = 0, fm = 0;
        for (const auto& [j, v] : f.pou.evaluate_in(home, xp))
          if (j == id) fp = v;
        for (const auto& [j, v] : f.pou.evaluate_in(home, xm))
          if (j == id) fm = v;
        CHECK(vg.second[a] * f.dec.side(id) ==
              doctest::Approx((fp - fm) / (2 * eta) * f.dec.side(id)).epsilon(1e-4).scale(1));
        ++compared;
      }
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("gradient constant is finite and shared by domains") {
  Fixture a("cube", 7), b("ball", 7);
  const PouGradient ga = pou_gradient_bound(a.pou), gb = pou_gradient_bound(b.pou);
  CHECK(ga.c_pu > 16);  // at least the isolated-bump slope 1.5 * 16 / 1.5^2
  CHECK(ga.c_pu < 16 * 4 * 1.5);
  CHECK(gb.c_pu == doctest::Approx(ga.c_pu).epsilon(0.05));
}

TEST_CASE("smoothing: constants, linearity, range") {
  Fixture f("ball", 6);
  const std::size_t cells = f.dom.grid.cells();
  const SmoothedIndicator one = smooth_indicator(f.pou, f.dom.occ);
  const SmoothedIndicator zero = smooth_indicator(f.pou, std::vector<std::uint8_t>(cells, 0));
  std::mt19937 rng(9);
  std::vector<std::uint8_t> m1(cells), m2(cells);
  std::bernoulli_distribution bit(0.4);
  for (std::size_t i = 0; i < cells; ++i) {
    m1[i] = f.dom.occ[i] && bit(rng);
    m2[i] = f.dom.occ[i] && bit(rng);
  }
  const auto a1 = cube_averages(f.dec, m1), a2 = cube_averages(f.dec, m2);
  std::vector<double> mix(a1.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.3 * a1[i] + a2[i];
  const SmoothedIndicator u1(f.pou, a1), u2(f.pou, a2), um(f.pou, mix);
  for (int t = 0; t < 2000; ++t) {
    const Vec3 x = f.random_covered(rng);
    CHECK(one.value(x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zero.value(x) == 0.0);
    CHECK(std::abs(um.value(x) - (0.3 * u1.value(x) + u2.value(x))) <= 1e-12);
    CHECK(u1.value(x) >= 0);
    CHECK(u1.value(x) <= 1 + 1e-12);
  }
  CHECK(one.energy(1.5) == 0);
  CHECK(zero.energy(1.5) == 0);
}

TEST_CASE("smoothing of a single Whitney cube") {
  Fixture f("cube", 5);
  // A mid-sized cube away from the boundary.
  int pick = -1;
  for (std::size_t i = 0; i < f.dec.cubes.size(); ++i)
    if (f.dec.cubes[i].level == 3) pick = static_cast<int>(i);
  REQUIRE(pick >= 0);
  std::vector<double> a(f.dec.cubes.size(), 0);
  a[pick] = 1;
  const SmoothedIndicator u(f.pou, a);
  const double l = f.dec.side(pick);
  CHECK(u.value(f.dec.cubes[pick].center()) == 1.0);
  std::mt19937 rng(3);
  for (int t = 0; t < 3000; ++t) {
    const Vec3 x = f.random_covered(rng);
    const double v = u.value(x);
    CHECK(v >= 0);
    CHECK(v <= 1);
    if (f.pou.cube_distance(pick, x) >= l / 16) CHECK(v == 0);
  }
  const double p = 1.5;
  const double e = u.energy(p);
  const double neighbours = static_cast<double>(f.dec.touching[pick].size());
  CHECK(e > 0);
  CHECK(e <= 64.0 * std::pow(l, 2 - p) * neighbours);
}

TEST_CASE("capacity check ramp closed form") {
  const double l = 0.5, delta = 0.25;
  for (double p : {1.25, 1.5, 1.75}) {
    const double w = l / 4;
    auto ramp = [&](const Vec3& x) { return std::clamp((x[0] - l / 2) / w + 0.5, 0.0, 1.0); };
    const CapacityResult r = capacity_check({0, 0, 0}, l, 2, ramp, delta, p, 0.1, 256);
    CHECK(r.integral == doctest::Approx(std::pow(w, 1 - p) * l).epsilon(1e-9));
    CHECK(r.ratio == doctest::Approx(std::pow(4, p - 1) * std::pow(delta, -(2 - p) / 2)).epsilon(1e-9));
    CHECK(r.pass);
  }
  CHECK_THROWS_AS(capacity_check({0, 0, 0}, 1, 2, [](const Vec3&) { return 0.0; }, 0.25, 1.5, 0.1),
                  Error);
}

TEST_CASE("capacity ratio has a positive floor on random smooth functions") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  double floor = 1e300;
  int trials = 0;
  while (trials < 100) {
    const double c[5] = {u(rng), u(rng) * 4, u(rng) * 4, u(rng) * 3, u(rng) * 3};
    auto f = [&](const Vec3& x) {
      return 0.5 + c[0] + c[1] * (x[0] - 0.5) + c[2] * (x[1] - 0.5) + c[3] * std::sin(6 * x[0] * x[1]) +
             c[4] * std::cos(5 * x[1]);
    };
    try {
      const CapacityResult r = capacity_check({0, 0, 0}, 1, 2, f, 0.1, 1.5, 0.0, 64);
      floor = std::min(floor, r.ratio);
      ++trials;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PreconditionNotMet);
    }
  }
  CHECK(floor > 0.1);
  MESSAGE("capacity floor over 100 trials: " << floor);
}
