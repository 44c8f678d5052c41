#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "grid.hpp"

namespace sobext {

using Rational = boost::multiprecision::cpp_rational;
using RPoint = std::array<Rational, 3>;

struct CantorCube {
  int level = 0;
  int parent = -1;  // index into the previous level
  RPoint lo;        // side is l_level
};

/// Axis-parallel polyline joining y (top face of the parent) to x (top-face
/// center of the cube it feeds), plus its split into tube pieces.
struct TubeCurve {
  int level = 0;
  int cube = 0;  // index of C_{level,cube}
  std::vector<RPoint> vertices;
  std::vector<Rational> cuts;  // arc-length positions 0 = s_0 < ... < s_J = length

  std::size_t piece_count() const { return cuts.empty() ? 0 : cuts.size() - 1; }
  std::vector<RPoint> piece(std::size_t j) const;
};

struct CantorTubeSpec {
  int depth = 0;
  std::vector<Rational> lambda;  // lambda[n] for n = 1..depth, lambda[0] unused
  std::vector<Rational> l;       // l[0..depth]
  std::vector<Rational> e;       // e[1..depth], e[0] unused
  std::vector<Rational> c;       // c[0..depth]
  std::vector<std::vector<CantorCube>> cubes;   // cubes[0..depth]
  std::vector<std::vector<TubeCurve>> curves;   // curves[1..depth]

  const TubeCurve& curve(int n, int i) const { return curves[n][i]; }
  RPoint top_center(int n, int i) const;
};

/// Default sequence lambda_i = e^{-1/i} / 2.
double default_lambda(int i);

CantorTubeSpec build_cantor_tube(
    int depth, const std::optional<std::vector<double>>& lambda_override = {});

struct CantorAudit {
  bool ok = true;
  std::vector<std::string> failures;
  Rational min_curve_gap_sq_over_c_sq;  // min over levels of dist^2 / c_n^2
  std::size_t curves_checked = 0;
  std::size_t pieces_checked = 0;
};

/// Exact-arithmetic certification of every construction invariant.
CantorAudit audit_cantor(const CantorTubeSpec& spec);

/// |C_n| summed over the cube list.
Rational cantor_measure(const CantorTubeSpec& spec, int n);

Rational polyline_length(const std::vector<RPoint>& vertices);

/// Squared distance between two axis-parallel segments (exact).
Rational segment_distance_sq(const RPoint& a0, const RPoint& a1,
                             const RPoint& b0, const RPoint& b1);

/// Centers of `count` level-`depth` Cantor cubes chosen by a seeded walk
/// down the cube tree; every ancestor cube contains the point.
std::vector<Vec3> cantor_sample_points(const CantorTubeSpec& spec, std::size_t count,
                                       std::uint64_t seed);

std::string serialize_cantor(const CantorTubeSpec& spec);
CantorTubeSpec parse_cantor(const std::string& text);

/// Fast floating-point membership in the union of tubes T_{n,i}, n <= depth.
class TubeIndex {
 public:
  explicit TubeIndex(const CantorTubeSpec& spec);
  bool in_tubes(const Vec3& x) const;
  /// Which tube (level, index) contains x; level 0 when none.
  std::pair<int, int> tube_of(const Vec3& x) const;
  /// Cantor cube of level n containing x, or -1.
  int cube_of(const Vec3& x, int n) const;
  const CantorTubeSpec& spec() const { return *spec_; }

 private:
  struct Seg {
    Vec3 a, b;
  };
  const CantorTubeSpec* spec_;
  std::vector<double> side_, radius_;
  std::vector<std::vector<Vec3>> lo_;
  std::vector<std::vector<std::vector<Seg>>> segs_;
  bool in_tube(int n, int i, const Vec3& x) const;
};

/// Sparse voxelization of the level-n tubes at grid level K: one sorted list
/// of packed cell keys per tube (cell center within c_n/2 of the curve and
/// outside the open child cube).
std::vector<std::vector<std::uint64_t>> voxelize_tubes(const CantorTubeSpec& spec,
                                                       int n, int level);

std::uint64_t pack_cell(std::int64_t i, std::int64_t j, std::int64_t k);
std::array<std::int64_t, 3> unpack_cell(std::uint64_t key);

struct TubeSeparation {
  double min_face_distance = 0;  // smallest gap between voxels of distinct tubes
  int tube_a = -1, tube_b = -1;
  std::size_t boundary_voxels = 0;
};

/// Minimum face-to-face distance between voxels of distinct tubes. Pairs
/// further apart than `search_radius` are not resolved; the result is then
/// reported as `search_radius`.
TubeSeparation tube_separation(const std::vector<std::vector<std::uint64_t>>& tubes,
                               int level, double search_radius);

}  // namespace sobext
