#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "grid.hpp"

namespace sobext {

/// Closed dyadic cube 2^-level * (index + [0,1]^dim).
struct DyadicCube {
  int dim = 2;
  int level = 0;
  std::array<std::int64_t, 3> index{0, 0, 0};

  double side() const { return std::ldexp(1.0, -level); }

  /// Side length in cells of a grid at `grid_level` (requires level <= grid_level).
  std::int64_t side_cells(int grid_level) const {
    return std::int64_t{1} << (grid_level - level);
  }
  /// Lower corner in absolute cell units at `grid_level`.
  std::int64_t lo_cells(int a, int grid_level) const {
    return index[a] * side_cells(grid_level);
  }

  Vec3 lo() const {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      x[a] = static_cast<double>(index[a]) * side();
    return x;
  }
  Vec3 center() const {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      x[a] = (static_cast<double>(index[a]) + 0.5) * side();
    return x;
  }

  DyadicCube child(int bits) const {
    DyadicCube c{dim, level + 1, {0, 0, 0}};
    for (int a = 0; a < dim; ++a) c.index[a] = 2 * index[a] + ((bits >> a) & 1);
    return c;
  }
  DyadicCube parent() const {
    DyadicCube c{dim, level - 1, {0, 0, 0}};
    for (int a = 0; a < dim; ++a) c.index[a] = index[a] >> 1;  // floor
    return c;
  }

  bool operator==(const DyadicCube&) const = default;
};

namespace dyadic {

/// Lower/upper corner of the cube on a common fine level, in integer units.
inline void bounds(const DyadicCube& q, int fine, std::int64_t lo[3],
                   std::int64_t hi[3]) {
  for (int a = 0; a < q.dim; ++a) {
    lo[a] = q.lo_cells(a, fine);
    hi[a] = lo[a] + q.side_cells(fine);
  }
}

/// q contains r (as closed sets).
inline bool contains(const DyadicCube& q, const DyadicCube& r) {
  const int fine = q.level > r.level ? q.level : r.level;
  std::int64_t ql[3], qh[3], rl[3], rh[3];
  bounds(q, fine, ql, qh);
  bounds(r, fine, rl, rh);
  for (int a = 0; a < q.dim; ++a)
    if (rl[a] < ql[a] || rh[a] > qh[a]) return false;
  return true;
}

/// Number of axes along which the closed cubes overlap in a set of positive
/// length; -1 when they are disjoint.
inline int overlap_axes(const DyadicCube& q, const DyadicCube& r) {
  const int fine = q.level > r.level ? q.level : r.level;
  std::int64_t ql[3], qh[3], rl[3], rh[3];
  bounds(q, fine, ql, qh);
  bounds(r, fine, rl, rh);
  int axes = 0;
  for (int a = 0; a < q.dim; ++a) {
    const std::int64_t lo = ql[a] > rl[a] ? ql[a] : rl[a];
    const std::int64_t hi = qh[a] < rh[a] ? qh[a] : rh[a];
    if (lo > hi) return -1;
    if (lo < hi) ++axes;
  }
  return axes;
}

/// Closed cubes intersect (including corner contact).
inline bool touches(const DyadicCube& q, const DyadicCube& r) {
  return overlap_axes(q, r) >= 0;
}

/// Interiors disjoint and int(q u r) connected: a common (n-1)-face piece.
inline bool shares_face(const DyadicCube& q, const DyadicCube& r) {
  return overlap_axes(q, r) == q.dim - 1;
}

inline bool interiors_overlap(const DyadicCube& q, const DyadicCube& r) {
  return overlap_axes(q, r) == q.dim;
}

/// Bounds of the dilate c*q about the center of q.
inline void dilate_bounds(const DyadicCube& q, double c, Vec3& lo, Vec3& hi) {
  const Vec3 m = q.center();
  const double half = 0.5 * c * q.side();
  lo = hi = Vec3{0, 0, 0};
  for (int a = 0; a < q.dim; ++a) {
    lo[a] = m[a] - half;
    hi[a] = m[a] + half;
  }
}

}  // namespace dyadic
}  // namespace sobext
