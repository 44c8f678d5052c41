#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace sobext {

using Vec3 = std::array<double, 3>;
using Idx3 = std::array<int, 3>;

/// Regular dyadic grid of spacing h = 2^-level. The bounding box is
/// [origin, origin + size) in cell units; 2D grids carry size[2] == 1.
struct Grid {
  int dim = 2;
  int level = 0;
  std::array<std::int64_t, 3> origin{0, 0, 0};
  Idx3 size{1, 1, 1};

  double h() const { return std::ldexp(1.0, -level); }

  std::size_t cells() const {
    return static_cast<std::size_t>(size[0]) * size[1] * size[2];
  }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * size[1] + j) * size[0] + i;
  }
  std::size_t index(const Idx3& c) const { return index(c[0], c[1], c[2]); }

  Idx3 coords(std::size_t idx) const {
    Idx3 c;
    c[0] = static_cast<int>(idx % size[0]);
    idx /= size[0];
    c[1] = static_cast<int>(idx % size[1]);
    c[2] = static_cast<int>(idx / size[1]);
    return c;
  }

  bool contains(const Idx3& c) const {
    for (int a = 0; a < 3; ++a)
      if (c[a] < 0 || c[a] >= size[a]) return false;
    return true;
  }

  Vec3 center(const Idx3& c) const {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      x[a] = (static_cast<double>(origin[a] + c[a]) + 0.5) * h();
    return x;
  }

  Vec3 lo() const {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = static_cast<double>(origin[a]) * h();
    return x;
  }
  Vec3 hi() const {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      x[a] = static_cast<double>(origin[a] + size[a]) * h();
    return x;
  }

  /// Cell containing the point (floor), possibly outside the grid.
  Idx3 cell_of(const Vec3& x) const {
    Idx3 c{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      c[a] = static_cast<int>(std::floor(x[a] / h())) -
             static_cast<int>(origin[a]);
    return c;
  }

  double cell_volume() const { return std::ldexp(1.0, -level * dim); }
  double face_area() const { return std::ldexp(1.0, -level * (dim - 1)); }

  bool operator==(const Grid&) const = default;
};

inline double norm(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double distance(const Vec3& a, const Vec3& b) { return norm(sub(a, b)); }

}  // namespace sobext
