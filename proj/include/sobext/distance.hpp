#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "domain.hpp"

namespace sobext {

enum class Exec { Serial, Parallel };

inline constexpr std::uint32_t kInfSq = std::numeric_limits<std::uint32_t>::max();

/// Exact squared Euclidean distance transform on a lattice of `size` points
/// (x fastest), to the points where `sites` is nonzero. Separable lower
/// envelope, one pass per axis. Unreachable points hold kInfSq.
std::vector<std::uint32_t> edt_sq(const std::vector<std::uint8_t>& sites, Idx3 size,
                                  std::array<bool, 3> periodic = {false, false, false},
                                  Exec exec = Exec::Parallel);

/// Distance to the discrete boundary, sampled on the half-spacing lattice:
/// lattice point p sits at origin*h + p*h/2, so cell centers have odd
/// coordinates, vertices even ones and face centroids are mixed. Squared
/// values are stored in units of (h/2)^2.
struct DistanceField {
  Grid grid;
  std::array<bool, 3> periodic{false, false, false};
  Idx3 lattice{1, 1, 1};
  std::vector<std::uint32_t> sq;

  std::uint32_t at(Idx3 p) const {
    for (int a = 0; a < grid.dim; ++a)
      if (periodic[a]) p[a] = ((p[a] % lattice[a]) + lattice[a]) % lattice[a];
    return sq[(static_cast<std::size_t>(p[2]) * lattice[1] + p[1]) * lattice[0] + p[0]];
  }

  std::uint32_t center_sq(const Idx3& c) const {
    return at({2 * c[0] + 1, 2 * c[1] + 1, grid.dim == 3 ? 2 * c[2] + 1 : 0});
  }
  /// Face between cell c and c + e_axis (c[axis] may be -1).
  std::uint32_t face_sq(int axis, const Idx3& c) const {
    Idx3 p{2 * c[0] + 1, 2 * c[1] + 1, grid.dim == 3 ? 2 * c[2] + 1 : 0};
    p[axis] += 1;
    return at(p);
  }
  /// Vertex with lattice index v (cell units from the grid origin).
  std::uint32_t vertex_sq(const Idx3& v) const {
    return at({2 * v[0], 2 * v[1], grid.dim == 3 ? 2 * v[2] : 0});
  }

  double to_length(std::uint32_t s) const {
    return s == kInfSq ? std::numeric_limits<double>::infinity()
                       : std::sqrt(static_cast<double>(s)) * grid.h() / 2;
  }
  double center(const Idx3& c) const { return to_length(center_sq(c)); }
};

/// Boundary-face centroids of the domain marked on the half-spacing lattice.
std::vector<std::uint8_t> boundary_sites(const VoxelDomain& dom, Idx3& lattice);

DistanceField distance_transform(const VoxelDomain& dom, Exec exec = Exec::Parallel);

/// Same as above with the sites restricted to boundary-face corners; the
/// distance from a grid-aligned box to the boundary is the minimum of this
/// field over the lattice vertices of the box.
DistanceField vertex_distance(const VoxelDomain& dom, Exec exec = Exec::Parallel);

}  // namespace sobext
