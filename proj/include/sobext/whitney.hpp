#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "distance.hpp"
#include "domain.hpp"
#include "dyadic.hpp"

namespace sobext {

/// Truncated Whitney decomposition of the in-cells of a voxel domain.
/// Cubes are dyadic, aligned with the grid and no finer than `max_level`;
/// cells left uncovered at that level form the collar.
struct WhitneyDecomposition {
  Grid grid;
  std::array<bool, 3> periodic{false, false, false};
  int max_level = 0;
  std::vector<DyadicCube> cubes;
  std::vector<std::uint8_t> synthetic;            // touches an artificial outer bbox
  std::vector<std::pair<int, int>> face_pairs;    // cubes sharing an (n-1)-face
  std::vector<std::pair<int, int>> touch_pairs;   // any contact, faces included
  std::vector<std::vector<int>> touching;         // per cube, sorted
  std::vector<std::int32_t> label;                // per cell: cube id, -1 otherwise
  std::vector<std::uint8_t> collar;               // per cell: in the domain, uncovered
  std::size_t collar_cells = 0;

  /// Cube lower corner in grid cell coordinates (relative to the origin).
  Idx3 lo_cell(int i) const;
  std::int64_t side_cells(int i) const { return cubes[i].side_cells(grid.level); }
  double side(int i) const { return cubes[i].side(); }
  /// Cube containing the point, -1 for the collar or outside.
  int cube_at(const Vec3& x) const;
};

/// Top-down construction: a cube is accepted once it lies in the domain and
/// dist(Q, boundary) >= l(Q); otherwise it is split. `max_level` defaults
/// to the grid level.
WhitneyDecomposition whitney_decompose(const VoxelDomain& dom, int max_level = -1);

/// Whitney decomposition of (bbox expanded by `margin_cells`) minus the
/// closure of the domain. Cubes touching the expanded bbox are synthetic.
WhitneyDecomposition exterior_whitney(const VoxelDomain& dom, int margin_cells,
                                      int max_level = -1);

/// The complement domain used by exterior_whitney (embedded, open bbox).
VoxelDomain exterior_domain(const VoxelDomain& dom, int margin_cells);

struct WhitneyAudit {
  std::size_t cubes = 0;
  std::size_t w1_fail = 0, w2_fail = 0, w3_fail = 0, w4_fail = 0;
  std::size_t collar_cells = 0;
  std::size_t face_pairs = 0, touch_pairs = 0;
  double max_dist_ratio = 0;  // max dist(Q, boundary) / l(Q)
  double min_dist_ratio = 0;
  bool ok() const { return w1_fail + w2_fail + w3_fail + w4_fail == 0; }
};

/// Exact re-check of (W1)-(W4); (W4) is applied to every touching pair.
WhitneyAudit audit_whitney(const WhitneyDecomposition& dec, const VoxelDomain& dom);

/// Squared distance of cube i to the boundary, in units of h^2, by a full scan
/// of the vertex field over the cube.
std::uint64_t cube_distance_sq(const WhitneyDecomposition& dec, const DistanceField& vertex_field,
                               int i);

/// Number of cubes per level, indexed by level.
std::vector<std::size_t> level_histogram(const WhitneyDecomposition& dec);

/// One cube per line `level i j [k] flags`, then `pairs` and one face pair per line.
std::string whitney_text(const WhitneyDecomposition& dec);
/// Outline drawing of a 2D decomposition, colored by level.
std::string whitney_svg(const WhitneyDecomposition& dec);

}  // namespace sobext
