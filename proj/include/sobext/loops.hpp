#pragma once

#include <array>
#include <string>
#include <vector>

#include "perimeter.hpp"

namespace sobext {

/// Closed lattice polygon along cell faces, the set on its left. Vertices
/// are grid-local lattice points (0..size), first vertex not repeated.
struct JordanLoop {
  std::vector<std::array<int, 2>> vertices;
  double length = 0;       // world units
  double signed_area = 0;  // world units, > 0 for counter-clockwise loops
  int parent = -1;         // innermost loop enclosing this one
  int depth = 0;

  bool outer() const { return signed_area > 0; }
};

/// Decomposes the interface of a 2D set into simple loops. At a vertex shared
/// by two diagonal set cells the walk turns left, so such corner contacts
/// separate loops; a walk that still revisits a vertex is cut there.
std::vector<JordanLoop> jordan_loops(const VoxelSet& set);

/// Sum over loops of the winding number around each cell center.
std::vector<int> winding_field(const std::vector<JordanLoop>& loops, const Grid& grid);

std::string loops_svg(const std::vector<JordanLoop>& loops, const Grid& grid);

}  // namespace sobext
