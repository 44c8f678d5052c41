#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "grid.hpp"

namespace sobext {

/// Open set as an occupancy grid. A cell is "in" when its open cell lies in
/// the set. Cells beyond the bbox count as out unless the axis is periodic
/// or `open_bbox` is set (used for complements, whose bbox is artificial).
struct VoxelDomain {
  Grid grid;
  std::vector<std::uint8_t> occ;
  std::string name;
  std::array<bool, 3> periodic{false, false, false};
  bool open_bbox = false;
  bool connected = false;

  bool in_cell(std::size_t idx) const { return occ[idx] != 0; }

  /// Occupancy with out-of-bbox semantics applied.
  bool in(Idx3 c) const {
    for (int a = 0; a < grid.dim; ++a) {
      if (c[a] >= 0 && c[a] < grid.size[a]) continue;
      if (periodic[a]) {
        c[a] = ((c[a] % grid.size[a]) + grid.size[a]) % grid.size[a];
      } else {
        return open_bbox;
      }
    }
    return occ[grid.index(c)] != 0;
  }

  std::size_t count() const;
  double measure() const { return count() * grid.cell_volume(); }
  std::size_t boundary_face_count() const;
};

/// Generator tag plus named numeric parameters, written `tag:k=v,k=v`.
struct GeneratorSpec {
  std::string tag;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  std::string to_string() const;
  static GeneratorSpec parse(const std::string& text);
};

struct BuildLimits {
  std::size_t max_cells = std::size_t{1} << 28;
};

/// Membership predicate of the analytic set behind a generator, together
/// with its default bbox and dimension.
struct AnalyticSet {
  int dim = 2;
  Vec3 lo{0, 0, 0};
  Vec3 hi{1, 1, 0};
  std::array<bool, 3> periodic{false, false, false};
  std::function<bool(const Vec3&)> contains;
};

AnalyticSet analytic_set(const GeneratorSpec& spec);

/// Sample the generator on the dyadic grid at level K. The bbox may be
/// overridden by the window parameters `win_x`, `win_y`, `win_z` (lower
/// corner, world units) and `win_cells` (cells per axis).
VoxelDomain build_domain(const GeneratorSpec& spec, int level,
                         const BuildLimits& limits = {});

/// Domain from an explicit occupancy (validated like generated ones).
VoxelDomain make_domain(Grid grid, std::vector<std::uint8_t> occ,
                        std::string name,
                        std::array<bool, 3> periodic = {false, false, false},
                        bool open_bbox = false);

/// Copy into a larger grid with `margin` cells of out-cells on every side.
VoxelDomain embed(const VoxelDomain& dom, int margin_cells);

/// Complement of the domain inside its bbox, with an open bbox.
VoxelDomain complement(const VoxelDomain& dom);


bool is_connected(const Grid& grid, const std::vector<std::uint8_t>& occ);

void write_voxd(const VoxelDomain& dom, const std::string& path);
VoxelDomain read_voxd(const std::string& path);

}  // namespace sobext
