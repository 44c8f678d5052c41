#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "distance.hpp"
#include "domain.hpp"
#include "dyadic.hpp"

namespace sobext {

/// Union of grid cells. Cells beyond the grid are out.
struct VoxelSet {
  Grid grid;
  std::vector<std::uint8_t> occ;
  const VoxelDomain* parent = nullptr;  // the set is a subset of parent when given

  bool in(const Idx3& c) const { return grid.contains(c) && occ[grid.index(c)] != 0; }
  std::size_t count() const;
  double measure() const { return count() * grid.cell_volume(); }
};

/// Validates the occupancy size and, with a parent, the inclusion.
VoxelSet make_set(const Grid& grid, std::vector<std::uint8_t> occ,
                  const VoxelDomain* parent = nullptr);

/// Position of an interface face relative to the reference domain: both
/// neighbours in it, both out of it, or one of each (the face lies on its
/// boundary).
enum class FaceClass : std::uint8_t { Interior, Exterior, OnBoundary };

struct Face {
  int axis = 0;
  Idx3 cell{0, 0, 0};  // the face separates cell and cell + e_axis
  bool set_below = false;  // the set occupies `cell` rather than cell + e_axis
  FaceClass cls = FaceClass::Interior;
};

struct BoundaryFaceSet {
  Grid grid;
  std::vector<Face> faces;
  std::size_t interior = 0, exterior = 0, on_boundary = 0;

  double face_area() const { return grid.face_area(); }
  double total_area() const { return faces.size() * face_area(); }
  Vec3 centroid(const Face& f) const;
};

/// Interface between the set and its complement, classified against
/// `reference` (defaults to the set's parent; with neither, every face is
/// Interior). The reference grid must equal the set grid.
BoundaryFaceSet boundary_faces(const VoxelSet& set, const VoxelDomain* reference = nullptr,
                               Exec exec = Exec::Parallel);

/// P(A, Omega): area of the Interior faces.
double perimeter_in(const BoundaryFaceSet& faces);
/// P(A, R^n): area of all faces.
double perimeter_whole(const BoundaryFaceSet& faces);
/// Area of faces with centroid in the open ball, optionally Interior only.
double perimeter_ball(const BoundaryFaceSet& faces, const Vec3& x, double r, bool interior_only);

struct WeightedIntegral {
  double interior = 0;   // sum over Interior faces of dist^{1-p} h^{n-1}
  double exterior = 0;   // same over Exterior faces
  double finite = 0;     // interior + exterior
  double touching = 0;   // area of faces within h/2 of the boundary
  std::size_t finite_faces = 0, touching_faces = 0;
};

/// Weighted boundary functional with weight dist(centroid, boundary)^{1-p}.
/// Faces with dist > 0 enter the finite part; faces with dist <= h/2 are
/// counted as touching mass. Requires 1 < p < 2.
WeightedIntegral weighted_boundary_integral(const BoundaryFaceSet& faces,
                                            const DistanceField& dist, double p,
                                            Exec exec = Exec::Parallel);

struct IsoperimetricRatio {
  double perimeter = 0;
  double inside = 0, outside = 0;  // |A cap U|, |U minus A|
  double ratio = 0;                // +inf when either volume vanishes
};

/// P(A, int(Q u Q')) / min(|A cap (Q u Q')|, |(Q u Q') minus A|)^{1-1/n}.
/// Needs comparable sizes and a common face portion.
IsoperimetricRatio isoperimetric_cube_pair(const VoxelSet& set, const DyadicCube& q,
                                           const DyadicCube& q2);
/// Ball form: the region is B(x, r) intersected with the set's parent.
IsoperimetricRatio isoperimetric_ball(const VoxelSet& set, const Vec3& x, double r);

struct DensityProfile {
  Vec3 x{0, 0, 0};
  std::vector<double> radii;
  std::vector<double> ratios;
  bool truncated = false;  // some ball left the grid
};

enum class DensityBase { Domain, Whole };

/// |A cap B(x,r)| / |B(x,r) cap Omega| (Domain, Omega = parent) or
/// / |B(x,r)| (Whole, counting lattice cells of the unbounded grid).
/// Cells count when their center lies in the open ball.
DensityProfile density_profile(const VoxelSet& set, const Vec3& x, const std::vector<double>& radii,
                               DensityBase base);

/// Density of an implicitly given set, |{y in B(x,r): in(y)}| / |B(x,r)|,
/// by center sampling on a lattice of `per_radius` cells per radius aligned
/// with x.
DensityProfile density_profile_implicit(const std::function<bool(const Vec3&)>& in, int dim,
                                        const Vec3& x, const std::vector<double>& radii,
                                        int per_radius = 24);

}  // namespace sobext
