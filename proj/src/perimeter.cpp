#include "sobext/perimeter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobext/errors.hpp"

namespace sobext {

std::size_t VoxelSet::count() const {
  return static_cast<std::size_t>(
      std::count_if(occ.begin(), occ.end(), [](std::uint8_t v) { return v != 0; }));
}

VoxelSet make_set(const Grid& grid, std::vector<std::uint8_t> occ, const VoxelDomain* parent) {
  if (occ.size() != grid.cells()) fail(ErrorKind::PreconditionNotMet, "set occupancy size mismatch");
  if (parent) {
    if (!(parent->grid == grid)) fail(ErrorKind::PreconditionNotMet, "set and parent grids differ");
    for (std::size_t i = 0; i < occ.size(); ++i)
      if (occ[i] && !parent->occ[i])
        fail(ErrorKind::PreconditionNotMet, "set is not contained in its parent domain");
  }
  VoxelSet s;
  s.grid = grid;
  s.occ = std::move(occ);
  s.parent = parent;
  return s;
}

Vec3 BoundaryFaceSet::centroid(const Face& f) const {
  Vec3 x = grid.center(f.cell);
  x[f.axis] += 0.5 * grid.h();
  return x;
}

BoundaryFaceSet boundary_faces(const VoxelSet& set, const VoxelDomain* reference, Exec exec) {
  if (!reference) reference = set.parent;
  if (reference && !(reference->grid == set.grid))
    fail(ErrorKind::PreconditionNotMet, "reference grid differs from the set grid");
  const Grid& g = set.grid;
  BoundaryFaceSet out;
  out.grid = g;
  for (int axis = 0; axis < g.dim; ++axis) {
    // Rows run along `axis`; each row starts at -1 so bbox faces are included.
    Idx3 rows = g.size;
    rows[axis] = 1;
    const std::int64_t nrows = static_cast<std::int64_t>(rows[0]) * rows[1] * rows[2];
    std::vector<std::vector<Face>> per_row(nrows);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t r = 0; r < nrows; ++r) {
      Idx3 c{static_cast<int>(r % rows[0]), static_cast<int>((r / rows[0]) % rows[1]),
             static_cast<int>(r / (static_cast<std::int64_t>(rows[0]) * rows[1]))};
      for (int t = -1; t < g.size[axis]; ++t) {
        c[axis] = t;
        Idx3 d = c;
        ++d[axis];
        const bool a = set.in(c), b = set.in(d);
        if (a == b) continue;
        Face f;
        f.axis = axis;
        f.cell = c;
        f.set_below = a;
        if (reference) {
          const bool ra = reference->in(c), rb = reference->in(d);
          f.cls = ra && rb ? FaceClass::Interior
                           : (!ra && !rb ? FaceClass::Exterior : FaceClass::OnBoundary);
        }
        per_row[r].push_back(f);
      }
    }
    for (auto& row : per_row)
      for (const Face& f : row) {
        out.faces.push_back(f);
        switch (f.cls) {
          case FaceClass::Interior: ++out.interior; break;
          case FaceClass::Exterior: ++out.exterior; break;
          case FaceClass::OnBoundary: ++out.on_boundary; break;
        }
      }
  }
  return out;
}

double perimeter_in(const BoundaryFaceSet& f) { return f.interior * f.face_area(); }

double perimeter_whole(const BoundaryFaceSet& f) { return f.total_area(); }

double perimeter_ball(const BoundaryFaceSet& f, const Vec3& x, double r, bool interior_only) {
  std::size_t n = 0;
  for (const Face& face : f.faces) {
    if (interior_only && face.cls != FaceClass::Interior) continue;
    if (distance(f.centroid(face), x) < r) ++n;
  }
  return n * f.face_area();
}

WeightedIntegral weighted_boundary_integral(const BoundaryFaceSet& f, const DistanceField& dist,
                                            double p, Exec exec) {
  if (!(p > 1 && p < 2)) fail(ErrorKind::UnsupportedExponent, "weighted integral needs 1 < p < 2");
  if (!(dist.grid == f.grid)) fail(ErrorKind::PreconditionNotMet, "distance field grid differs");
  const double area = f.face_area();
  const double half_h = f.grid.h() / 2;
  // Fixed chunks summed in order: the result does not depend on threads.
  constexpr std::size_t kChunk = 4096;
  const std::size_t nchunks = (f.faces.size() + kChunk - 1) / kChunk;
  struct Partial {
    double interior = 0, exterior = 0;
    std::size_t finite = 0, touching = 0;
  };
  std::vector<Partial> parts(nchunks);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nchunks); ++c) {
    Partial& part = parts[c];
    const std::size_t end = std::min(f.faces.size(), (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      const Face& face = f.faces[k];
      const double d = dist.to_length(dist.face_sq(face.axis, face.cell));
      if (d <= half_h) ++part.touching;
      if (d > 0) {
        ++part.finite;
        const double w = std::pow(d, 1 - p) * area;
        if (face.cls == FaceClass::Exterior) part.exterior += w;
        else part.interior += w;
      }
    }
  }
  WeightedIntegral out;
  for (const Partial& part : parts) {
    out.interior += part.interior;
    out.exterior += part.exterior;
    out.finite_faces += part.finite;
    out.touching_faces += part.touching;
  }
  out.finite = out.interior + out.exterior;
  out.touching = out.touching_faces * area;
  return out;
}

namespace {

IsoperimetricRatio ratio_over(const VoxelSet& set, const std::function<bool(const Idx3&)>& region,
                              const Idx3& lo, const Idx3& hi) {
  const Grid& g = set.grid;
  std::size_t faces = 0, inside = 0, outside = 0;
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) {
        const Idx3 c{i, j, k};
        if (!region(c)) continue;
        const bool a = set.in(c);
        (a ? inside : outside) += 1;
        for (int ax = 0; ax < g.dim; ++ax) {
          Idx3 d = c;
          ++d[ax];
          if (d[ax] < hi[ax] && region(d) && set.in(d) != a) ++faces;
        }
      }
  IsoperimetricRatio r;
  r.perimeter = faces * g.face_area();
  r.inside = inside * g.cell_volume();
  r.outside = outside * g.cell_volume();
  const double e = 1.0 - 1.0 / g.dim;
  const double m = std::min(std::pow(r.inside, e), std::pow(r.outside, e));
  r.ratio = m > 0 ? r.perimeter / m : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

IsoperimetricRatio isoperimetric_cube_pair(const VoxelSet& set, const DyadicCube& q,
                                           const DyadicCube& q2) {
  const Grid& g = set.grid;
  const double ratio = q.side() / q2.side();
  if (ratio < 0.25 || ratio > 4)
    fail(ErrorKind::PreconditionNotMet, "cube sizes differ by more than a factor 4");
  if (!dyadic::shares_face(q, q2))
    fail(ErrorKind::PreconditionNotMet, "cube pair does not share a face");
  if (q.level > g.level || q2.level > g.level)
    fail(ErrorKind::PreconditionNotMet, "cubes finer than the grid");
  Idx3 lo{0, 0, 0}, hi{1, 1, 1};
  std::int64_t qlo[2][3], qhi[2][3];
  const DyadicCube* cubes[2] = {&q, &q2};
  for (int m = 0; m < 2; ++m)
    for (int a = 0; a < g.dim; ++a) {
      qlo[m][a] = cubes[m]->lo_cells(a, g.level) - g.origin[a];
      qhi[m][a] = qlo[m][a] + cubes[m]->side_cells(g.level);
      if (qlo[m][a] < 0 || qhi[m][a] > g.size[a])
        fail(ErrorKind::PreconditionNotMet, "cube leaves the grid");
    }
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = static_cast<int>(std::min(qlo[0][a], qlo[1][a]));
    hi[a] = static_cast<int>(std::max(qhi[0][a], qhi[1][a]));
  }
  auto region = [&](const Idx3& c) {
    for (int m = 0; m < 2; ++m) {
      bool in = true;
      for (int a = 0; a < g.dim; ++a)
        if (c[a] < qlo[m][a] || c[a] >= qhi[m][a]) in = false;
      if (in) return true;
    }
    return false;
  };
  return ratio_over(set, region, lo, hi);
}

IsoperimetricRatio isoperimetric_ball(const VoxelSet& set, const Vec3& x, double r) {
  const Grid& g = set.grid;
  Idx3 lo{0, 0, 0}, hi{1, 1, 1};
  for (int a = 0; a < g.dim; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r) / g.h() - g.origin[a])) - 1);
    hi[a] = std::min(g.size[a], static_cast<int>(std::ceil((x[a] + r) / g.h() - g.origin[a])) + 1);
  }
  auto region = [&](const Idx3& c) {
    if (set.parent && !set.parent->in(c)) return false;
    return distance(g.center(c), x) < r;
  };
  return ratio_over(set, region, lo, hi);
}

DensityProfile density_profile(const VoxelSet& set, const Vec3& x, const std::vector<double>& radii,
                               DensityBase base) {
  const Grid& g = set.grid;
  if (base == DensityBase::Domain && !set.parent)
    fail(ErrorKind::PreconditionNotMet, "domain-relative density needs a parent domain");
  DensityProfile out;
  out.x = x;
  out.radii = radii;
  const double h = g.h();
  for (double r : radii) {
    if (r < 2 * h) fail(ErrorKind::PreconditionNotMet, "radius below 2h");
    std::int64_t lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};  // absolute cell indices
    for (int a = 0; a < g.dim; ++a) {
      lo[a] = static_cast<std::int64_t>(std::floor((x[a] - r) / h)) - 1;
      hi[a] = static_cast<std::int64_t>(std::ceil((x[a] + r) / h)) + 1;
      if (lo[a] < g.origin[a] || hi[a] > g.origin[a] + g.size[a]) out.truncated = true;
    }
    std::size_t in_a = 0, base_count = 0;
    for (std::int64_t k = lo[2]; k < hi[2]; ++k)
      for (std::int64_t j = lo[1]; j < hi[1]; ++j)
        for (std::int64_t i = lo[0]; i < hi[0]; ++i) {
          const std::int64_t abs[3] = {i, j, k};
          double d2 = 0;
          for (int a = 0; a < g.dim; ++a) {
            const double c = (static_cast<double>(abs[a]) + 0.5) * h - x[a];
            d2 += c * c;
          }
          if (!(d2 < r * r)) continue;
          Idx3 c{0, 0, 0};
          for (int a = 0; a < g.dim; ++a) c[a] = static_cast<int>(abs[a] - g.origin[a]);
          if (base == DensityBase::Whole) ++base_count;
          else if (set.parent->in(c)) ++base_count;
          if (set.in(c)) ++in_a;
        }
    out.ratios.push_back(base_count ? static_cast<double>(in_a) / base_count : 0.0);
  }
  return out;
}

DensityProfile density_profile_implicit(const std::function<bool(const Vec3&)>& in, int dim,
                                        const Vec3& x, const std::vector<double>& radii,
                                        int per_radius) {
  DensityProfile out;
  out.x = x;
  out.radii = radii;
  for (double r : radii) {
    const double s = r / per_radius;
    std::size_t total = 0, hit = 0;
    const int kr = dim == 3 ? per_radius : 0;
    for (int k = -kr; k < std::max(kr, 1); ++k)
      for (int j = -per_radius; j < per_radius; ++j)
        for (int i = -per_radius; i < per_radius; ++i) {
          const Vec3 d{(i + 0.5) * s, (j + 0.5) * s, dim == 3 ? (k + 0.5) * s : 0.0};
          if (!(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < r * r)) continue;
          ++total;
          if (in({x[0] + d[0], x[1] + d[1], x[2] + d[2]})) ++hit;
        }
    out.ratios.push_back(static_cast<double>(hit) / total);
  }
  return out;
}

}  // namespace sobext
