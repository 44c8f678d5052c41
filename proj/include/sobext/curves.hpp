#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "distance.hpp"
#include "domain.hpp"

namespace sobext {

enum class Side { Complement, Interior };
enum class WeightKind {
  Power,            // dist^{1-p}; p = 1 gives unit weight with boundary cells barred
  InverseDistance,  // 1/dist, used as a John-curve surrogate
};

struct GeodesicOptions {
  Side side = Side::Complement;
  double p = 1.5;
  WeightKind weight = WeightKind::Power;
};

struct GeodesicPath {
  std::vector<Vec3> points;    // z1, cell centers, z2
  std::vector<double> lengths; // per segment
  std::vector<double> weights; // per segment
  double cost = 0;
  double length = 0;
};

/// Reusable per-thread search buffers.
struct GeodesicWorkspace {
  std::vector<double> cost;
  std::vector<std::int32_t> parent;
  std::vector<std::uint32_t> stamp;
  std::uint32_t generation = 0;
};

/// Least-cost paths on the cell graph of one side of the domain (8-connected
/// in 2D, 26 in 3D). An edge costs its length times the mean of the endpoint
/// cell weights; an endpoint joins its nearest side cell by a straight
/// segment weighted by that cell.
class GeodesicSolver {
 public:
  GeodesicSolver(const VoxelDomain& dom, const DistanceField& dist, GeodesicOptions opt);

  const VoxelDomain& domain() const { return *dom_; }
  const GeodesicOptions& options() const { return opt_; }

  bool on_side(std::size_t cell) const;
  /// Side cell usable inside a path (p = 1 bars cells next to the boundary).
  bool admissible(std::size_t cell) const;
  double weight(std::size_t cell) const { return weight_[cell]; }
  /// Nearest side cell to z among the cells around it; -1 when none.
  std::int64_t node_of(const Vec3& z) const;
  /// Admissible neighbors with their edge costs.
  std::vector<std::pair<std::size_t, double>> neighbors(std::size_t cell) const;

  GeodesicPath solve(const Vec3& z1, const Vec3& z2, GeodesicWorkspace* ws = nullptr) const;
  /// Graph costs from `source` to every cell (infinity where unreached).
  std::vector<double> costs_from(std::size_t source) const;

 private:
  const VoxelDomain* dom_;
  const DistanceField* dist_;
  GeodesicOptions opt_;
  std::vector<double> weight_;
  std::vector<std::uint8_t> side_, barred_;
  std::vector<std::array<int, 3>> offsets_;
  std::vector<double> offset_len_;
};

struct CurvePair {
  Vec3 z1{0, 0, 0}, z2{0, 0, 0};
  double scale = 0;
  double separation = 0;
  double cost = 0;
  double ratio = 0;  // cost / separation^{2-p}
  double length = 0;
};

struct CurveConditionReport {
  int level = 0;
  double p = 0;
  std::vector<CurvePair> pairs;
  std::vector<double> scales;
  std::vector<double> scale_max;  // sup ratio per scale
  double sup_ratio = 0;           // a lower bound for the true constant
};

struct ScanOptions {
  double p = 1.5;
  int pairs_per_scale = 8;
  std::uint64_t seed = 1;
  std::vector<double> scales;  // empty: diam 2^-k down to 16h
  int margin_units = 1;        // working margin around the domain
};

/// Boundary-face centroid pairs at roughly the requested separations.
std::vector<CurvePair> sample_boundary_pairs(const VoxelDomain& dom, const std::vector<double>& scales,
                                             int per_scale, std::uint64_t seed);

/// Pairs along the spike of the outward cusp generator: z1 on the left wall
/// at height s above the tip, z2 on the right wall at height 2s.
std::vector<CurvePair> cusp_pairs(double alpha, const std::vector<double>& scales);

/// Cusp pairs evaluated scale by scale on local windows of the outward cusp
/// generator: the window spans [1/2 - 2s, 1/2 + 2s] x [1/2 - s, 1/2 + 3s] and
/// its level puts at least `per_width` cells across the spike at z1
/// (never below `min_level`). Scales must not exceed 1/8.
CurveConditionReport cusp_scan(double alpha, double p, const std::vector<double>& scales,
                               int per_width = 8, int min_level = 9);

/// Complement geodesics for the given pairs on the working grid (the domain
/// embedded with the margin), in parallel over pairs.
CurveConditionReport evaluate_pairs(const VoxelDomain& dom, std::vector<CurvePair> pairs,
                                    const ScanOptions& opt);

/// Sampled curve condition scan of a 2D domain.
CurveConditionReport curve_condition_scan(const VoxelDomain& dom, const ScanOptions& opt);

struct CigReport {
  GeodesicPath path;
  double cig_d = 0;  // sup min(diam of the two sub-arcs) / dist
  double cig_l = 0;  // sup min(length of the two sub-arcs) / dist
};

/// Interior 1/dist geodesic from x to y and the cig constants along it
/// (upper bounds for the best curve).
CigReport cig_check(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x, const Vec3& y);

struct JohnReport {
  double j = 0;                // max over samples
  std::vector<Vec3> samples;
  std::vector<double> per_sample;
};

/// sup_t t / dist(gamma(t)) along interior 1/dist geodesics from `samples`
/// boundary points (face centroids at a fixed stride) to x0.
JohnReport john_check(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x0,
                      std::size_t samples);

/// Same, for explicit boundary points.
JohnReport john_check_points(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x0,
                             std::vector<Vec3> samples);

std::string path_svg(const std::vector<GeodesicPath>& paths, const VoxelDomain& dom);

}  // namespace sobext
