#pragma once

#include <memory>
#include <vector>

#include "partition.hpp"
#include "perimeter.hpp"

namespace sobext {

struct ExtensionParams {
  double p = 1.5;
  double c = 0;          // dilation constant; 0 selects 20 sqrt(n)
  int margin_units = 0;  // exterior margin in world units; 0 selects ceil(diam)
  int max_level = -1;    // Whitney truncation level; -1 selects K
  int energy_per_side = 32;
  bool lemmas = true;    // also evaluate the lemma sub-ratios
};

enum class RatioFlag { Ok, ZeroOverZero, Violation, Degenerate };

const char* to_string(RatioFlag flag);

struct LemmaRatio {
  double lhs = 0, rhs = 0;
  double ratio = 0;  // NaN unless flag is Ok
  RatioFlag flag = RatioFlag::Ok;
};

struct InequalityReport {
  int level = 0;
  double p = 0;
  double rhs = 0;            // J_p(Omega cap boundary of A)
  double lhs_exterior = 0;   // J_p over boundary of A_0 outside the closure of Omega
  double lhs_interior = 0;   // J_p over Omega cap boundary of A~
  double lhs_touching = 0;   // area of boundary faces of A~ on the boundary of Omega
  double lhs_finite = 0;     // lhs_exterior + lhs_interior
  LemmaRatio total;          // lhs_finite / rhs
  LemmaRatio lemma31, lemma32, lemma33;
  bool fallback = false;     // rhs not finite, A~ = A
  bool split_ok = false;     // the three face classes partition the boundary of A~
  std::size_t truncated_faces = 0;  // faces of A_0 on the working bbox, not counted
  std::size_t clipped_dilates = 0;  // exterior dilates leaving the working bbox
};

/// Everything lives on one working grid: the domain grid embedded with a
/// margin, carrying both Whitney decompositions.
struct ExtensionResult {
  std::shared_ptr<const VoxelDomain> domain;  // embedded Omega
  std::shared_ptr<const WhitneyDecomposition> interior, exterior;
  VoxelSet a, a_prime, a0, a_tilde;
  std::vector<int> prime_cubes, a0_cubes;  // selected Whitney cube ids
  std::size_t prime_collar = 0, a0_collar = 0;  // selected collar cells
  InequalityReport report;
};

/// A' on a decomposition of Omega: cubes with |A cap Q| > |Q|/2 plus the
/// A-cells of the collar (each collar cell acts as its own cube).
VoxelSet select_a_prime(const VoxelSet& a, const WhitneyDecomposition& dec,
                        std::vector<int>* cubes = nullptr, std::size_t* collar = nullptr);

/// A_0: exterior cubes (and exterior collar cells) whose c-dilate holds more
/// of A' than of Omega minus A'. Counts use cell centers; dilates are clipped
/// to the working bbox, which loses nothing since Omega lies inside it.
VoxelSet select_a0(const VoxelSet& a_prime, const WhitneyDecomposition& ext, double c,
                   std::vector<int>* cubes = nullptr, std::size_t* collar = nullptr,
                   std::size_t* clipped = nullptr, Exec exec = Exec::Parallel);

/// Working margin used by extend_set: ceil(diam of the occupied cells) in world units.
int default_margin_units(const VoxelDomain& dom);

/// A~ = A cup A_0 for a set A of cells of `dom` (given on the domain grid).
ExtensionResult extend_set(const VoxelDomain& dom, const std::vector<std::uint8_t>& a_occ,
                           const ExtensionParams& params);

/// J_p(Omega cap boundary of A') / J_p(Omega cap boundary of A).
LemmaRatio verify_lemma_31(const VoxelSet& a, const VoxelSet& a_prime, const DistanceField& dist,
                           double p);
/// ||grad S_W chi_F||_p^p / J_p(Omega cap boundary of F) for a union F of
/// Whitney cubes (collar cells count as cubes of side h).
LemmaRatio verify_lemma_32(const VoxelSet& f, const PartitionOfUnity& pou,
                           const DistanceField& dist, double p, int per_side = 32);
/// J_p(boundary of A_0 outside the closure of Omega) / ||grad u||_p^p.
LemmaRatio verify_lemma_33(const VoxelSet& a0, const SmoothedIndicator& u,
                           const DistanceField& dist, double p, int per_side = 32);

struct Lemma34Report {
  std::vector<double> radii;           // decreasing
  std::size_t samples = 0;
  double delta = 0.1;
  // Fraction of samples with density in (delta, 1 - delta), per radius.
  std::vector<double> bad_a_prime, bad_a, bad_tilde;
};

/// Density dichotomy at `samples` boundary points of Omega (face centroids
/// taken at a fixed stride), radii 2^-k down to 2h.
Lemma34Report verify_lemma_34(const ExtensionResult& ext, std::size_t samples,
                              double delta = 0.1);

/// J_p over faces of the given class, excluding faces on the working bbox.
double class_integral(const BoundaryFaceSet& faces, const DistanceField& dist, double p,
                      FaceClass cls, std::size_t* truncated = nullptr);

}  // namespace sobext
