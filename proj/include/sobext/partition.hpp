#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "whitney.hpp"

namespace sobext {

/// C^1 plateau profile: 1 - 3s^2 + 2s^3 on [0,1], 1 below, 0 above.
double bump_profile(double s);

/// phi_i = profile(dist(x, Q_i) / (l_i/16)), renormalized over the cubes
/// touching the cube that contains x.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const WhitneyDecomposition& dec, double shell = 1.0 / 16);

  const WhitneyDecomposition& decomposition() const { return *dec_; }
  double shell() const { return shell_; }

  /// Nonzero (cube, psi) pairs at x, sorted by cube id.
  /// Throws CollarPoint in the collar and PreconditionNotMet off the cover.
  std::vector<std::pair<int, double>> evaluate(const Vec3& x) const;
  /// Same, for a point known to lie in the closed cube `home`.
  std::vector<std::pair<int, double>> evaluate_in(int home, const Vec3& x) const;

  double psi(int i, const Vec3& x) const;
  /// Unnormalized bump of cube i.
  double phi(int i, const Vec3& x) const;
  /// Distance from x to the closed cube i (periodic axes wrap).
  double cube_distance(int i, const Vec3& x) const;
  /// Nonzero psi values at x with their exact gradients, home cube given.
  std::vector<std::pair<int, std::pair<double, Vec3>>> gradients_in(int home,
                                                                     const Vec3& x) const;

 private:
  const WhitneyDecomposition* dec_;
  double shell_;
};

struct PouGradient {
  double c_pu = 0;           // max over samples of |grad psi_i| * l(Q_i)
  std::size_t samples = 0;
  int worst_cube = -1;
};

/// Sup of |grad psi_k| l(Q_k) over a deterministic lattice in every cube,
/// of spacing (thinnest bump shell among the cube and its neighbors) /
/// `per_shell`, restricted to points inside some neighbor's shell.
PouGradient pou_gradient_bound(const PartitionOfUnity& pou, int per_shell = 2,
                               Exec exec = Exec::Parallel);

/// a_i = |F cap Q_i| / |Q_i| from a cell mask on the decomposition grid.
std::vector<double> cube_averages(const WhitneyDecomposition& dec,
                                  const std::vector<std::uint8_t>& mask);

/// u = S_W applied to cube averages: u(x) = sum psi_i(x) a_i.
class SmoothedIndicator {
 public:
  SmoothedIndicator(const PartitionOfUnity& pou, std::vector<double> averages)
      : pou_(&pou), a_(std::move(averages)) {}

  double value(const Vec3& x) const;
  double value_in(int home, const Vec3& x) const;
  const std::vector<double>& averages() const { return a_; }
  const PartitionOfUnity& partition() const { return *pou_; }

  /// int_{Q_i} |grad u|^p over each cube, vertex-based differences on a
  /// sub-lattice of spacing min(l_i, l_j)/`per_side` over touching j. Cubes
  /// whose neighborhood carries a single average value contribute 0.
  std::vector<double> cube_energies(double p, int per_side = 64,
                                    Exec exec = Exec::Parallel) const;
  double energy(double p, int per_side = 64, Exec exec = Exec::Parallel) const;

 private:
  const PartitionOfUnity* pou_;
  std::vector<double> a_;
};

SmoothedIndicator smooth_indicator(const PartitionOfUnity& pou,
                                   const std::vector<std::uint8_t>& mask);

/// int |grad f|^p over an axis-parallel cube by the same vertex scheme at
/// `per_side` sub-cells per side.
double cube_gradient_energy(const Vec3& lo, double side, int dim,
                            const std::function<double(const Vec3&)>& f, double p,
                            int per_side);

struct CapacityResult {
  double integral = 0;
  double bound = 0;   // delta^{(n-p)/n} l^{n-p}
  double ratio = 0;   // integral / bound
  double low_fraction = 0, high_fraction = 0;
  bool pass = false;
};

/// Lower-bound check for the gradient energy of f on a cube that is <= 0 on
/// a fraction > delta and >= 1 on a fraction > delta (cell-center sampling).
/// Throws PreconditionNotMet when the fractions are not both above delta.
CapacityResult capacity_check(const Vec3& lo, double side, int dim,
                              const std::function<double(const Vec3&)>& f, double delta,
                              double p, double floor, int per_side = 256);

}  // namespace sobext
