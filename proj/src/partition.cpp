#include "sobext/partition.hpp"

#include <algorithm>
#include <cmath>

#include "sobext/errors.hpp"

namespace sobext {

double bump_profile(double s) {
  if (s <= 0) return 1;
  if (s >= 1) return 0;
  return 1 - s * s * (3 - 2 * s);
}

PartitionOfUnity::PartitionOfUnity(const WhitneyDecomposition& dec, double shell)
    : dec_(&dec), shell_(shell) {
  if (!(shell > 0 && shell <= 0.25))
    fail(ErrorKind::PreconditionNotMet, "bump shell must lie in (0, 1/4]");
}

double PartitionOfUnity::cube_distance(int i, const Vec3& x) const {
  const DyadicCube& q = dec_->cubes[i];
  const Vec3 lo = q.lo();
  const double side = q.side();
  const Grid& g = dec_->grid;
  double d2 = 0;
  for (int a = 0; a < g.dim; ++a) {
    auto gap = [&](double v) {
      return v < lo[a] ? lo[a] - v : (v > lo[a] + side ? v - lo[a] - side : 0.0);
    };
    double best = gap(x[a]);
    if (dec_->periodic[a]) {
      const double period = g.size[a] * g.h();
      best = std::min({best, gap(x[a] - period), gap(x[a] + period)});
    }
    d2 += best * best;
  }
  return std::sqrt(d2);
}

double PartitionOfUnity::phi(int i, const Vec3& x) const {
  return bump_profile(cube_distance(i, x) / (shell_ * dec_->cubes[i].side()));
}

std::vector<std::pair<int, double>> PartitionOfUnity::evaluate_in(int home, const Vec3& x) const {
  std::vector<std::pair<int, double>> out;
  double sum = 0;
  auto add = [&](int j) {
    const double v = phi(j, x);
    if (v > 0) {
      out.emplace_back(j, v);
      sum += v;
    }
  };
  add(home);
  for (int j : dec_->touching[home]) add(j);
  if (!(sum > 0)) fail(ErrorKind::PreconditionNotMet, "point is not covered by its home cube");
  for (auto& [j, v] : out) v /= sum;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<int, double>> PartitionOfUnity::evaluate(const Vec3& x) const {
  const Grid& g = dec_->grid;
  Idx3 c = g.cell_of(x);
  for (int a = 0; a < g.dim; ++a) {
    if (dec_->periodic[a]) c[a] = ((c[a] % g.size[a]) + g.size[a]) % g.size[a];
    if (c[a] < 0 || c[a] >= g.size[a])
      fail(ErrorKind::PreconditionNotMet, "point outside the decomposition grid");
  }
  const std::size_t idx = g.index(c);
  const int home = dec_->label[idx];
  if (home < 0) {
    if (dec_->collar[idx]) fail(ErrorKind::CollarPoint, "point lies in the truncation collar");
    fail(ErrorKind::PreconditionNotMet, "point outside the domain");
  }
  return evaluate_in(home, x);
}

std::vector<std::pair<int, std::pair<double, Vec3>>> PartitionOfUnity::gradients_in(
    int home, const Vec3& x) const {
  const Grid& g = dec_->grid;
  struct Term {
    int id;
    double phi;
    Vec3 grad;
  };
  std::vector<Term> terms;
  auto add = [&](int j) {
    const DyadicCube& q = dec_->cubes[j];
    const Vec3 lo = q.lo();
    const double side = q.side();
    Vec3 disp{0, 0, 0};  // x minus its nearest point of the cube
    for (int a = 0; a < g.dim; ++a) {
      auto gap = [&](double v) {
        return v < lo[a] ? v - lo[a] : (v > lo[a] + side ? v - lo[a] - side : 0.0);
      };
      double best = gap(x[a]);
      if (dec_->periodic[a]) {
        const double period = g.size[a] * g.h();
        for (double v : {x[a] - period, x[a] + period})
          if (std::abs(gap(v)) < std::abs(best)) best = gap(v);
      }
      disp[a] = best;
    }
    const double d = norm(disp);
    const double delta = shell_ * side;
    const double s = d / delta;
    if (s >= 1) return;
    Vec3 grad{0, 0, 0};
    if (d > 0) {
      const double dg = 6 * s * (s - 1) / delta;
      for (int a = 0; a < g.dim; ++a) grad[a] = dg * disp[a] / d;
    }
    terms.push_back({j, bump_profile(s), grad});
  };
  add(home);
  for (int j : dec_->touching[home]) add(j);
  double sum = 0;
  Vec3 dsum{0, 0, 0};
  for (const auto& t : terms) {
    sum += t.phi;
    for (int a = 0; a < 3; ++a) dsum[a] += t.grad[a];
  }
  if (!(sum > 0)) fail(ErrorKind::PreconditionNotMet, "point is not covered by its home cube");
  std::vector<std::pair<int, std::pair<double, Vec3>>> out;
  for (const auto& t : terms) {
    Vec3 gr{0, 0, 0};
    for (int a = 0; a < 3; ++a) gr[a] = (t.grad[a] * sum - t.phi * dsum[a]) / (sum * sum);
    out.push_back({t.id, {t.phi / sum, gr}});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

double PartitionOfUnity::psi(int i, const Vec3& x) const {
  for (const auto& [j, v] : evaluate(x))
    if (j == i) return v;
  return 0;
}


PouGradient pou_gradient_bound(const PartitionOfUnity& pou, int per_shell, Exec exec) {
  const auto& dec = pou.decomposition();
  const int n = dec.grid.dim;
  const int ncubes = static_cast<int>(dec.cubes.size());
  std::vector<double> best(ncubes, 0);
  std::vector<std::size_t> counts(ncubes, 0);

#pragma omp parallel for schedule(dynamic, 16) if (exec == Exec::Parallel)
  for (int i = 0; i < ncubes; ++i) {
    if (dec.touching[i].empty()) continue;
    const double side = dec.side(i);
    double thinnest = side;
    for (int j : dec.touching[i]) thinnest = std::min(thinnest, dec.side(j));
    const double eta_target = thinnest * pou.shell() / per_shell;
    const int m = static_cast<int>(std::lround(side / eta_target));
    const double eta = side / m;
    const Vec3 lo = dec.cubes[i].lo();
    const int kmax = n == 3 ? m : 1;
    for (int k = 0; k < kmax; ++k)
      for (int jj = 0; jj < m; ++jj)
        for (int ii = 0; ii < m; ++ii) {
          const int t[3] = {ii, jj, k};
          Vec3 x{0, 0, 0};
          for (int a = 0; a < n; ++a) x[a] = lo[a] + (t[a] + 0.5) * eta;
          bool active = false;
          for (int j : dec.touching[i])
            if (pou.cube_distance(j, x) < pou.shell() * dec.side(j)) {
              active = true;
              break;
            }
          if (!active) continue;
          ++counts[i];
          for (const auto& [id, vg] : pou.gradients_in(i, x))
            best[i] = std::max(best[i], norm(vg.second) * dec.side(id));
        }
  }
  PouGradient out;
  for (int i = 0; i < ncubes; ++i) {
    out.samples += counts[i];
    if (best[i] > out.c_pu) {
      out.c_pu = best[i];
      out.worst_cube = i;
    }
  }
  return out;
}

std::vector<double> cube_averages(const WhitneyDecomposition& dec,
                                  const std::vector<std::uint8_t>& mask) {
  if (mask.size() != dec.grid.cells())
    fail(ErrorKind::PreconditionNotMet, "mask does not match the decomposition grid");
  std::vector<double> in(dec.cubes.size(), 0), total(dec.cubes.size(), 0);
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    const int id = dec.label[idx];
    if (id < 0) continue;
    total[id] += 1;
    if (mask[idx]) in[id] += 1;
  }
  for (std::size_t i = 0; i < in.size(); ++i) in[i] /= total[i];
  return in;
}

double SmoothedIndicator::value_in(int home, const Vec3& x) const {
  double u = 0;
  for (const auto& [j, v] : pou_->evaluate_in(home, x)) u += v * a_[j];
  return u;
}

double SmoothedIndicator::value(const Vec3& x) const {
  double u = 0;
  for (const auto& [j, v] : pou_->evaluate(x)) u += v * a_[j];
  return u;
}

double cube_gradient_energy(const Vec3& lo, double side, int dim,
                            const std::function<double(const Vec3&)>& f, double p,
                            int m) {
  const double eta = side / m;
  const int nz = dim == 3 ? m + 1 : 1;
  const int row = m + 1;
  std::vector<double> prev(static_cast<std::size_t>(row) * row), cur(prev.size());
  auto fill = [&](std::vector<double>& layer, int k) {
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i)
        layer[static_cast<std::size_t>(j) * row + i] =
            f({lo[0] + i * eta, lo[1] + j * eta, dim == 3 ? lo[2] + k * eta : 0.0});
  };
  const double cell = std::pow(eta, dim);
  double total = 0;
  if (dim == 2) {
    fill(cur, 0);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const double u00 = cur[j * row + i], u10 = cur[j * row + i + 1];
        const double u01 = cur[(j + 1) * row + i], u11 = cur[(j + 1) * row + i + 1];
        const double gx = (u10 - u00 + u11 - u01) / (2 * eta);
        const double gy = (u01 - u00 + u11 - u10) / (2 * eta);
        total += std::pow(std::hypot(gx, gy), p) * cell;
      }
    return total;
  }
  fill(prev, 0);
  for (int k = 1; k < nz; ++k) {
    fill(cur, k);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        auto at = [&](const std::vector<double>& l, int di, int dj) {
          return l[static_cast<std::size_t>(j + dj) * row + i + di];
        };
        double gx = 0, gy = 0, gz = 0;
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) {
            const auto& ls = s ? cur : prev;
            gx += at(ls, 1, t) - at(ls, 0, t);
            gy += at(ls, t, 1) - at(ls, t, 0);
            gz += at(cur, s, t) - at(prev, s, t);
          }
        const double g = std::sqrt(gx * gx + gy * gy + gz * gz) / (4 * eta);
        total += std::pow(g, p) * cell;
      }
    std::swap(prev, cur);
  }
  return total;
}

std::vector<double> SmoothedIndicator::cube_energies(double p, int per_side, Exec exec) const {
  const auto& dec = pou_->decomposition();
  const int ncubes = static_cast<int>(dec.cubes.size());
  std::vector<double> e(ncubes, 0);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
  for (int i = 0; i < ncubes; ++i) {
    bool constant = true;
    double smallest = dec.side(i);
    for (int j : dec.touching[i]) {
      if (a_[j] != a_[i]) constant = false;
      smallest = std::min(smallest, dec.side(j));
    }
    if (constant) continue;
    const int m = static_cast<int>(std::lround(dec.side(i) / smallest)) * per_side;
    e[i] = cube_gradient_energy(dec.cubes[i].lo(), dec.side(i), dec.grid.dim,
                                [&](const Vec3& x) { return value_in(i, x); }, p, m);
  }
  return e;
}

double SmoothedIndicator::energy(double p, int per_side, Exec exec) const {
  const auto e = cube_energies(p, per_side, exec);
  double total = 0;
  for (double v : e) total += v;  // fixed order
  return total;
}

SmoothedIndicator smooth_indicator(const PartitionOfUnity& pou,
                                   const std::vector<std::uint8_t>& mask) {
  return SmoothedIndicator(pou, cube_averages(pou.decomposition(), mask));
}

CapacityResult capacity_check(const Vec3& lo, double side, int dim,
                              const std::function<double(const Vec3&)>& f, double delta,
                              double p, double floor, int per_side) {
  if (!(delta > 0 && delta < 1)) fail(ErrorKind::PreconditionNotMet, "delta must lie in (0,1)");
  if (!(p >= 1)) fail(ErrorKind::UnsupportedExponent, "capacity check needs p >= 1");
  const double eta = side / per_side;
  std::size_t low = 0, high = 0, total = 0;
  const int kmax = dim == 3 ? per_side : 1;
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j < per_side; ++j)
      for (int i = 0; i < per_side; ++i) {
        const double v = f({lo[0] + (i + 0.5) * eta, lo[1] + (j + 0.5) * eta,
                            dim == 3 ? lo[2] + (k + 0.5) * eta : 0.0});
        ++total;
        if (v <= 0) ++low;
        if (v >= 1) ++high;
      }
  CapacityResult r;
  r.low_fraction = static_cast<double>(low) / total;
  r.high_fraction = static_cast<double>(high) / total;
  if (!(r.low_fraction > delta && r.high_fraction > delta))
    fail(ErrorKind::PreconditionNotMet, "f is not <= 0 and >= 1 on fractions above delta");
  r.integral = cube_gradient_energy(lo, side, dim, f, p, per_side);
  r.bound = std::pow(delta, (dim - p) / dim) * std::pow(side, dim - p);
  r.ratio = r.integral / r.bound;
  r.pass = r.ratio >= floor;
  return r;
}

}  // namespace sobext
