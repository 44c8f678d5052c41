#include "sobext/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobext/errors.hpp"

namespace sobext {

const char* to_string(RatioFlag flag) {
  switch (flag) {
    case RatioFlag::Ok: return "ok";
    case RatioFlag::ZeroOverZero: return "zero_over_zero";
    case RatioFlag::Violation: return "violation";
    case RatioFlag::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

LemmaRatio make_ratio(double lhs, double rhs) {
  LemmaRatio r;
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs > 0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = std::numeric_limits<double>::quiet_NaN();
    r.flag = lhs > 0 ? RatioFlag::Violation : RatioFlag::ZeroOverZero;
  }
  return r;
}

std::size_t cube_volume_cells(const WhitneyDecomposition& dec, int i) {
  std::size_t v = 1;
  for (int a = 0; a < dec.grid.dim; ++a) v *= static_cast<std::size_t>(dec.side_cells(i));
  return v;
}

// Summed-volume table over an (n+1)-padded grid.
class Prefix {
 public:
  Prefix(const Grid& g, const std::function<bool(std::size_t)>& f)
      : nx_(g.size[0] + 1), ny_(g.size[1] + 1), nz_(g.dim == 3 ? g.size[2] + 1 : 2),
        s_(static_cast<std::size_t>(nx_) * ny_ * nz_, 0) {
    for (int k = 0; k < g.size[2]; ++k)
      for (int j = 0; j < g.size[1]; ++j)
        for (int i = 0; i < g.size[0]; ++i) {
          const std::uint32_t v = f(g.index(i, j, k)) ? 1 : 0;
          s_[id(i + 1, j + 1, k + 1)] = v + s_[id(i, j + 1, k + 1)] + s_[id(i + 1, j, k + 1)] +
                                        s_[id(i + 1, j + 1, k)] - s_[id(i, j, k + 1)] -
                                        s_[id(i, j + 1, k)] - s_[id(i + 1, j, k)] + s_[id(i, j, k)];
        }
  }
  // Cells in [lo, hi) per axis.
  std::int64_t box(const Idx3& lo, const Idx3& hi) const {
    auto at = [&](int i, int j, int k) { return static_cast<std::int64_t>(s_[id(i, j, k)]); };
    return at(hi[0], hi[1], hi[2]) - at(lo[0], hi[1], hi[2]) - at(hi[0], lo[1], hi[2]) -
           at(hi[0], hi[1], lo[2]) + at(lo[0], lo[1], hi[2]) + at(lo[0], hi[1], lo[2]) +
           at(hi[0], lo[1], lo[2]) - at(lo[0], lo[1], lo[2]);
  }

 private:
  std::size_t id(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny_ + j) * nx_ + i;
  }
  int nx_, ny_, nz_;
  std::vector<std::uint32_t> s_;
};

// Cells whose centers lie in the closed box center +- half; false if clipped.
bool dilate_range(const Grid& g, const Vec3& center, double half, Idx3& lo, Idx3& hi) {
  bool inside = true;
  lo = {0, 0, 0};
  hi = {1, 1, 1};
  for (int a = 0; a < g.dim; ++a) {
    const double l = (center[a] - half) / g.h() - 0.5 - static_cast<double>(g.origin[a]);
    const double u = (center[a] + half) / g.h() - 0.5 - static_cast<double>(g.origin[a]);
    const double first = std::ceil(l), last = std::floor(u);
    if (first < 0 || last > g.size[a] - 1) inside = false;
    lo[a] = static_cast<int>(std::clamp(first, 0.0, static_cast<double>(g.size[a])));
    hi[a] = static_cast<int>(std::clamp(last + 1, 0.0, static_cast<double>(g.size[a])));
    if (hi[a] < lo[a]) hi[a] = lo[a];
  }
  return inside;
}

double energy_of(const SmoothedIndicator& u, double p, int per_side) {
  return u.energy(p, per_side, Exec::Parallel);
}

LemmaRatio lemma33_from(const VoxelSet& a0, const SmoothedIndicator& u, double energy,
                        const DistanceField& dist, double p) {
  const VoxelDomain* omega = a0.parent;
  const BoundaryFaceSet f = boundary_faces(a0, omega);
  const double lhs = class_integral(f, dist, p, FaceClass::Exterior);
  if (energy == 0) {
    const auto& av = u.averages();
    const bool constant_one = !av.empty() && std::all_of(av.begin(), av.end(), [](double v) { return v == 1.0; });
    if (constant_one) {
      LemmaRatio r = make_ratio(lhs, 0);
      r.flag = RatioFlag::Degenerate;
      return r;
    }
  }
  return make_ratio(lhs, energy);
}

}  // namespace

double class_integral(const BoundaryFaceSet& faces, const DistanceField& dist, double p,
                      FaceClass cls, std::size_t* truncated) {
  const Grid& g = faces.grid;
  const double area = g.face_area();
  double sum = 0;
  std::size_t cut = 0;
  for (const Face& f : faces.faces) {
    if (f.cls != cls) continue;
    Idx3 d = f.cell;
    ++d[f.axis];
    if (!g.contains(f.cell) || !g.contains(d)) {
      ++cut;
      continue;
    }
    const double t = dist.to_length(dist.face_sq(f.axis, f.cell));
    if (t > 0) sum += std::pow(t, 1 - p) * area;
  }
  if (truncated) *truncated = cut;
  return sum;
}

VoxelSet select_a_prime(const VoxelSet& a, const WhitneyDecomposition& dec, std::vector<int>* cubes,
                        std::size_t* collar) {
  if (!(a.grid == dec.grid)) fail(ErrorKind::PreconditionNotMet, "set and decomposition grids differ");
  std::vector<std::size_t> count(dec.cubes.size(), 0);
  for (std::size_t c = 0; c < a.occ.size(); ++c)
    if (a.occ[c] && dec.label[c] >= 0) ++count[dec.label[c]];
  std::vector<std::uint8_t> chosen(dec.cubes.size(), 0);
  if (cubes) cubes->clear();
  for (std::size_t i = 0; i < dec.cubes.size(); ++i)
    if (2 * count[i] > cube_volume_cells(dec, static_cast<int>(i))) {
      chosen[i] = 1;
      if (cubes) cubes->push_back(static_cast<int>(i));
    }
  std::vector<std::uint8_t> occ(a.occ.size(), 0);
  std::size_t nc = 0;
  for (std::size_t c = 0; c < occ.size(); ++c) {
    if (dec.label[c] >= 0) occ[c] = chosen[dec.label[c]];
    else if (dec.collar[c] && a.occ[c]) {
      occ[c] = 1;
      ++nc;
    }
  }
  if (collar) *collar = nc;
  return make_set(a.grid, std::move(occ), a.parent);
}

VoxelSet select_a0(const VoxelSet& a_prime, const WhitneyDecomposition& ext, double c,
                   std::vector<int>* cubes, std::size_t* collar, std::size_t* clipped, Exec exec) {
  const Grid& g = a_prime.grid;
  if (!(g == ext.grid)) fail(ErrorKind::PreconditionNotMet, "set and exterior grids differ");
  const VoxelDomain* omega = a_prime.parent;
  if (!omega) fail(ErrorKind::PreconditionNotMet, "A' needs its domain");
  if (!(c >= 1)) fail(ErrorKind::PreconditionNotMet, "dilation constant below 1");
  const Prefix in_a(g, [&](std::size_t i) { return a_prime.occ[i] != 0; });
  const Prefix in_rest(g, [&](std::size_t i) { return omega->occ[i] && !a_prime.occ[i]; });
  auto majority = [&](const Vec3& center, double side, bool& inside) {
    Idx3 lo, hi;
    inside = dilate_range(g, center, 0.5 * c * side, lo, hi);
    return in_a.box(lo, hi) > in_rest.box(lo, hi);
  };

  const std::int64_t n = static_cast<std::int64_t>(ext.cubes.size());
  std::vector<std::uint8_t> chosen(n, 0), cut(n, 0);
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    bool inside = true;
    chosen[i] = majority(ext.cubes[i].center(), ext.cubes[i].side(), inside);
    cut[i] = !inside;
  }
  const std::int64_t cells = static_cast<std::int64_t>(g.cells());
  std::vector<std::uint8_t> occ(g.cells(), 0);
#pragma omp parallel for schedule(dynamic, 4096) if (exec == Exec::Parallel)
  for (std::int64_t idx = 0; idx < cells; ++idx) {
    const int l = ext.label[idx];
    if (l >= 0) {
      occ[idx] = chosen[l];
    } else if (ext.collar[idx]) {
      bool inside = true;
      occ[idx] = majority(g.center(g.coords(idx)), g.h(), inside);
    }
  }
  if (cubes) {
    cubes->clear();
    for (std::int64_t i = 0; i < n; ++i)
      if (chosen[i]) cubes->push_back(static_cast<int>(i));
  }
  if (collar) {
    std::size_t nc = 0;
    for (std::size_t idx = 0; idx < occ.size(); ++idx) nc += ext.label[idx] < 0 && occ[idx];
    *collar = nc;
  }
  if (clipped) *clipped = static_cast<std::size_t>(std::count(cut.begin(), cut.end(), 1));
  VoxelSet out;
  out.grid = g;
  out.occ = std::move(occ);
  out.parent = omega;  // classification reference only; A_0 lies outside it
  return out;
}

int default_margin_units(const VoxelDomain& dom) {
  const Grid& g = dom.grid;
  Idx3 lo{g.size[0], g.size[1], g.size[2]}, hi{-1, -1, -1};
  for (std::size_t i = 0; i < dom.occ.size(); ++i) {
    if (!dom.occ[i]) continue;
    const Idx3 c = g.coords(i);
    for (int a = 0; a < g.dim; ++a) {
      lo[a] = std::min(lo[a], c[a]);
      hi[a] = std::max(hi[a], c[a] + 1);
    }
  }
  double d2 = 0;
  for (int a = 0; a < g.dim; ++a) d2 += std::pow((hi[a] - lo[a]) * g.h(), 2);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(d2) - 1e-12)));
}

ExtensionResult extend_set(const VoxelDomain& dom, const std::vector<std::uint8_t>& a_occ,
                           const ExtensionParams& params) {
  if (!(params.p > 1 && params.p < 2)) fail(ErrorKind::UnsupportedExponent, "extension needs 1 < p < 2");
  if (a_occ.size() != dom.occ.size()) fail(ErrorKind::PreconditionNotMet, "set size mismatch");
  const int n = dom.grid.dim;
  const double c = params.c > 0 ? params.c : 20 * std::sqrt(static_cast<double>(n));
  const int units = params.margin_units > 0 ? params.margin_units : default_margin_units(dom);
  const int margin = units << dom.grid.level;

  ExtensionResult out;
  auto omega = std::make_shared<VoxelDomain>(embed(dom, margin));
  out.domain = omega;
  out.interior = std::make_shared<WhitneyDecomposition>(whitney_decompose(*omega, params.max_level));
  out.exterior = std::make_shared<WhitneyDecomposition>(exterior_whitney(dom, margin, params.max_level));
  const Grid& g = omega->grid;
  if (!(out.exterior->grid == g)) fail(ErrorKind::Internal, "working grids disagree");

  std::vector<std::uint8_t> emb(g.cells(), 0);
  for (std::size_t i = 0; i < a_occ.size(); ++i) {
    if (!a_occ[i]) continue;
    if (!dom.occ[i]) fail(ErrorKind::PreconditionNotMet, "A is not contained in the domain");
    Idx3 cc = dom.grid.coords(i);
    for (int a = 0; a < n; ++a) cc[a] += margin;
    emb[g.index(cc)] = 1;
  }
  out.a = make_set(g, std::move(emb), omega.get());

  const DistanceField dist = distance_transform(*omega);
  InequalityReport& rep = out.report;
  rep.level = g.level;
  rep.p = params.p;
  const BoundaryFaceSet fa = boundary_faces(out.a, omega.get());
  rep.rhs = class_integral(fa, dist, params.p, FaceClass::Interior);

  out.a_prime = select_a_prime(out.a, *out.interior, &out.prime_cubes, &out.prime_collar);
  if (std::isfinite(rep.rhs)) {
    out.a0 = select_a0(out.a_prime, *out.exterior, c, &out.a0_cubes, &out.a0_collar,
                       &rep.clipped_dilates);
  } else {
    rep.fallback = true;
    out.a0 = make_set(g, std::vector<std::uint8_t>(g.cells(), 0));
    out.a0.parent = omega.get();
  }
  std::vector<std::uint8_t> t(g.cells(), 0);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = out.a.occ[i] | out.a0.occ[i];
  out.a_tilde = make_set(g, std::move(t));
  for (std::size_t i = 0; i < g.cells(); ++i)
    if (omega->occ[i] && out.a_tilde.occ[i] != out.a.occ[i])
      fail(ErrorKind::Internal, "extension changed the set inside the domain");

  const BoundaryFaceSet ft = boundary_faces(out.a_tilde, omega.get());
  rep.lhs_interior = class_integral(ft, dist, params.p, FaceClass::Interior);
  rep.lhs_exterior = class_integral(ft, dist, params.p, FaceClass::Exterior, &rep.truncated_faces);
  rep.lhs_touching = ft.on_boundary * ft.face_area();
  rep.lhs_finite = rep.lhs_exterior + rep.lhs_interior;
  rep.total = make_ratio(rep.lhs_finite, rep.rhs);

  // The interior faces of A~ are those of A, its exterior faces those of A_0.
  const BoundaryFaceSet f0 = boundary_faces(out.a0, omega.get());
  auto same = [](const BoundaryFaceSet& x, const BoundaryFaceSet& y, FaceClass cls) {
    std::vector<const Face*> px, py;
    for (const Face& f : x.faces)
      if (f.cls == cls) px.push_back(&f);
    for (const Face& f : y.faces)
      if (f.cls == cls) py.push_back(&f);
    if (px.size() != py.size()) return false;
    for (std::size_t k = 0; k < px.size(); ++k)
      if (px[k]->axis != py[k]->axis || px[k]->cell != py[k]->cell) return false;
    return true;
  };
  rep.split_ok = ft.interior + ft.exterior + ft.on_boundary == ft.faces.size() &&
                 same(ft, fa, FaceClass::Interior) && same(ft, f0, FaceClass::Exterior);

  if (params.lemmas) {
    rep.lemma31 = verify_lemma_31(out.a, out.a_prime, dist, params.p);
    const PartitionOfUnity pou(*out.interior);
    const SmoothedIndicator u = smooth_indicator(pou, out.a_prime.occ);
    const double energy = energy_of(u, params.p, params.energy_per_side);
    const BoundaryFaceSet fp = boundary_faces(out.a_prime, omega.get());
    rep.lemma32 = make_ratio(energy, class_integral(fp, dist, params.p, FaceClass::Interior));
    rep.lemma33 = lemma33_from(out.a0, u, energy, dist, params.p);
  }
  return out;
}

LemmaRatio verify_lemma_31(const VoxelSet& a, const VoxelSet& a_prime, const DistanceField& dist,
                           double p) {
  const VoxelDomain* omega = a.parent;
  const double rhs = class_integral(boundary_faces(a, omega), dist, p, FaceClass::Interior);
  const double lhs = class_integral(boundary_faces(a_prime, omega), dist, p, FaceClass::Interior);
  return make_ratio(lhs, rhs);
}

LemmaRatio verify_lemma_32(const VoxelSet& f, const PartitionOfUnity& pou,
                           const DistanceField& dist, double p, int per_side) {
  const WhitneyDecomposition& dec = pou.decomposition();
  std::vector<std::size_t> count(dec.cubes.size(), 0);
  for (std::size_t c = 0; c < f.occ.size(); ++c)
    if (f.occ[c] && dec.label[c] >= 0) ++count[dec.label[c]];
  for (std::size_t i = 0; i < count.size(); ++i)
    if (count[i] != 0 && count[i] != cube_volume_cells(dec, static_cast<int>(i)))
      fail(ErrorKind::PreconditionNotMet, "F is not a union of Whitney cubes");
  const SmoothedIndicator u = smooth_indicator(pou, f.occ);
  const double energy = energy_of(u, p, per_side);
  const double j = class_integral(boundary_faces(f, f.parent), dist, p, FaceClass::Interior);
  return make_ratio(energy, j);
}

LemmaRatio verify_lemma_33(const VoxelSet& a0, const SmoothedIndicator& u,
                           const DistanceField& dist, double p, int per_side) {
  return lemma33_from(a0, u, energy_of(u, p, per_side), dist, p);
}

Lemma34Report verify_lemma_34(const ExtensionResult& ext, std::size_t samples, double delta) {
  Lemma34Report rep;
  rep.delta = delta;
  const VoxelDomain& omega = *ext.domain;
  const Grid& g = omega.grid;
  for (double r = 0.5; r >= 2 * g.h(); r *= 0.5) rep.radii.push_back(r);
  const BoundaryFaceSet fo = boundary_faces(make_set(g, omega.occ));
  if (fo.faces.empty() || samples == 0) return rep;
  const std::size_t stride = std::max<std::size_t>(1, fo.faces.size() / samples);
  std::vector<Vec3> xs;
  for (std::size_t k = 0; k < fo.faces.size() && xs.size() < samples; k += stride)
    xs.push_back(fo.centroid(fo.faces[k]));
  rep.samples = xs.size();
  const std::size_t nr = rep.radii.size();
  rep.bad_a_prime.assign(nr, 0);
  rep.bad_a.assign(nr, 0);
  rep.bad_tilde.assign(nr, 0);
  const std::int64_t ns = static_cast<std::int64_t>(xs.size());
  std::vector<std::vector<std::uint8_t>> flags(ns, std::vector<std::uint8_t>(3 * nr, 0));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < ns; ++s) {
    const auto dp = density_profile(ext.a_prime, xs[s], rep.radii, DensityBase::Domain);
    const auto da = density_profile(ext.a, xs[s], rep.radii, DensityBase::Domain);
    const auto dt = density_profile(ext.a_tilde, xs[s], rep.radii, DensityBase::Whole);
    for (std::size_t k = 0; k < nr; ++k) {
      auto bad = [&](double v) { return v > delta && v < 1 - delta; };
      flags[s][k] = bad(dp.ratios[k]);
      flags[s][nr + k] = bad(da.ratios[k]);
      flags[s][2 * nr + k] = bad(dt.ratios[k]);
    }
  }
  for (std::int64_t s = 0; s < ns; ++s)
    for (std::size_t k = 0; k < nr; ++k) {
      rep.bad_a_prime[k] += flags[s][k];
      rep.bad_a[k] += flags[s][nr + k];
      rep.bad_tilde[k] += flags[s][2 * nr + k];
    }
  for (std::size_t k = 0; k < nr; ++k) {
    rep.bad_a_prime[k] /= ns;
    rep.bad_a[k] /= ns;
    rep.bad_tilde[k] /= ns;
  }
  return rep;
}

}  // namespace sobext
