#include "sobext/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const Vec3& a, const Vec3& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

// Boundary face centroids in cell order.
std::vector<Vec3> boundary_points(const VoxelDomain& dom) {
  const Grid& g = dom.grid;
  std::vector<Vec3> pts;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    if (!dom.occ[c]) continue;
    const Idx3 q = g.coords(c);
    for (int a = 0; a < g.dim; ++a)
      for (int s : {-1, 1}) {
        Idx3 r = q;
        r[a] += s;
        if (dom.in(r)) continue;
        Vec3 x = g.center(q);
        x[a] += 0.5 * s * g.h();
        pts.push_back(x);
      }
  }
  return pts;
}

}  // namespace

GeodesicSolver::GeodesicSolver(const VoxelDomain& dom, const DistanceField& dist,
                               GeodesicOptions opt)
    : dom_(&dom), dist_(&dist), opt_(opt) {
  const Grid& g = dom.grid;
  if (!(dist.grid == g)) fail(ErrorKind::PreconditionNotMet, "distance field grid differs");
  for (int a = 0; a < g.dim; ++a)
    if (dom.periodic[a]) fail(ErrorKind::PreconditionNotMet, "geodesics need a non-periodic domain");
  if (opt.weight == WeightKind::Power && !(opt.p >= 1 && opt.p < 2))
    fail(ErrorKind::UnsupportedExponent, "geodesic weight needs 1 <= p < 2");
  const std::size_t n = g.cells();
  weight_.assign(n, kInf);
  side_.assign(n, 0);
  barred_.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    side_[c] = (dom.occ[c] != 0) == (opt.side == Side::Interior);
    if (!side_[c]) continue;
    const std::uint32_t s = dist.center_sq(g.coords(c));
    const double d = dist.to_length(s);
    if (opt.weight == WeightKind::InverseDistance) {
      weight_[c] = 1 / d;
    } else if (opt.p == 1) {
      weight_[c] = 1;
      barred_[c] = s <= 1;  // a face of the cell lies on the boundary
    } else {
      weight_[c] = std::pow(d, 1 - opt.p);
    }
  }
  const int kz = g.dim == 3 ? 1 : 0;
  for (int dz = -kz; dz <= kz; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy && !dz) continue;
        offsets_.push_back({dx, dy, dz});
        offset_len_.push_back(g.h() * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz)));
      }
}

bool GeodesicSolver::on_side(std::size_t cell) const { return side_[cell] != 0; }

bool GeodesicSolver::admissible(std::size_t cell) const { return side_[cell] && !barred_[cell]; }

std::int64_t GeodesicSolver::node_of(const Vec3& z) const {
  const Grid& g = dom_->grid;
  const Idx3 c = g.cell_of(z);
  std::int64_t best = -1;
  double best_d = kInf;
  for (int r = 1; r <= 2 && best < 0; ++r) {
    const int kz = g.dim == 3 ? r : 0;
    for (int dz = -kz; dz <= kz; ++dz)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const Idx3 q{c[0] + dx, c[1] + dy, c[2] + dz};
          if (!g.contains(q)) continue;
          const std::size_t idx = g.index(q);
          if (!side_[idx]) continue;
          const double d = norm(g.center(q), z);
          if (d < best_d || (d == best_d && static_cast<std::int64_t>(idx) < best)) {
            best_d = d;
            best = static_cast<std::int64_t>(idx);
          }
        }
  }
  return best;
}

std::vector<std::pair<std::size_t, double>> GeodesicSolver::neighbors(std::size_t cell) const {
  std::vector<std::pair<std::size_t, double>> out;
  const Grid& g = dom_->grid;
  const Idx3 c = g.coords(cell);
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    const Idx3 q{c[0] + offsets_[k][0], c[1] + offsets_[k][1], c[2] + offsets_[k][2]};
    if (!g.contains(q)) continue;
    const std::size_t idx = g.index(q);
    if (!admissible(idx)) continue;
    out.emplace_back(idx, offset_len_[k] * 0.5 * (weight_[cell] + weight_[idx]));
  }
  return out;
}

namespace {

// Dijkstra from `src`; `dst` may be barred and is still entered. Returns the
// reached target cost (kInf when unreachable; dst < 0 searches everything).
double dijkstra(const GeodesicSolver& s, const Grid& g, std::size_t src, std::int64_t dst,
                GeodesicWorkspace& ws) {
  const std::size_t n = g.cells();
  if (ws.cost.size() != n) {
    ws.cost.assign(n, kInf);
    ws.parent.assign(n, -1);
    ws.stamp.assign(n, 0);
    ws.generation = 0;
  }
  if (++ws.generation == 0) {
    std::fill(ws.stamp.begin(), ws.stamp.end(), 0);
    ws.generation = 1;
  }
  const std::uint32_t gen = ws.generation;
  auto cost = [&](std::size_t v) { return ws.stamp[v] == gen ? ws.cost[v] : kInf; };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  ws.stamp[src] = gen;
  ws.cost[src] = 0;
  ws.parent[src] = -1;
  heap.emplace(0.0, src);
  while (!heap.empty()) {
    const auto [cu, u] = heap.top();
    heap.pop();
    if (cu > cost(u)) continue;
    if (static_cast<std::int64_t>(u) == dst) return cu;
    // The source may be barred; it still expands.
    for (const auto& [v, w] : s.neighbors(u)) {
      const double cv = cu + w;
      if (cv < cost(v)) {
        ws.stamp[v] = gen;
        ws.cost[v] = cv;
        ws.parent[v] = static_cast<std::int32_t>(u);
        heap.emplace(cv, v);
      }
    }
    if (dst >= 0 && !s.admissible(static_cast<std::size_t>(dst))) {
      // A barred target is entered from any admissible neighbor.
      const Idx3 a = g.coords(u), b = g.coords(static_cast<std::size_t>(dst));
      bool adj = true;
      for (int ax = 0; ax < 3; ++ax) adj = adj && std::abs(a[ax] - b[ax]) <= 1;
      if (adj) {
        const double len = norm(g.center(a), g.center(b));
        const double cv = cu + len * 0.5 * (s.weight(u) + s.weight(static_cast<std::size_t>(dst)));
        if (cv < cost(static_cast<std::size_t>(dst))) {
          ws.stamp[dst] = gen;
          ws.cost[dst] = cv;
          ws.parent[dst] = static_cast<std::int32_t>(u);
          heap.emplace(cv, static_cast<std::size_t>(dst));
        }
      }
    }
  }
  return dst < 0 ? 0 : kInf;
}

}  // namespace

std::vector<double> GeodesicSolver::costs_from(std::size_t source) const {
  GeodesicWorkspace ws;
  dijkstra(*this, dom_->grid, source, -1, ws);
  std::vector<double> out(ws.cost.size(), kInf);
  for (std::size_t v = 0; v < out.size(); ++v)
    if (ws.stamp[v] == ws.generation) out[v] = ws.cost[v];
  return out;
}

GeodesicPath GeodesicSolver::solve(const Vec3& z1, const Vec3& z2, GeodesicWorkspace* ws) const {
  GeodesicPath path;
  if (z1 == z2) {
    path.points = {z1};
    return path;
  }
  const std::int64_t a = node_of(z1), b = node_of(z2);
  if (a < 0 || b < 0) fail(ErrorKind::PreconditionNotMet, "endpoint outside the closed side region");
  const Grid& g = dom_->grid;
  GeodesicWorkspace local;
  GeodesicWorkspace& w = ws ? *ws : local;
  std::vector<std::size_t> cells;
  if (a != b) {
    if (dijkstra(*this, g, static_cast<std::size_t>(a), b, w) == kInf)
      fail(ErrorKind::Unreachable, "endpoints lie in different components");
    for (std::int64_t v = b; v >= 0; v = w.parent[v]) cells.push_back(static_cast<std::size_t>(v));
    std::reverse(cells.begin(), cells.end());
  } else {
    cells.push_back(static_cast<std::size_t>(a));
  }
  auto add = [&](const Vec3& p, double len, double wt) {
    if (len == 0) return;
    path.points.push_back(p);
    path.lengths.push_back(len);
    path.weights.push_back(wt);
    path.cost += len * wt;
    path.length += len;
  };
  path.points.push_back(z1);
  add(g.center(g.coords(cells[0])), norm(z1, g.center(g.coords(cells[0]))), weight_[cells[0]]);
  for (std::size_t k = 1; k < cells.size(); ++k) {
    const Vec3 p = g.center(g.coords(cells[k]));
    add(p, norm(path.points.back(), p), 0.5 * (weight_[cells[k - 1]] + weight_[cells[k]]));
  }
  add(z2, norm(path.points.back(), z2), weight_[cells.back()]);
  return path;
}

std::vector<CurvePair> sample_boundary_pairs(const VoxelDomain& dom, const std::vector<double>& scales,
                                             int per_scale, std::uint64_t seed) {
  const std::vector<Vec3> pts = boundary_points(dom);
  if (pts.empty()) fail(ErrorKind::InvalidDomain, "domain has no boundary");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  std::vector<CurvePair> out;
  for (double s : scales)
    for (int t = 0; t < per_scale; ++t) {
      CurvePair cp;
      cp.scale = s;
      cp.z1 = pts[pick(rng)];
      double best = kInf;
      for (const Vec3& y : pts) {
        const double e = std::abs(norm(cp.z1, y) - s);
        if (e < best) {
          best = e;
          cp.z2 = y;
        }
      }
      cp.separation = norm(cp.z1, cp.z2);
      out.push_back(cp);
    }
  return out;
}

std::vector<CurvePair> cusp_pairs(double alpha, const std::vector<double>& scales) {
  std::vector<CurvePair> out;
  for (double s : scales) {
    CurvePair cp;
    cp.scale = s;
    cp.z1 = {0.5 - std::pow(s, alpha), 0.5 + s, 0};
    cp.z2 = {0.5 + std::pow(2 * s, alpha), 0.5 + 2 * s, 0};
    cp.separation = norm(cp.z1, cp.z2);
    out.push_back(cp);
  }
  return out;
}

CurveConditionReport evaluate_pairs(const VoxelDomain& dom, std::vector<CurvePair> pairs,
                                    const ScanOptions& opt) {
  const int margin = std::max(0, opt.margin_units) << dom.grid.level;
  const VoxelDomain work = margin > 0 ? embed(dom, margin) : dom;
  const DistanceField dist = distance_transform(work);
  GeodesicOptions go;
  go.p = opt.p;
  const GeodesicSolver solver(work, dist, go);
  const std::int64_t n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel
  {
    GeodesicWorkspace ws;
#pragma omp for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      CurvePair& cp = pairs[i];
      const GeodesicPath path = solver.solve(cp.z1, cp.z2, &ws);
      cp.cost = path.cost;
      cp.length = path.length;
      cp.ratio = cp.separation > 0 ? cp.cost / std::pow(cp.separation, 2 - opt.p) : 0;
    }
  }
  CurveConditionReport rep;
  rep.level = dom.grid.level;
  rep.p = opt.p;
  for (const CurvePair& cp : pairs) {
    auto it = std::find(rep.scales.begin(), rep.scales.end(), cp.scale);
    if (it == rep.scales.end()) {
      rep.scales.push_back(cp.scale);
      rep.scale_max.push_back(cp.ratio);
    } else {
      double& m = rep.scale_max[it - rep.scales.begin()];
      m = std::max(m, cp.ratio);
    }
    rep.sup_ratio = std::max(rep.sup_ratio, cp.ratio);
  }
  rep.pairs = std::move(pairs);
  return rep;
}

CurveConditionReport cusp_scan(double alpha, double p, const std::vector<double>& scales,
                               int per_width, int min_level) {
  CurveConditionReport rep;
  rep.p = p;
  ScanOptions opt;
  opt.p = p;
  opt.margin_units = 0;
  for (double s : scales) {
    if (!(s > 0 && s <= 0.125)) fail(ErrorKind::Usage, "cusp scales must lie in (0, 1/8]");
    const double width = 2 * std::pow(s, alpha);
    const int level = std::max(min_level, static_cast<int>(std::ceil(std::log2(per_width / width))));
    const double h = std::ldexp(1.0, -level);
    GeneratorSpec spec;
    spec.tag = "outward_cusp";
    spec.params["alpha"] = alpha;
    spec.params["win_x"] = 0.5 - 2 * s;
    spec.params["win_y"] = 0.5 - s;
    spec.params["win_cells"] = std::ceil(4 * s / h);
    const VoxelDomain dom = build_domain(spec, level);
    const CurveConditionReport one = evaluate_pairs(dom, cusp_pairs(alpha, {s}), opt);
    rep.pairs.push_back(one.pairs[0]);
    rep.scales.push_back(s);
    rep.scale_max.push_back(one.pairs[0].ratio);
    rep.sup_ratio = std::max(rep.sup_ratio, one.pairs[0].ratio);
    rep.level = std::max(rep.level, level);
  }
  return rep;
}

CurveConditionReport curve_condition_scan(const VoxelDomain& dom, const ScanOptions& opt) {
  if (dom.grid.dim != 2) fail(ErrorKind::PreconditionNotMet, "the curve condition scan is planar");
  if (opt.pairs_per_scale < 1) fail(ErrorKind::Usage, "need at least one pair per scale");
  std::vector<double> scales = opt.scales;
  if (scales.empty()) {
    const Vec3 lo = dom.grid.lo(), hi = dom.grid.hi();
    double diam = std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
    for (double s = diam / 2; s >= 16 * dom.grid.h(); s /= 2) scales.push_back(s);
  }
  return evaluate_pairs(dom, sample_boundary_pairs(dom, scales, opt.pairs_per_scale, opt.seed), opt);
}

CigReport cig_check(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x, const Vec3& y) {
  CigReport rep;
  GeodesicOptions go;
  go.side = Side::Interior;
  go.weight = WeightKind::InverseDistance;
  const GeodesicSolver solver(dom, dist, go);
  rep.path = solver.solve(x, y);
  const auto& pts = rep.path.points;
  const std::size_t m = pts.size();
  if (m < 2) return rep;
  std::vector<double> pre_len(m, 0), pre_diam(m, 0), suf_diam(m, 0);
  for (std::size_t k = 1; k < m; ++k) {
    pre_len[k] = pre_len[k - 1] + rep.path.lengths[k - 1];
    double d = pre_diam[k - 1];
    for (std::size_t j = 0; j < k; ++j) d = std::max(d, norm(pts[j], pts[k]));
    pre_diam[k] = d;
  }
  for (std::size_t k = m - 1; k-- > 0;) {
    double d = suf_diam[k + 1];
    for (std::size_t j = k + 1; j < m; ++j) d = std::max(d, norm(pts[j], pts[k]));
    suf_diam[k] = d;
  }
  // Interior vertices are cell centers with positive distance.
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double dz = dist.center(dom.grid.cell_of(pts[k]));
    rep.cig_d = std::max(rep.cig_d, std::min(pre_diam[k], suf_diam[k]) / dz);
    rep.cig_l = std::max(rep.cig_l, std::min(pre_len[k], pre_len[m - 1] - pre_len[k]) / dz);
  }
  return rep;
}

JohnReport john_check(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x0,
                      std::size_t samples) {
  const std::vector<Vec3> pts = boundary_points(dom);
  std::vector<Vec3> chosen;
  if (!pts.empty() && samples > 0) {
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / samples);
    for (std::size_t k = 0; k < pts.size() && chosen.size() < samples; k += stride)
      chosen.push_back(pts[k]);
  }
  return john_check_points(dom, dist, x0, std::move(chosen));
}

JohnReport john_check_points(const VoxelDomain& dom, const DistanceField& dist, const Vec3& x0,
                             std::vector<Vec3> samples) {
  JohnReport rep;
  const Grid& g = dom.grid;
  if (!dom.in(g.cell_of(x0))) fail(ErrorKind::PreconditionNotMet, "x0 must lie in the domain");
  GeodesicOptions go;
  go.side = Side::Interior;
  go.weight = WeightKind::InverseDistance;
  const GeodesicSolver solver(dom, dist, go);
  rep.samples = std::move(samples);
  rep.per_sample.assign(rep.samples.size(), 0);
  const std::int64_t n = static_cast<std::int64_t>(rep.samples.size());
#pragma omp parallel
  {
    GeodesicWorkspace ws;
#pragma omp for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
      const GeodesicPath path = solver.solve(rep.samples[i], x0, &ws);
      double t = 0, j = 0;
      for (std::size_t k = 1; k < path.points.size(); ++k) {
        t += path.lengths[k - 1];
        j = std::max(j, t / dist.center(g.cell_of(path.points[k])));
      }
      rep.per_sample[i] = j;
    }
  }
  for (double v : rep.per_sample) rep.j = std::max(rep.j, v);
  return rep;
}

std::string path_svg(const std::vector<GeodesicPath>& paths, const VoxelDomain& dom) {
  const Grid& g = dom.grid;
  const Vec3 lo = g.lo(), hi = g.hi();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << lo[0] << ' ' << -hi[1] << ' '
     << hi[0] - lo[0] << ' ' << hi[1] - lo[1] << "\">\n";
  for (const auto& p : paths) {
    os << "<path fill=\"none\" stroke=\"blue\" stroke-width=\"" << 2 * g.h() << "\" d=\"";
    for (std::size_t k = 0; k < p.points.size(); ++k)
      os << (k ? 'L' : 'M') << p.points[k][0] << ' ' << -p.points[k][1];
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sobext
