#include "sobext/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

// Counts of out-cells over boxes, by summed-area table.
class OutCounter {
 public:
  explicit OutCounter(const VoxelDomain& dom) : g_(dom.grid) {
    n_ = {g_.size[0] + 1, g_.size[1] + 1, g_.size[2] + 1};
    sat_.assign(static_cast<std::size_t>(n_[0]) * n_[1] * n_[2], 0);
    for (int k = 0; k < g_.size[2]; ++k)
      for (int j = 0; j < g_.size[1]; ++j)
        for (int i = 0; i < g_.size[0]; ++i) {
          const std::uint32_t out = dom.occ[g_.index(i, j, k)] ? 0 : 1;
          at(i + 1, j + 1, k + 1) = out + at(i, j + 1, k + 1) + at(i + 1, j, k + 1) +
                                    at(i + 1, j + 1, k) - at(i, j, k + 1) - at(i, j + 1, k) -
                                    at(i + 1, j, k) + at(i, j, k);
        }
  }

  std::int64_t count(const Idx3& lo, const Idx3& hi) const {  // half-open
    auto v = [&](int i, int j, int k) { return static_cast<std::int64_t>(get(i, j, k)); };
    return v(hi[0], hi[1], hi[2]) - v(lo[0], hi[1], hi[2]) - v(hi[0], lo[1], hi[2]) -
           v(hi[0], hi[1], lo[2]) + v(lo[0], lo[1], hi[2]) + v(lo[0], hi[1], lo[2]) +
           v(hi[0], lo[1], lo[2]) - v(lo[0], lo[1], lo[2]);
  }

 private:
  std::uint32_t& at(int i, int j, int k) {
    return sat_[(static_cast<std::size_t>(k) * n_[1] + j) * n_[0] + i];
  }
  std::uint32_t get(int i, int j, int k) const {
    return sat_[(static_cast<std::size_t>(k) * n_[1] + j) * n_[0] + i];
  }
  Grid g_;
  Idx3 n_;
  std::vector<std::uint32_t> sat_;
};

// Minimum of the vertex field over the surface vertices of a box of side s.
std::uint32_t surface_min(const DistanceField& vf, int dim, const Idx3& lo, int s) {
  std::uint32_t best = kInfSq;
  const int kmax = dim == 3 ? s : 0;
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= s; ++j) {
      const bool edge = j == 0 || j == s || (dim == 3 && (k == 0 || k == kmax));
      const int step = edge ? 1 : s;
      for (int i = 0; i <= s; i += step) {
        best = std::min(best, vf.vertex_sq({lo[0] + i, lo[1] + j, lo[2] + k}));
        if (best == 0) return 0;
      }
    }
  return best;
}

int top_level(const Grid& g) {
  std::int64_t s = std::int64_t{1} << g.level;
  auto aligned = [&](std::int64_t v) { return v % s == 0; };
  for (;;) {
    bool ok = true;
    for (int a = 0; a < g.dim; ++a)
      if (!aligned(g.origin[a]) || !aligned(g.size[a]) || g.size[a] < s) ok = false;
    if (ok || s == 1) break;
    s /= 2;
  }
  int level = g.level;
  while ((std::int64_t{1} << (g.level - level)) < s) --level;
  return level;
}

void build_adjacency(WhitneyDecomposition& dec) {
  const Grid& g = dec.grid;
  std::vector<Idx3> offsets;
  const int zr = g.dim == 3 ? 1 : 0;
  for (int dz = -zr; dz <= zr; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Idx3 o{dx, dy, dz};
        // Lexicographically positive half.
        if (dz > 0 || (dz == 0 && (dy > 0 || (dy == 0 && dx > 0)))) offsets.push_back(o);
      }
  struct Pair {
    int a, b;
    bool face;
  };
  std::vector<Pair> pairs;
  for (std::size_t idx = 0; idx < dec.label.size(); ++idx) {
    const int a = dec.label[idx];
    if (a < 0) continue;
    const Idx3 c = g.coords(idx);
    for (const Idx3& o : offsets) {
      Idx3 d{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      bool inside = true;
      for (int ax = 0; ax < g.dim; ++ax) {
        if (d[ax] >= 0 && d[ax] < g.size[ax]) continue;
        if (dec.periodic[ax]) d[ax] = (d[ax] + g.size[ax]) % g.size[ax];
        else inside = false;
      }
      if (!inside) continue;
      const int b = dec.label[g.index(d)];
      if (b < 0 || b == a) continue;
      const bool face = std::abs(o[0]) + std::abs(o[1]) + std::abs(o[2]) == 1;
      pairs.push_back({std::min(a, b), std::max(a, b), face});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::make_tuple(x.a, x.b, !x.face) < std::make_tuple(y.a, y.b, !y.face);
  });
  dec.touching.assign(dec.cubes.size(), {});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (k > 0 && pairs[k].a == pairs[k - 1].a && pairs[k].b == pairs[k - 1].b) continue;
    dec.touch_pairs.emplace_back(pairs[k].a, pairs[k].b);
    if (pairs[k].face) dec.face_pairs.emplace_back(pairs[k].a, pairs[k].b);
    dec.touching[pairs[k].a].push_back(pairs[k].b);
    dec.touching[pairs[k].b].push_back(pairs[k].a);
  }
  for (auto& t : dec.touching) std::sort(t.begin(), t.end());
}

}  // namespace

Idx3 WhitneyDecomposition::lo_cell(int i) const {
  Idx3 c{0, 0, 0};
  for (int a = 0; a < grid.dim; ++a)
    c[a] = static_cast<int>(cubes[i].lo_cells(a, grid.level) - grid.origin[a]);
  return c;
}

int WhitneyDecomposition::cube_at(const Vec3& x) const {
  Idx3 c = grid.cell_of(x);
  for (int a = 0; a < grid.dim; ++a) {
    if (periodic[a]) c[a] = ((c[a] % grid.size[a]) + grid.size[a]) % grid.size[a];
    if (c[a] < 0 || c[a] >= grid.size[a]) return -1;
  }
  return label[grid.index(c)];
}

WhitneyDecomposition whitney_decompose(const VoxelDomain& dom, int max_level) {
  const Grid& g = dom.grid;
  if (max_level < 0) max_level = g.level;
  if (max_level > g.level)
    fail(ErrorKind::PreconditionNotMet, "L_max exceeds the grid resolution");
  const int l0 = top_level(g);
  if (max_level < l0)
    fail(ErrorKind::PreconditionNotMet, "L_max is coarser than the bbox tiling level");
  if (dom.boundary_face_count() == 0) fail(ErrorKind::InvalidDomain, "domain has no boundary");

  WhitneyDecomposition dec;
  dec.grid = g;
  dec.periodic = dom.periodic;
  dec.max_level = max_level;
  dec.label.assign(g.cells(), -1);
  dec.collar.assign(g.cells(), 0);

  const DistanceField vf = vertex_distance(dom, Exec::Parallel);
  const OutCounter outs(dom);

  const std::int64_t s0 = std::int64_t{1} << (g.level - l0);
  std::vector<DyadicCube> stack;
  {
    Idx3 n{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) n[a] = static_cast<int>(g.size[a] / s0);
    // Reverse order so the stack pops in lexicographic order.
    for (int k = n[2] - 1; k >= 0; --k)
      for (int j = n[1] - 1; j >= 0; --j)
        for (int i = n[0] - 1; i >= 0; --i) {
          DyadicCube q{g.dim, l0, {0, 0, 0}};
          const Idx3 ijk{i, j, k};
          for (int a = 0; a < g.dim; ++a) q.index[a] = g.origin[a] / s0 + ijk[a];
          stack.push_back(q);
        }
  }

  while (!stack.empty()) {
    const DyadicCube q = stack.back();
    stack.pop_back();
    const int s = static_cast<int>(q.side_cells(g.level));
    Idx3 lo{0, 0, 0}, hi{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) {
      lo[a] = static_cast<int>(q.lo_cells(a, g.level) - g.origin[a]);
      hi[a] = lo[a] + s;
    }
    const std::int64_t out = outs.count(lo, hi);
    std::int64_t volume = 1;
    for (int a = 0; a < g.dim; ++a) volume *= s;
    if (out == volume) continue;  // entirely outside
    const bool accept =
        out == 0 && static_cast<std::uint64_t>(surface_min(vf, g.dim, lo, s)) >=
                        4 * static_cast<std::uint64_t>(s) * s;
    if (accept) {
      const int id = static_cast<int>(dec.cubes.size());
      dec.cubes.push_back(q);
      for (int k = lo[2]; k < hi[2]; ++k)
        for (int j = lo[1]; j < hi[1]; ++j)
          for (int i = lo[0]; i < hi[0]; ++i) dec.label[g.index(i, j, k)] = id;
      continue;
    }
    if (q.level == max_level) {
      for (int k = lo[2]; k < hi[2]; ++k)
        for (int j = lo[1]; j < hi[1]; ++j)
          for (int i = lo[0]; i < hi[0]; ++i) {
            const std::size_t idx = g.index(i, j, k);
            if (dom.occ[idx]) {
              dec.collar[idx] = 1;
              ++dec.collar_cells;
            }
          }
      continue;
    }
    const int children = 1 << g.dim;
    for (int b = children - 1; b >= 0; --b) stack.push_back(q.child(b));
  }
  dec.synthetic.assign(dec.cubes.size(), 0);
  build_adjacency(dec);
  return dec;
}

VoxelDomain exterior_domain(const VoxelDomain& dom, int margin_cells) {
  return complement(embed(dom, margin_cells));
}

WhitneyDecomposition exterior_whitney(const VoxelDomain& dom, int margin_cells, int max_level) {
  const VoxelDomain ext = exterior_domain(dom, margin_cells);
  WhitneyDecomposition dec = whitney_decompose(ext, max_level);
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const Idx3 lo = dec.lo_cell(static_cast<int>(i));
    const int s = static_cast<int>(dec.side_cells(static_cast<int>(i)));
    for (int a = 0; a < dec.grid.dim; ++a)
      if (lo[a] == 0 || lo[a] + s == dec.grid.size[a]) dec.synthetic[i] = 1;
  }
  return dec;
}

std::uint64_t cube_distance_sq(const WhitneyDecomposition& dec, const DistanceField& vf, int i) {
  const Idx3 lo = dec.lo_cell(i);
  const int s = static_cast<int>(dec.side_cells(i));
  const int kmax = dec.grid.dim == 3 ? s : 0;
  std::uint32_t best = kInfSq;
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= s; ++j)
      for (int x = 0; x <= s; ++x)
        best = std::min(best, vf.vertex_sq({lo[0] + x, lo[1] + j, lo[2] + k}));
  return best == kInfSq ? ~std::uint64_t{0} : best / 4;
}

WhitneyAudit audit_whitney(const WhitneyDecomposition& dec, const VoxelDomain& dom) {
  WhitneyAudit out;
  const Grid& g = dec.grid;
  out.cubes = dec.cubes.size();
  out.collar_cells = dec.collar_cells;
  out.face_pairs = dec.face_pairs.size();
  out.touch_pairs = dec.touch_pairs.size();
  const DistanceField vf = vertex_distance(dom, Exec::Parallel);

  std::vector<std::uint8_t> cover(g.cells(), 0);
  const int n = g.dim;
  out.min_dist_ratio = 1e300;
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const DyadicCube& q = dec.cubes[i];
    // (W1) dyadic, aligned, inside the grid and the domain.
    bool w1 = q.dim == n && q.level <= g.level;
    const std::int64_t s = w1 ? q.side_cells(g.level) : 1;
    Idx3 lo{0, 0, 0};
    for (int a = 0; a < n && w1; ++a) {
      const std::int64_t l = q.lo_cells(a, g.level) - g.origin[a];
      if (l < 0 || l + s > g.size[a]) w1 = false;
      lo[a] = static_cast<int>(l);
    }
    if (!w1) {
      ++out.w1_fail;
      continue;
    }
    const int kmax = n == 3 ? static_cast<int>(s) : 1;
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j < s; ++j)
        for (int x = 0; x < s; ++x) {
          const std::size_t idx = g.index(lo[0] + x, lo[1] + j, lo[2] + k);
          if (!dom.occ[idx]) w1 = false;
          if (cover[idx]++) ++out.w2_fail;
        }
    if (!w1) ++out.w1_fail;
    // (W3) l^2 <= dist^2 <= 16 n l^2, in cell units.
    const std::uint64_t d2 = cube_distance_sq(dec, vf, static_cast<int>(i));
    const std::uint64_t l2 = static_cast<std::uint64_t>(s) * s;
    if (d2 < l2 || d2 > 16 * static_cast<std::uint64_t>(n) * l2) ++out.w3_fail;
    const double ratio = std::sqrt(static_cast<double>(d2) / static_cast<double>(l2));
    out.max_dist_ratio = std::max(out.max_dist_ratio, ratio);
    out.min_dist_ratio = std::min(out.min_dist_ratio, ratio);
  }
  // (W2) every domain cell is covered exactly once or lies in the collar.
  for (std::size_t idx = 0; idx < cover.size(); ++idx) {
    const bool in = dom.occ[idx] != 0;
    const bool collar = dec.collar[idx] != 0;
    if (cover[idx] > 1) continue;  // already counted
    if (in && (cover[idx] == 1) == collar) ++out.w2_fail;
    if (!in && (cover[idx] || collar)) ++out.w2_fail;
  }
  // (W4) on every touching pair.
  for (const auto& [a, b] : dec.touch_pairs) {
    const int la = dec.cubes[a].level, lb = dec.cubes[b].level;
    if (std::abs(la - lb) > 2) ++out.w4_fail;
  }
  if (dec.cubes.empty()) out.min_dist_ratio = 0;
  return out;
}

std::vector<std::size_t> level_histogram(const WhitneyDecomposition& dec) {
  std::vector<std::size_t> h;
  for (const auto& q : dec.cubes) {
    if (q.level < 0) continue;
    if (static_cast<std::size_t>(q.level) >= h.size()) h.resize(q.level + 1, 0);
    ++h[q.level];
  }
  return h;
}

std::string whitney_text(const WhitneyDecomposition& dec) {
  std::ostringstream os;
  os << "whitney " << dec.grid.dim << " " << dec.grid.level << " " << dec.max_level << " "
     << dec.cubes.size() << "\n";
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const auto& q = dec.cubes[i];
    os << q.level;
    for (int a = 0; a < q.dim; ++a) os << " " << q.index[a];
    os << " " << (dec.synthetic[i] ? "s" : "-") << "\n";
  }
  os << "pairs " << dec.face_pairs.size() << "\n";
  for (const auto& [a, b] : dec.face_pairs) os << a << " " << b << "\n";
  return os.str();
}

std::string whitney_svg(const WhitneyDecomposition& dec) {
  if (dec.grid.dim != 2) fail(ErrorKind::PreconditionNotMet, "SVG export is 2D only");
  const Vec3 lo = dec.grid.lo(), hi = dec.grid.hi();
  const double w = hi[0] - lo[0], h = hi[1] - lo[1];
  const double px = 800.0 / std::max(w, h);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * px << "\" height=\"" << h * px
     << "\">\n";
  const int top = dec.cubes.empty() ? 0 : std::min_element(dec.cubes.begin(), dec.cubes.end(),
      [](const DyadicCube& a, const DyadicCube& b) { return a.level < b.level; })->level;
  for (const auto& q : dec.cubes) {
    const Vec3 c = q.lo();
    const double hue = std::fmod(40.0 * (q.level - top), 360.0);
    os << "<rect x=\"" << (c[0] - lo[0]) * px << "\" y=\"" << (hi[1] - c[1] - q.side()) * px
       << "\" width=\"" << q.side() * px << "\" height=\"" << q.side() * px
       << "\" fill=\"hsl(" << hue << ",70%,75%)\" stroke=\"black\" stroke-width=\"0.3\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sobext
