#include "sobext/distance.hpp"

#include <algorithm>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

using i128 = __int128;

// Lower envelope of the parabolas (q - v)^2 + f[v] over one line; `f` uses
// kInfSq for "no site". Comparisons are exact.
class Envelope {
 public:
  void run(const std::uint32_t* f, std::uint32_t* out, int n) {
    v_.resize(n);
    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (f[q] == kInfSq) continue;
      while (k >= 1 && !before(f, v_[k - 1], v_[k], q)) --k;
      v_[++k] = q;
    }
    if (k < 0) {
      std::fill(out, out + n, kInfSq);
      return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (j < k && cross_below(f, v_[j], v_[j + 1], q)) ++j;
      const std::int64_t d = q - v_[j];
      out[q] = static_cast<std::uint32_t>(d * d + f[v_[j]]);
    }
  }

 private:
  static i128 F(const std::uint32_t* f, int q) { return i128(f[q]) + i128(q) * q; }

  // Intersection of parabolas (a,b) lies strictly left of that of (b,c).
  static bool before(const std::uint32_t* f, int a, int b, int c) {
    return (F(f, b) - F(f, a)) * (c - b) < (F(f, c) - F(f, b)) * (b - a);
  }

  // Intersection of parabolas (a,b) lies left of q, so b wins at q.
  static bool cross_below(const std::uint32_t* f, int a, int b, int q) {
    return F(f, b) - F(f, a) < i128(2) * q * (b - a) + 0;
  }

  std::vector<int> v_;
};

void pass(std::vector<std::uint32_t>& g, const Idx3& size, int axis, bool periodic, Exec exec) {
  const int n = size[axis];
  std::int64_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= size[a];
  const std::int64_t lines = static_cast<std::int64_t>(g.size()) / n;
  const int len = periodic ? 3 * n : n;

  auto line_base = [&](std::int64_t line) {
    const std::int64_t inner = line % stride;
    const std::int64_t outer = line / stride;
    return outer * stride * n + inner;
  };

#pragma omp parallel if (exec == Exec::Parallel)
  {
    Envelope env;
    std::vector<std::uint32_t> in(len), out(len);
#pragma omp for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) {
      const std::int64_t base = line_base(line);
      for (int q = 0; q < len; ++q) in[q] = g[base + (q % n) * stride];
      env.run(in.data(), out.data(), len);
      const int off = periodic ? n : 0;
      for (int q = 0; q < n; ++q) g[base + q * stride] = out[off + q];
    }
  }
}

}  // namespace

std::vector<std::uint32_t> edt_sq(const std::vector<std::uint8_t>& sites, Idx3 size,
                                  std::array<bool, 3> periodic, Exec exec) {
  const std::size_t total = static_cast<std::size_t>(size[0]) * size[1] * size[2];
  if (sites.size() != total) fail(ErrorKind::PreconditionNotMet, "edt_sq: size mismatch");
  std::vector<std::uint32_t> g(total);
  for (std::size_t i = 0; i < total; ++i) g[i] = sites[i] ? 0 : kInfSq;
  for (int a = 0; a < 3; ++a)
    if (size[a] > 1) pass(g, size, a, periodic[a], exec);
  return g;
}

namespace {

std::vector<std::uint8_t> mark_sites(const VoxelDomain& dom, Idx3& lat, bool corners) {
  const Grid& g = dom.grid;
  lat = {1, 1, 1};
  for (int a = 0; a < g.dim; ++a) lat[a] = dom.periodic[a] ? 2 * g.size[a] : 2 * g.size[a] + 1;
  std::vector<std::uint8_t> sites(static_cast<std::size_t>(lat[0]) * lat[1] * lat[2], 0);
  auto mark = [&](Idx3 p) {
    for (int a = 0; a < g.dim; ++a)
      if (dom.periodic[a]) p[a] = ((p[a] % lat[a]) + lat[a]) % lat[a];
    sites[(static_cast<std::size_t>(p[2]) * lat[1] + p[1]) * lat[0] + p[0]] = 1;
  };
  auto mark_face = [&](int axis, const Idx3& c) {
    Idx3 p{2 * c[0] + 1, 2 * c[1] + 1, g.dim == 3 ? 2 * c[2] + 1 : 0};
    p[axis] += 1;
    if (!corners) {
      mark(p);
      return;
    }
    const int tangents = 1 << g.dim;
    for (int m = 0; m < tangents; ++m) {
      Idx3 q = p;
      bool ok = true;
      for (int a = 0; a < g.dim; ++a) {
        if (a == axis) {
          if (m >> a & 1) ok = false;
          continue;
        }
        q[a] += (m >> a & 1) ? 1 : -1;
      }
      if (ok) mark(q);
    }
  };
  for (std::size_t idx = 0; idx < dom.occ.size(); ++idx) {
    const Idx3 c = g.coords(idx);
    const bool here = dom.occ[idx] != 0;
    for (int a = 0; a < g.dim; ++a) {
      Idx3 up = c;
      ++up[a];
      if (dom.in(up) != here) mark_face(a, c);
      if (c[a] == 0 && !dom.periodic[a]) {
        Idx3 down = c;
        --down[a];
        if (dom.in(down) != here) mark_face(a, down);
      }
    }
  }
  return sites;
}

DistanceField field_from(const VoxelDomain& dom, bool corners, Exec exec) {
  DistanceField df;
  df.grid = dom.grid;
  df.periodic = dom.periodic;
  const auto sites = mark_sites(dom, df.lattice, corners);
  df.sq = edt_sq(sites, df.lattice, dom.periodic, exec);
  return df;
}

}  // namespace

std::vector<std::uint8_t> boundary_sites(const VoxelDomain& dom, Idx3& lattice) {
  return mark_sites(dom, lattice, false);
}

DistanceField distance_transform(const VoxelDomain& dom, Exec exec) {
  return field_from(dom, false, exec);
}

DistanceField vertex_distance(const VoxelDomain& dom, Exec exec) {
  return field_from(dom, true, exec);
}

}  // namespace sobext
