#include "sobext/loops.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};  // E N W S
constexpr int kDy[4] = {0, 1, 0, -1};

struct Lattice {
  int w, hgt;  // vertex counts per axis
  int id(int x, int y) const { return y * w + x; }
};

// Winding number of a closed loop around the point (cx + 1/2, cy + 1/2).
int winding_at(const JordanLoop& l, int cx, int cy) {
  int wn = 0;
  const std::size_t n = l.vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& a = l.vertices[k];
    const auto& b = l.vertices[(k + 1) % n];
    if (a[0] != b[0] || a[0] <= cx) continue;
    const int ylo = std::min(a[1], b[1]);
    if (ylo != cy) continue;
    wn += b[1] > a[1] ? 1 : -1;
  }
  return wn;
}

}  // namespace

std::vector<JordanLoop> jordan_loops(const VoxelSet& set) {
  const Grid& g = set.grid;
  if (g.dim != 2) fail(ErrorKind::PreconditionNotMet, "jordan loops need a 2D set");
  const Lattice lat{g.size[0] + 1, g.size[1] + 1};
  std::vector<std::uint8_t> out(static_cast<std::size_t>(lat.w) * lat.hgt, 0);
  // Directed edges with the set on the left.
  for (int j = -1; j < g.size[1]; ++j)
    for (int i = -1; i < g.size[0]; ++i) {
      const bool a = set.in({i, j, 0});
      if (j >= 0 && a != set.in({i + 1, j, 0})) {
        // Vertical segment x = i+1 between y = j and j+1.
        if (a) out[lat.id(i + 1, j)] |= 1 << 1;
        else out[lat.id(i + 1, j + 1)] |= 1 << 3;
      }
      if (i >= 0 && a != set.in({i, j + 1, 0})) {
        // Horizontal segment y = j+1 between x = i and i+1.
        if (a) out[lat.id(i + 1, j + 1)] |= 1 << 2;
        else out[lat.id(i, j + 1)] |= 1 << 0;
      }
    }

  std::vector<JordanLoop> loops;
  const double h = g.h();
  for (int sy = 0; sy < lat.hgt; ++sy)
    for (int sx = 0; sx < lat.w; ++sx) {
      const int start = lat.id(sx, sy);
      while (out[start]) {
        int d0 = 0;
        while (!(out[start] >> d0 & 1)) ++d0;
        out[start] &= ~(1 << d0);
        std::vector<std::array<int, 2>> walk{{sx, sy}};
        int x = sx + kDx[d0], y = sy + kDy[d0], d = d0;
        for (;;) {
          const int v = lat.id(x, y);
          int next = -1;
          for (int turn : {1, 0, 3}) {
            const int nd = (d + turn) % 4;
            if ((out[v] >> nd & 1) || (v == start && nd == d0)) {
              next = nd;
              break;
            }
          }
          if (next < 0) fail(ErrorKind::Internal, "open boundary walk");
          if (v == start && next == d0) break;
          out[v] &= ~(1 << next);
          walk.push_back({x, y});
          x += kDx[next];
          y += kDy[next];
          d = next;
        }
        // Cut the walk at repeated vertices into simple loops.
        std::vector<std::array<int, 2>> stack;
        std::unordered_map<int, std::size_t> pos;
        auto emit = [&](std::vector<std::array<int, 2>> verts) {
          JordanLoop l;
          l.vertices = std::move(verts);
          const std::size_t n = l.vertices.size();
          long long twice = 0;
          for (std::size_t k = 0; k < n; ++k) {
            const auto& a = l.vertices[k];
            const auto& b = l.vertices[(k + 1) % n];
            twice += static_cast<long long>(a[0]) * b[1] - static_cast<long long>(b[0]) * a[1];
          }
          l.length = n * h;
          l.signed_area = 0.5 * twice * h * h;
          loops.push_back(std::move(l));
        };
        for (const auto& p : walk) {
          const int key = lat.id(p[0], p[1]);
          auto it = pos.find(key);
          if (it != pos.end()) {
            const std::size_t k = it->second;
            std::vector<std::array<int, 2>> piece(stack.begin() + k, stack.end());
            for (std::size_t q = k + 1; q < stack.size(); ++q) pos.erase(lat.id(stack[q][0], stack[q][1]));
            stack.resize(k + 1);
            emit(std::move(piece));
          } else {
            pos[key] = stack.size();
            stack.push_back(p);
          }
        }
        emit(std::move(stack));
      }
    }

  // Nesting: the innermost loop whose winding number around a cell on the
  // left of this loop is nonzero.
  std::vector<std::array<int, 4>> box(loops.size());
  for (std::size_t i = 0; i < loops.size(); ++i) {
    auto& b = box[i];
    b = {1 << 30, 1 << 30, -(1 << 30), -(1 << 30)};
    for (const auto& p : loops[i].vertices) {
      b[0] = std::min(b[0], p[0]);
      b[1] = std::min(b[1], p[1]);
      b[2] = std::max(b[2], p[0]);
      b[3] = std::max(b[3], p[1]);
    }
  }
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const auto& a = loops[i].vertices[0];
    const auto& b = loops[i].vertices[1 % loops[i].vertices.size()];
    int d = 0;
    while (a[0] + kDx[d] != b[0] || a[1] + kDy[d] != b[1]) ++d;
    static constexpr int kLx[4] = {0, -1, -1, 0};
    static constexpr int kLy[4] = {0, 0, -1, -1};
    const int cx = a[0] + kLx[d], cy = a[1] + kLy[d];
    double best = 0;
    for (std::size_t j = 0; j < loops.size(); ++j) {
      if (j == i) continue;
      const double area = std::abs(loops[j].signed_area);
      if (area <= std::abs(loops[i].signed_area)) continue;
      if (box[j][0] > box[i][0] || box[j][1] > box[i][1] || box[j][2] < box[i][2] ||
          box[j][3] < box[i][3])
        continue;
      if (winding_at(loops[j], cx, cy) == 0) continue;
      if (loops[i].parent < 0 || area < best) {
        loops[i].parent = static_cast<int>(j);
        best = area;
      }
    }
  }
  for (auto& l : loops) {
    int depth = 0;
    for (int p = l.parent; p >= 0; p = loops[p].parent) ++depth;
    l.depth = depth;
  }
  return loops;
}

std::vector<int> winding_field(const std::vector<JordanLoop>& loops, const Grid& grid) {

  const int w = grid.size[0] + 1;
  // edge[y*w + x]: signed vertical edge at x spanning row y.
  std::vector<int> edge(static_cast<std::size_t>(w) * grid.size[1], 0);
  for (const auto& l : loops) {
    const std::size_t n = l.vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
      const auto& a = l.vertices[k];
      const auto& b = l.vertices[(k + 1) % n];
      if (a[0] != b[0]) continue;
      edge[static_cast<std::size_t>(std::min(a[1], b[1])) * w + a[0]] += b[1] > a[1] ? 1 : -1;
    }
  }
  std::vector<int> field(grid.cells(), 0);
  for (int y = 0; y < grid.size[1]; ++y) {
    int acc = 0;
    for (int x = grid.size[0] - 1; x >= 0; --x) {
      acc += edge[static_cast<std::size_t>(y) * w + x + 1];
      field[grid.index(x, y, 0)] = acc;
    }
  }
  return field;
}

std::string loops_svg(const std::vector<JordanLoop>& loops, const Grid& grid) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << grid.size[0] << ' '
     << grid.size[1] << "\">\n";
  for (const auto& l : loops) {
    os << "<path fill=\"none\" stroke=\"" << (l.outer() ? "black" : "red")
       << "\" stroke-width=\"0.2\" d=\"";
    for (std::size_t k = 0; k < l.vertices.size(); ++k)
      os << (k ? 'L' : 'M') << l.vertices[k][0] << ' ' << grid.size[1] - l.vertices[k][1];
    os << "Z\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sobext
