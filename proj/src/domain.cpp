#include "sobext/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "sobext/cantor.hpp"
#include "sobext/errors.hpp"

namespace sobext {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Even-odd point-in-polygon with edges bucketed into horizontal bands.
class Polygon {
 public:
  explicit Polygon(std::vector<std::array<double, 2>> v) : v_(std::move(v)) {
    ymin_ = ymax_ = v_[0][1];
    for (const auto& p : v_) {
      ymin_ = std::min(ymin_, p[1]);
      ymax_ = std::max(ymax_, p[1]);
    }
    bands_.resize(kBands);
    for (std::size_t e = 0; e < v_.size(); ++e) {
      const auto& a = v_[e];
      const auto& b = v_[(e + 1) % v_.size()];
      const int b0 = band(std::min(a[1], b[1]));
      const int b1 = band(std::max(a[1], b[1]));
      for (int k = b0; k <= b1; ++k) bands_[k].push_back(e);
    }
  }

  bool contains(double x, double y) const {
    if (y < ymin_ || y > ymax_) return false;
    bool inside = false;
    for (std::size_t e : bands_[band(y)]) {
      const auto& a = v_[e];
      const auto& b = v_[(e + 1) % v_.size()];
      if ((a[1] > y) != (b[1] > y)) {
        const double t = (y - a[1]) / (b[1] - a[1]);
        if (x < a[0] + t * (b[0] - a[0])) inside = !inside;
      }
    }
    return inside;
  }

  double area() const {
    double s = 0;
    for (std::size_t e = 0; e < v_.size(); ++e) {
      const auto& a = v_[e];
      const auto& b = v_[(e + 1) % v_.size()];
      s += a[0] * b[1] - a[1] * b[0];
    }
    return s / 2;
  }

 private:
  static constexpr int kBands = 1024;
  int band(double y) const {
    const double t = (y - ymin_) / (ymax_ - ymin_);
    return std::clamp(static_cast<int>(t * kBands), 0, kBands - 1);
  }
  std::vector<std::array<double, 2>> v_;
  std::vector<std::vector<std::size_t>> bands_;
  double ymin_ = 0, ymax_ = 0;
};

std::vector<std::array<double, 2>> koch_snowflake(int iterations, double cx, double cy,
                                                  double radius) {
  std::vector<std::array<double, 2>> v;
  for (int k = 0; k < 3; ++k) {
    const double t = M_PI / 2 + k * 2 * M_PI / 3;  // counter-clockwise
    v.push_back({cx + radius * std::cos(t), cy + radius * std::sin(t)});
  }
  const double c60 = 0.5, s60 = std::sqrt(3.0) / 2;
  for (int it = 0; it < iterations; ++it) {
    std::vector<std::array<double, 2>> next;
    for (std::size_t e = 0; e < v.size(); ++e) {
      const auto a = v[e];
      const auto b = v[(e + 1) % v.size()];
      const double dx = (b[0] - a[0]) / 3, dy = (b[1] - a[1]) / 3;
      const std::array<double, 2> p1{a[0] + dx, a[1] + dy};
      const std::array<double, 2> p2{a[0] + 2 * dx, a[1] + 2 * dy};
      // Outward is to the right of a counter-clockwise edge.
      const std::array<double, 2> peak{p1[0] + c60 * dx + s60 * dy, p1[1] - s60 * dx + c60 * dy};
      next.push_back(a);
      next.push_back(p1);
      next.push_back(peak);
      next.push_back(p2);
    }
    v = std::move(next);
  }
  return v;
}

int spec_dim(const GeneratorSpec& spec, int fallback) {
  const double d = spec.get("dim", fallback);
  if (d != 2 && d != 3) fail(ErrorKind::Usage, "dim must be 2 or 3");
  return static_cast<int>(d);
}

void check_not_trivial(const VoxelDomain& dom) {
  if (dom.count() == 0) fail(ErrorKind::InvalidDomain, dom.name + ": empty occupancy");
  if (dom.boundary_face_count() == 0)
    fail(ErrorKind::InvalidDomain, dom.name + ": domain has no boundary");
}

}  // namespace

std::size_t VoxelDomain::count() const {
  return static_cast<std::size_t>(std::count_if(occ.begin(), occ.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

std::size_t VoxelDomain::boundary_face_count() const {
  std::size_t faces = 0;
  for (std::size_t idx = 0; idx < occ.size(); ++idx) {
    const Idx3 c = grid.coords(idx);
    const bool here = occ[idx] != 0;
    for (int a = 0; a < grid.dim; ++a) {
      Idx3 up = c;
      ++up[a];
      if (in(up) != here) ++faces;
      if (c[a] == 0 && !periodic[a]) {
        Idx3 down = c;
        --down[a];
        if (in(down) != here) ++faces;
      }
    }
  }
  return faces;
}

std::string GeneratorSpec::to_string() const {
  std::string s = tag;
  char sep = ':';
  for (const auto& [k, v] : params) {
    s += sep;
    s += k + "=" + fmt_double(v);
    sep = ',';
  }
  return s;
}

GeneratorSpec GeneratorSpec::parse(const std::string& text) {
  GeneratorSpec spec;
  const auto colon = text.find(':');
  spec.tag = text.substr(0, colon);
  if (spec.tag.empty()) fail(ErrorKind::Usage, "empty generator tag");
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Usage, "generator parameter without '=': " + item);
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double v = 0;
    auto [end, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || end != val.data() + val.size())
      fail(ErrorKind::Usage, "bad value for generator parameter " + key + ": " + val);
    spec.params[key] = v;
  }
  return spec;
}

AnalyticSet analytic_set(const GeneratorSpec& spec) {
  AnalyticSet s;
  const std::string& tag = spec.tag;
  if (tag == "cube") {
    s.dim = spec_dim(spec, 2);
    s.hi = {1, 1, s.dim == 3 ? 1.0 : 0.0};
    s.contains = [](const Vec3&) { return true; };
  } else if (tag == "ball") {
    s.dim = spec_dim(spec, 2);
    s.hi = {1, 1, s.dim == 3 ? 1.0 : 0.0};
    const double r = spec.get("r", 0.5);
    if (!(r > 0 && r <= 0.5)) fail(ErrorKind::Usage, "ball radius must lie in (0, 0.5]");
    const int dim = s.dim;
    s.contains = [r, dim](const Vec3& x) {
      double d2 = 0;
      for (int a = 0; a < dim; ++a) d2 += (x[a] - 0.5) * (x[a] - 0.5);
      return d2 < r * r;
    };
  } else if (tag == "slit_square") {
    // The slit itself is carved by build_domain as one cell row.
    const double len = spec.get("len", 0.5);
    if (!(len > 0 && len < 1)) fail(ErrorKind::Usage, "slit length must lie in (0, 1)");
    s.contains = [](const Vec3&) { return true; };
  } else if (tag == "outward_cusp") {
    const double alpha = spec.get("alpha", 2.0);
    if (!(alpha > 1)) fail(ErrorKind::Usage, "cusp exponent alpha must exceed 1");
    s.contains = [alpha](const Vec3& x) {
      if (x[1] < 0.5) return true;
      return std::abs(x[0] - 0.5) > std::pow(x[1] - 0.5, alpha);
    };
  } else if (tag == "snowflake_approx") {
    const double iter = spec.get("iter", 3);
    if (iter < 0 || iter > 7 || iter != std::floor(iter))
      fail(ErrorKind::Usage, "snowflake iteration count must be an integer in [0, 7]");
    auto poly = std::make_shared<Polygon>(koch_snowflake(static_cast<int>(iter), 0.5, 0.5, 0.45));
    s.contains = [poly](const Vec3& x) { return poly->contains(x[0], x[1]); };
  } else if (tag == "slab") {
    // {0 < y < 1} with x periodic of period `width`.
    const double width = spec.get("width", 2.0);
    if (!(width > 0)) fail(ErrorKind::Usage, "slab width must be positive");
    s.dim = spec_dim(spec, 2);
    s.hi = {width, 1, s.dim == 3 ? width : 0.0};
    s.periodic = {true, false, s.dim == 3};
    s.contains = [](const Vec3&) { return true; };
  } else if (tag == "cantor_tube") {
    const double depth = spec.get("depth", 1);
    if (depth < 1 || depth != std::floor(depth))
      fail(ErrorKind::Usage, "cantor depth must be a positive integer");
    auto tubes = std::make_shared<CantorTubeSpec>(build_cantor_tube(static_cast<int>(depth)));
    auto index = std::make_shared<TubeIndex>(*tubes);
    s.dim = 3;
    s.hi = {1, 1, 1};
    s.contains = [tubes, index](const Vec3& x) { return !index->in_tubes(x); };
  } else {
    fail(ErrorKind::Usage, "unknown generator: " + tag);
  }
  return s;
}

VoxelDomain make_domain(Grid grid, std::vector<std::uint8_t> occ, std::string name,
                        std::array<bool, 3> periodic, bool open_bbox) {
  if (occ.size() != grid.cells()) fail(ErrorKind::InvalidDomain, "occupancy size mismatch");
  VoxelDomain dom;
  dom.grid = grid;
  dom.occ = std::move(occ);
  dom.name = std::move(name);
  dom.periodic = periodic;
  dom.open_bbox = open_bbox;
  check_not_trivial(dom);
  dom.connected = is_connected(dom.grid, dom.occ);
  return dom;
}

VoxelDomain build_domain(const GeneratorSpec& spec, int level, const BuildLimits& limits) {
  if (level < 0 || level > 24) fail(ErrorKind::Usage, "resolution level K must lie in [0, 24]");
  const AnalyticSet set = analytic_set(spec);
  Grid grid;
  grid.dim = set.dim;
  grid.level = level;
  const double scale = std::ldexp(1.0, level);
  for (int a = 0; a < set.dim; ++a) {
    grid.origin[a] = static_cast<std::int64_t>(std::floor(set.lo[a] * scale));
    grid.size[a] = static_cast<int>(std::ceil(set.hi[a] * scale)) - static_cast<int>(grid.origin[a]);
  }
  if (spec.params.count("win_cells")) {
    const int cells = static_cast<int>(spec.get("win_cells", 0));
    if (cells < 1) fail(ErrorKind::Usage, "win_cells must be positive");
    const char* keys[3] = {"win_x", "win_y", "win_z"};
    for (int a = 0; a < set.dim; ++a) {
      grid.origin[a] = static_cast<std::int64_t>(std::floor(spec.get(keys[a], 0.0) * scale));
      grid.size[a] = cells;
    }
  }
  if (spec.tag == "cantor_tube") {
    const CantorTubeSpec tubes = build_cantor_tube(static_cast<int>(spec.get("depth", 1)));
    const double cm = static_cast<double>(tubes.c[tubes.depth]);
    if (cm < 4 * grid.h())
      fail(ErrorKind::ResolutionTooCoarse,
           "c_m = " + fmt_double(cm) + " is below 4h; tubes would not be resolved");
  }

  double total = 1;
  for (int a = 0; a < 3; ++a) total *= grid.size[a];
  if (total > static_cast<double>(limits.max_cells))
    fail(ErrorKind::ResourceLimit, "grid of " + fmt_double(total) + " cells exceeds the limit");

  std::vector<std::uint8_t> occ(grid.cells(), 0);
  const auto& contains = set.contains;
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(occ.size()); ++idx)
    occ[idx] = contains(grid.center(grid.coords(static_cast<std::size_t>(idx)))) ? 1 : 0;

  if (spec.tag == "slit_square") {
    // Row of cells whose lower edge is y = 1/2, from x = 0 to the tip.
    const double len = spec.get("len", 0.5);
    const int row = static_cast<int>(std::llround(0.5 * scale)) - static_cast<int>(grid.origin[1]);
    if (row >= 0 && row < grid.size[1]) {
      for (int i = 0; i < grid.size[0]; ++i)
        if (grid.center({i, row, 0})[0] < len) occ[grid.index(i, row, 0)] = 0;
    }
  }
  return make_domain(grid, std::move(occ), spec.to_string(), set.periodic, false);
}

VoxelDomain embed(const VoxelDomain& dom, int margin) {
  if (margin < 0) fail(ErrorKind::Usage, "negative margin");
  for (int a = 0; a < dom.grid.dim; ++a)
    if (dom.periodic[a]) fail(ErrorKind::PreconditionNotMet, "cannot embed a periodic domain");
  Grid g = dom.grid;
  for (int a = 0; a < g.dim; ++a) {
    g.origin[a] -= margin;
    g.size[a] += 2 * margin;
  }
  std::vector<std::uint8_t> occ(g.cells(), dom.open_bbox ? 1 : 0);
  for (std::size_t idx = 0; idx < dom.occ.size(); ++idx) {
    Idx3 c = dom.grid.coords(idx);
    for (int a = 0; a < g.dim; ++a) c[a] += margin;
    occ[g.index(c)] = dom.occ[idx];
  }
  VoxelDomain out;
  out.grid = g;
  out.occ = std::move(occ);
  out.name = dom.name;
  out.open_bbox = dom.open_bbox;
  out.connected = dom.connected;
  return out;
}

VoxelDomain complement(const VoxelDomain& dom) {
  VoxelDomain out;
  out.grid = dom.grid;
  out.occ.resize(dom.occ.size());
  for (std::size_t i = 0; i < dom.occ.size(); ++i) out.occ[i] = dom.occ[i] ? 0 : 1;
  out.name = "complement(" + dom.name + ")";
  out.periodic = dom.periodic;
  out.open_bbox = !dom.open_bbox;
  out.connected = is_connected(out.grid, out.occ);
  return out;
}

bool is_connected(const Grid& grid, const std::vector<std::uint8_t>& occ) {
  const auto first = std::find_if(occ.begin(), occ.end(), [](std::uint8_t v) { return v != 0; });
  if (first == occ.end()) return false;
  std::vector<std::uint8_t> seen(occ.size(), 0);
  std::vector<std::size_t> stack{static_cast<std::size_t>(first - occ.begin())};
  seen[stack.back()] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    const std::size_t idx = stack.back();
    stack.pop_back();
    ++reached;
    const Idx3 c = grid.coords(idx);
    for (int a = 0; a < grid.dim; ++a)
      for (int s : {-1, 1}) {
        Idx3 d = c;
        d[a] += s;
        if (!grid.contains(d)) continue;
        const std::size_t j = grid.index(d);
        if (occ[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
  }
  const auto total = static_cast<std::size_t>(std::count_if(occ.begin(), occ.end(),
                                                            [](std::uint8_t v) { return v != 0; }));
  return reached == total;
}

namespace {

std::string dyadic_string(std::int64_t cells, int level) {
  std::int64_t num = cells;
  std::int64_t den = std::int64_t{1} << level;
  while (den > 1 && num % 2 == 0) {
    num /= 2;
    den /= 2;
  }
  return std::to_string(num) + "/" + std::to_string(den);
}

std::int64_t parse_dyadic(const std::string& tok, int level) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) fail(ErrorKind::Format, "VOXD: bad bbox corner " + tok);
  const std::int64_t num = std::stoll(tok.substr(0, slash));
  const std::int64_t den = std::stoll(tok.substr(slash + 1));
  if (den <= 0 || (den & (den - 1)) != 0 || den > (std::int64_t{1} << level))
    fail(ErrorKind::Format, "VOXD: bbox corner not on the grid: " + tok);
  return num * ((std::int64_t{1} << level) / den);
}

}  // namespace

void write_voxd(const VoxelDomain& dom, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  const Grid& g = dom.grid;
  os << "VOXD1\n" << g.dim << "\n" << g.level << "\n";
  for (int a = 0; a < g.dim; ++a)
    os << (a ? " " : "") << dyadic_string(g.origin[a], g.level);
  os << "\n";
  for (int a = 0; a < g.dim; ++a)
    os << (a ? " " : "") << dyadic_string(g.origin[a] + g.size[a], g.level);
  os << "\n" << dom.name << "\n";
  os << "periodic " << dom.periodic[0] << dom.periodic[1] << dom.periodic[2] << " open "
     << dom.open_bbox << "\n";
  std::vector<char> bytes((dom.occ.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < dom.occ.size(); ++i)
    if (dom.occ[i]) bytes[i / 8] |= static_cast<char>(1u << (i % 8));
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) fail(ErrorKind::Io, "write failed: " + path);
}

VoxelDomain read_voxd(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line != "VOXD1") fail(ErrorKind::Format, path + ": missing VOXD1 magic");
  Grid g;
  std::getline(is, line);
  g.dim = std::stoi(line);
  std::getline(is, line);
  g.level = std::stoi(line);
  if ((g.dim != 2 && g.dim != 3) || g.level < 0 || g.level > 30)
    fail(ErrorKind::Format, path + ": bad dimension or level");
  std::string lo_line, hi_line, name, flags;
  std::getline(is, lo_line);
  std::getline(is, hi_line);
  std::getline(is, name);
  std::getline(is, flags);
  std::istringstream lo_ss(lo_line), hi_ss(hi_line);
  for (int a = 0; a < g.dim; ++a) {
    std::string lo_tok, hi_tok;
    lo_ss >> lo_tok;
    hi_ss >> hi_tok;
    g.origin[a] = parse_dyadic(lo_tok, g.level);
    const std::int64_t hi = parse_dyadic(hi_tok, g.level);
    if (hi <= g.origin[a]) fail(ErrorKind::Format, path + ": empty bbox");
    g.size[a] = static_cast<int>(hi - g.origin[a]);
  }
  std::array<bool, 3> periodic{false, false, false};
  bool open_bbox = false;
  {
    std::istringstream fs(flags);
    std::string key, bits, key2;
    int open = 0;
    if (!(fs >> key >> bits >> key2 >> open) || key != "periodic" || bits.size() != 3)
      fail(ErrorKind::Format, path + ": bad flags line");
    for (int a = 0; a < 3; ++a) periodic[a] = bits[a] == '1';
    open_bbox = open != 0;
  }
  std::vector<char> bytes((g.cells() + 7) / 8);
  is.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (is.gcount() != static_cast<std::streamsize>(bytes.size()))
    fail(ErrorKind::Format, path + ": truncated occupancy");
  std::vector<std::uint8_t> occ(g.cells());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = (bytes[i / 8] >> (i % 8)) & 1;
  return make_domain(g, std::move(occ), name, periodic, open_bbox);
}

}  // namespace sobext
