#include "sobext/sets.hpp"

#include <sstream>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

std::vector<std::vector<double>> parse_boxes(const std::string& body) {
  std::vector<std::vector<double>> boxes;
  std::stringstream all(body);
  std::string item;
  while (std::getline(all, item, '/')) {
    std::vector<double> v;
    std::stringstream ss(item);
    std::string num;
    while (std::getline(ss, num, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(num, &used));
        if (used != num.size()) throw std::invalid_argument(num);
      } catch (const std::exception&) {
        fail(ErrorKind::Usage, "bad number in cube list: '" + num + "'");
      }
    }
    if (v.size() != 3 && v.size() != 4) fail(ErrorKind::Usage, "cube entry needs 3 or 4 numbers");
    if (!(v.back() > 0)) fail(ErrorKind::Usage, "cube side must be positive");
    boxes.push_back(std::move(v));
  }
  if (boxes.empty()) fail(ErrorKind::Usage, "empty cube list");
  return boxes;
}

}  // namespace

SetSpec SetSpec::parse(const std::string& text) {
  const std::string tag = text.substr(0, text.find(':'));
  if (tag == "cubes") {
    if (text.find(':') == std::string::npos) fail(ErrorKind::Usage, "cubes needs a list");
    parse_boxes(text.substr(text.find(':') + 1));
  } else {
    const GeneratorSpec g = GeneratorSpec::parse(text);
    if (g.tag != "half" && g.tag != "quadrant" && g.tag != "below_slit" && g.tag != "random")
      fail(ErrorKind::Usage, "unknown set construction '" + g.tag + "'");
    if (g.tag == "random") {
      if (!g.params.count("seed")) fail(ErrorKind::Usage, "random set needs an explicit seed");
      const double d = g.get("density", 0.5);
      if (!(d >= 0 && d <= 1)) fail(ErrorKind::Usage, "density must lie in [0, 1]");
    }
  }
  return SetSpec{text};
}

double cell_uniform(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer on a seed/index mix.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::vector<std::uint8_t> build_set(const VoxelDomain& dom, const SetSpec& spec) {
  const Grid& g = dom.grid;
  std::vector<std::uint8_t> occ(g.cells(), 0);
  const std::string& text = spec.text;
  const std::string tag = text.substr(0, text.find(':'));
  std::function<bool(const Vec3&, std::size_t)> f;
  if (tag == "cubes") {
    const auto boxes = parse_boxes(text.substr(text.find(':') + 1));
    for (const auto& b : boxes)
      if (static_cast<int>(b.size()) != g.dim + 1)
        fail(ErrorKind::Usage, "cube entry dimension does not match the domain");
    f = [boxes, dim = g.dim](const Vec3& x, std::size_t) {
      for (const auto& b : boxes) {
        bool in = true;
        for (int a = 0; a < dim; ++a) in = in && x[a] >= b[a] && x[a] < b[a] + b[dim];
        if (in) return true;
      }
      return false;
    };
  } else {
    const GeneratorSpec s = GeneratorSpec::parse(text);
    if (s.tag == "half") {
      const int axis = static_cast<int>(s.get("axis", 0));
      if (axis < 0 || axis >= g.dim) fail(ErrorKind::Usage, "half: axis out of range");
      const double at = s.get("at", 0.5);
      f = [axis, at](const Vec3& x, std::size_t) { return x[axis] < at; };
    } else if (s.tag == "quadrant") {
      const double qx = s.get("x", 0.5), qy = s.get("y", 0.5);
      f = [qx, qy](const Vec3& x, std::size_t) { return x[0] < qx && x[1] < qy; };
    } else if (s.tag == "below_slit") {
      const double at = s.get("at", 0.5);
      f = [at](const Vec3& x, std::size_t) { return x[1] < at; };
    } else if (s.tag == "random") {
      const auto seed = static_cast<std::uint64_t>(s.get("seed", 0));
      const double d = s.get("density", 0.5);
      f = [seed, d](const Vec3&, std::size_t i) { return cell_uniform(seed, i) < d; };
    } else {
      fail(ErrorKind::Usage, "unknown set construction '" + s.tag + "'");
    }
  }
  for (std::size_t i = 0; i < occ.size(); ++i)
    occ[i] = dom.occ[i] && f(g.center(g.coords(i)), i);
  return occ;
}

}  // namespace sobext
