#include "output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sobext/errors.hpp"

namespace sobext::cli {

namespace fs = std::filesystem;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    fail(ErrorKind::Internal, "sha256 failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunRecorder::RunRecorder(std::string out_dir, std::string command, std::string config_text)
    : dir_(std::move(out_dir)), command_(std::move(command)), config_(std::move(config_text)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir_ + ": " + ec.message());
}

void RunRecorder::write(const std::string& name, const std::string& content) {
  const fs::path p = fs::path(dir_) / name;
  std::ofstream os(p, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot write " + p.string());
  os << content;
  os.close();
  if (!os) fail(ErrorKind::Io, "write failed for " + p.string());
  auto it = std::find_if(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; });
  if (it != files_.end()) it->second = sha256_hex(content);
  else files_.emplace_back(name, sha256_hex(content));
}

std::string RunRecorder::path(const std::string& name) const {
  return (fs::path(dir_) / name).string();
}

void RunRecorder::add(const std::string& name) {
  const std::string hash = sha256_hex(read_file(path(name)));
  auto it = std::find_if(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; });
  if (it != files_.end()) it->second = hash;
  else files_.emplace_back(name, hash);
}

void RunRecorder::time(const std::string& step, double seconds) { timings_.emplace_back(step, seconds); }

void RunRecorder::finish() {
  using nlohmann::ordered_json;
  const fs::path mp = fs::path(dir_) / "manifest.json";
  ordered_json m;
  if (fs::exists(mp)) {
    try {
      m = ordered_json::parse(read_file(mp.string()));
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::Format, "corrupt manifest " + mp.string());
    }
  }
  m["tool"] = "sobext";
  m["version"] = kToolVersion;
  ordered_json run;
  run["config_hash"] = sha256_hex(config_);
  run["config"] = config_;
  run["files"] = ordered_json::array();
  for (const auto& [name, hash] : files_) run["files"].push_back({{"path", name}, {"sha256", hash}});
  run["timings"] = ordered_json::object();
  for (const auto& [step, s] : timings_) run["timings"][step] = s;
  m["runs"][command_] = run;
  std::ofstream os(mp, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot write " + mp.string());
  os << m.dump(2) << "\n";
}

std::string domain_ppm(const VoxelDomain& dom) {
  const Grid& g = dom.grid;
  const int w = g.size[0], h = g.size[1];
  const int k = g.dim == 3 ? g.size[2] / 2 : 0;
  std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w) * h * 3);
  for (int j = h - 1; j >= 0; --j)
    for (int i = 0; i < w; ++i) {
      const unsigned char v = dom.occ[g.index(i, j, k)] ? 40 : 235;
      out.append(3, static_cast<char>(v));
    }
  return out;
}

std::string layers_svg(const Grid& g,
                       const std::vector<std::pair<const std::vector<std::uint8_t>*, std::string>>& layers) {
  const double s = 512.0 / std::max(g.size[0], g.size[1]);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.size[0] * s << "\" height=\""
     << g.size[1] * s << "\">\n";
  for (const auto& [occ, color] : layers) {
    os << "<g fill=\"" << color << "\" fill-opacity=\"0.45\">\n";
    for (int j = 0; j < g.size[1]; ++j) {
      int i = 0;
      while (i < g.size[0]) {
        if (!(*occ)[g.index(i, j, 0)]) {
          ++i;
          continue;
        }
        int e = i;
        while (e < g.size[0] && (*occ)[g.index(e, j, 0)]) ++e;
        os << "<rect x=\"" << i * s << "\" y=\"" << (g.size[1] - 1 - j) * s << "\" width=\""
           << (e - i) * s << "\" height=\"" << s << "\"/>\n";
        i = e;
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string chart_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0, y1 = -INFINITY;
  for (const auto& s : series)
    for (const auto& [x, y] : s.second) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x), x1 = std::max(x1, x), y1 = std::max(y1, y);
    }
  if (!(x1 > x0)) x0 -= 1, x1 += 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double W = 480, H = 300, L = 60, T = 30;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * W; };
  auto py = [&](double y) { return T + H - (y - y0) / (y1 - y0) * H; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + L + 120 << "\" height=\""
     << H + T + 50 << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<text x=\"" << L << "\" y=\"18\">" << title << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W << "\" height=\"" << H
     << "\" fill=\"none\" stroke=\"#888\"/>\n"
     << "<text x=\"" << L + W / 2 << "\" y=\"" << T + H + 35 << "\">" << xlabel << "</text>\n"
     << "<text x=\"5\" y=\"" << T + H / 2 << "\">" << ylabel << "</text>\n"
     << "<text x=\"" << L - 5 << "\" y=\"" << T + H << "\" text-anchor=\"end\">" << num(y0) << "</text>\n"
     << "<text x=\"" << L - 5 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << num(y1) << "</text>\n"
     << "<text x=\"" << L << "\" y=\"" << T + H + 15 << "\">" << num(x0) << "</text>\n"
     << "<text x=\"" << L + W << "\" y=\"" << T + H + 15 << "\" text-anchor=\"end\">" << num(x1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
    for (const auto& [x, y] : series[k].second)
      if (std::isfinite(x) && std::isfinite(y)) os << px(x) << "," << py(y) << " ";
    os << "\"/>\n";
    for (const auto& [x, y] : series[k].second)
      if (std::isfinite(x) && std::isfinite(y))
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    os << "<text x=\"" << L + W + 10 << "\" y=\"" << T + 15 + 15 * k << "\" fill=\"" << c << "\">"
       << series[k].first << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sobext::cli
