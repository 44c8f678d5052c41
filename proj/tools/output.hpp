#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "sobext/domain.hpp"

namespace sobext::cli {

/// Shortest decimal that parses back to the same double.
std::string num(double v);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);

/// Files written by one command, recorded in `<out>/manifest.json` under the
/// command name. Timings live only in the manifest, never in CSVs.
class RunRecorder {
 public:
  RunRecorder(std::string out_dir, std::string command, std::string config_text);

  /// Writes `name` under the output directory and records its hash.
  void write(const std::string& name, const std::string& content);
  /// Records a file already written under the output directory.
  void add(const std::string& name);
  std::string path(const std::string& name) const;
  void time(const std::string& step, double seconds);
  /// Merges this run into the manifest (single writer, end of command).
  void finish();

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_, command_, config_;
  std::vector<std::pair<std::string, std::string>> files_;  // name, sha256
  std::vector<std::pair<std::string, double>> timings_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

/// Binary PPM of a 2D domain (or the middle z-slice of a 3D one), y up.
std::string domain_ppm(const VoxelDomain& dom);

/// Stacked cell layers of a 2D grid as SVG, one color per layer.
std::string layers_svg(const Grid& grid,
                       const std::vector<std::pair<const std::vector<std::uint8_t>*, std::string>>& layers);

/// Polyline chart, one series per (label, points).
std::string chart_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace sobext::cli
