#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sobext::cli {

/// Sectioned key-value text:
///
///   # comment
///   [section]
///   key = value
///
/// Layout (comments, blank lines, spacing around '=') is kept so that
/// emit(parse(text)) == text. Keys are checked against a fixed schema.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  std::string emit() const;

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  /// Replaces the value in place or appends the key to its section.
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

 private:
  struct Line {
    enum Kind { Raw, Section, Entry } kind = Raw;
    std::string section;  // owning section for entries, own name for headers
    std::string key, sep, value, raw;
  };
  std::vector<Line> lines_;
  bool trailing_newline_ = true;
};

/// Value parsers shared with command-line flags; throw Usage on bad input.
long long parse_int(const std::string& text);
double parse_double(const std::string& text);
bool parse_bool(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace sobext::cli
