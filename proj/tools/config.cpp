#include "config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sobext/domain.hpp"
#include "sobext/errors.hpp"
#include "sobext/sets.hpp"

namespace sobext::cli {

namespace {

enum class Type { Int, Double, String, List, Bool, Generator, SetA };

const std::map<std::string, std::map<std::string, Type>>& schema() {
  static const std::map<std::string, std::map<std::string, Type>> s{
      {"run", {{"out", Type::String}, {"seed", Type::Int}, {"threads", Type::Int}}},
      {"domain",
       {{"generator", Type::Generator}, {"K", Type::Int}, {"refine", Type::Int},
        {"file", Type::String}}},
      {"whitney", {{"max_level", Type::Int}}},
      {"extend",
       {{"set", Type::SetA}, {"p", Type::List}, {"c", Type::Double}, {"margin", Type::Int},
        {"max_level", Type::Int}, {"lemmas", Type::Bool}, {"energy_per_side", Type::Int}}},
      {"curves",
       {{"p", Type::List}, {"pairs", Type::Int}, {"seed", Type::Int}, {"scales", Type::List},
        {"margin", Type::Int}, {"cusp_alpha", Type::Double}, {"per_width", Type::Int}}},
      {"geodesic",
       {{"from", Type::List}, {"to", Type::List}, {"p", Type::Double}, {"side", Type::String},
        {"weight", Type::String}, {"margin", Type::Int}}},
      {"cantor", {{"depth", Type::Int}, {"K", Type::Int}, {"samples", Type::Int}}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void validate(const std::string& section, const std::string& key, const std::string& value) {
  const auto sec = schema().find(section);
  if (sec == schema().end()) fail(ErrorKind::Usage, "config: unknown section [" + section + "]");
  const auto it = sec->second.find(key);
  if (it == sec->second.end())
    fail(ErrorKind::Usage, "config: unknown key '" + key + "' in [" + section + "]");
  switch (it->second) {
    case Type::Int: parse_int(value); break;
    case Type::Double: parse_double(value); break;
    case Type::Bool: parse_bool(value); break;
    case Type::List: parse_list(value); break;
    case Type::Generator: {
      static const std::set<std::string> tags{"cube", "ball", "slit_square", "outward_cusp",
                                              "snowflake_approx", "slab", "cantor_tube"};
      if (!tags.count(GeneratorSpec::parse(value).tag))
        fail(ErrorKind::Usage, "config: unknown generator '" + value + "'");
      break;
    }
    case Type::SetA: SetSpec::parse(value); break;
    case Type::String:
      if (value.empty()) fail(ErrorKind::Usage, "config: empty value for '" + key + "'");
      break;
  }
}

}  // namespace

long long parse_int(const std::string& text) {
  long long v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    fail(ErrorKind::Usage, "not an integer: '" + text + "'");
  return v;
}

double parse_double(const std::string& text) {
  double v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    fail(ErrorKind::Usage, "not a number: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(ErrorKind::Usage, "not a boolean: '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) fail(ErrorKind::Usage, "empty list");
  return out;
}

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.trailing_newline_ = text.empty() || text.back() == '\n';
  std::string cur;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    Line l;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') {
      l.raw = line;
    } else if (t.front() == '[') {
      if (t.back() != ']' || line != t) fail(ErrorKind::Usage, where + "bad section header");
      cur = t.substr(1, t.size() - 2);
      if (!schema().count(cur)) fail(ErrorKind::Usage, where + "unknown section [" + cur + "]");
      l.kind = Line::Section;
      l.section = cur;
    } else {
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Usage, where + "expected key = value");
      if (cur.empty()) fail(ErrorKind::Usage, where + "key outside any section");
      l.kind = Line::Entry;
      l.section = cur;
      l.key = trim(line.substr(0, eq));
      if (line.compare(0, l.key.size(), l.key) != 0)
        fail(ErrorKind::Usage, where + "leading whitespace before key");
      l.value = trim(line.substr(eq + 1));
      const std::size_t vs = l.value.empty() ? line.size() : line.find(l.value, eq + 1);
      if (vs + l.value.size() != line.size())
        fail(ErrorKind::Usage, where + "trailing whitespace after value");
      l.sep = line.substr(l.key.size(), vs - l.key.size());
      if (!seen.insert({cur, l.key}).second)
        fail(ErrorKind::Usage, where + "duplicate key '" + l.key + "'");
      try {
        validate(cur, l.key, l.value);
      } catch (const Error& e) {
        fail(e.kind(), where + e.what());
      }
    }
    cfg.lines_.push_back(std::move(l));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Config::emit() const {
  std::string out;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const Line& l = lines_[i];
    switch (l.kind) {
      case Line::Raw: out += l.raw; break;
      case Line::Section: out += "[" + l.section + "]"; break;
      case Line::Entry: out += l.key + l.sep + l.value; break;
    }
    if (i + 1 < lines_.size() || trailing_newline_) out += '\n';
  }
  return out;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  for (const Line& l : lines_)
    if (l.kind == Line::Entry && l.section == section && l.key == key) return l.value;
  return std::nullopt;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  validate(section, key, value);
  for (Line& l : lines_)
    if (l.kind == Line::Entry && l.section == section && l.key == key) {
      l.value = value;
      return;
    }
  Line e;
  e.kind = Line::Entry;
  e.section = section;
  e.key = key;
  e.sep = " = ";
  e.value = value;
  // Insert after the last line of the section, or open a new one.
  std::size_t at = lines_.size();
  bool found = false;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (lines_[i].kind == Line::Section) {
      if (found) break;
      found = lines_[i].section == section;
    }
    if (found && lines_[i].kind != Line::Raw) at = i + 1;
  }
  if (!found) {
    Line h;
    h.kind = Line::Section;
    h.section = section;
    lines_.push_back(h);
    lines_.push_back(e);
    trailing_newline_ = true;
    return;
  }
  lines_.insert(lines_.begin() + static_cast<std::ptrdiff_t>(at), e);
}

std::string Config::get_string(const std::string& s, const std::string& k,
                               const std::string& fallback) const {
  return get(s, k).value_or(fallback);
}
long long Config::get_int(const std::string& s, const std::string& k, long long fallback) const {
  const auto v = get(s, k);
  return v ? parse_int(*v) : fallback;
}
double Config::get_double(const std::string& s, const std::string& k, double fallback) const {
  const auto v = get(s, k);
  return v ? parse_double(*v) : fallback;
}
bool Config::get_bool(const std::string& s, const std::string& k, bool fallback) const {
  const auto v = get(s, k);
  return v ? parse_bool(*v) : fallback;
}
std::vector<double> Config::get_list(const std::string& s, const std::string& k,
                                     const std::vector<double>& fallback) const {
  const auto v = get(s, k);
  return v ? parse_list(*v) : fallback;
}

}  // namespace sobext::cli
