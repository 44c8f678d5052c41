#include "sobext/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sobext/errors.hpp"

namespace sobext {

namespace {

Rational rat(double v) { return Rational(v); }

double to_d(const Rational& r) { return static_cast<double>(r); }

Vec3 to_vec(const RPoint& p) { return {to_d(p[0]), to_d(p[1]), to_d(p[2])}; }

Rational abs_r(const Rational& r) { return r < 0 ? Rational(-r) : r; }

int moving_axis(const RPoint& a, const RPoint& b) {
  int axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (a[k] != b[k]) {
      if (axis >= 0) return -2;
      axis = k;
    }
  }
  return axis;
}

Rational seg_length(const RPoint& a, const RPoint& b) {
  Rational s = 0;
  for (int k = 0; k < 3; ++k) s += abs_r(a[k] - b[k]);
  return s;  // axis-parallel, so the l1 length is the length
}

// Squared distance between a closed axis-parallel segment and a closed box.
Rational seg_box_distance_sq(const RPoint& a, const RPoint& b, const RPoint& lo,
                             const Rational& side) {
  Rational d = 0;
  for (int k = 0; k < 3; ++k) {
    const Rational s0 = std::min(a[k], b[k]);
    const Rational s1 = std::max(a[k], b[k]);
    const Rational c1 = lo[k] + side;
    Rational g = 0;
    if (s1 < lo[k]) g = lo[k] - s1;
    else if (c1 < s0) g = s0 - c1;
    d += g * g;
  }
  return d;
}

bool seg_hits_open_box(const RPoint& a, const RPoint& b, const RPoint& lo,
                       const Rational& side) {
  for (int k = 0; k < 3; ++k) {
    const Rational s0 = std::min(a[k], b[k]);
    const Rational s1 = std::max(a[k], b[k]);
    if (!(s0 < lo[k] + side && s1 > lo[k])) return false;
  }
  return true;
}

bool seg_in_closed_box(const RPoint& a, const RPoint& b, const RPoint& lo,
                       const Rational& side) {
  for (int k = 0; k < 3; ++k) {
    const Rational hi = lo[k] + side;
    if (a[k] < lo[k] || a[k] > hi || b[k] < lo[k] || b[k] > hi) return false;
  }
  return true;
}

RPoint lerp_axis(const RPoint& a, const RPoint& b, const Rational& t_len) {
  RPoint p = a;
  const int ax = moving_axis(a, b);
  if (ax >= 0) p[ax] = a[ax] + (b[ax] > a[ax] ? t_len : Rational(-t_len));
  return p;
}

// Sub-polyline between arc-length positions s0 < s1.
std::vector<RPoint> sub_polyline(const std::vector<RPoint>& v, const Rational& s0,
                                 const Rational& s1) {
  std::vector<RPoint> out;
  Rational acc = 0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const Rational len = seg_length(v[k], v[k + 1]);
    const Rational a = acc, b = acc + len;
    if (b >= s0 && a <= s1) {
      if (out.empty()) out.push_back(lerp_axis(v[k], v[k + 1], s0 - a));
      if (b < s1) {
        if (out.back() != v[k + 1]) out.push_back(v[k + 1]);
      } else {
        RPoint end = lerp_axis(v[k], v[k + 1], s1 - a);
        if (out.back() != end) out.push_back(end);
        break;
      }
    }
    acc = b;
  }
  return out;
}

// Greedy 4c cuts, short tail merged, then parity repaired by halving the
// longest piece.
std::vector<Rational> split_lengths(const Rational& total, const Rational& c) {
  std::vector<Rational> pieces;
  const Rational step = 4 * c;
  Rational rest = total;
  while (rest >= step) {
    pieces.push_back(step);
    rest -= step;
  }
  if (rest > 0) {
    if (rest < 2 * c && !pieces.empty()) {
      pieces.back() += rest;
    } else {
      pieces.push_back(rest);
    }
  }
  if (pieces.size() % 2 == 1) {
    auto it = std::max_element(pieces.begin(), pieces.end());
    const Rational half = *it / 2;
    *it = half;
    pieces.insert(it, half);
  }
  return pieces;
}

}  // namespace

double default_lambda(int i) { return 0.5 * std::exp(-1.0 / i); }

RPoint CantorTubeSpec::top_center(int n, int i) const {
  const CantorCube& q = cubes[n][i];
  RPoint p = q.lo;
  p[0] += l[n] / 2;
  p[1] += l[n] / 2;
  p[2] += l[n];
  return p;
}

std::vector<RPoint> TubeCurve::piece(std::size_t j) const {
  return sub_polyline(vertices, cuts.at(j), cuts.at(j + 1));
}

Rational polyline_length(const std::vector<RPoint>& vertices) {
  Rational s = 0;
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k)
    s += seg_length(vertices[k], vertices[k + 1]);
  return s;
}

Rational segment_distance_sq(const RPoint& a0, const RPoint& a1, const RPoint& b0,
                             const RPoint& b1) {
  Rational d = 0;
  for (int k = 0; k < 3; ++k) {
    const Rational alo = std::min(a0[k], a1[k]), ahi = std::max(a0[k], a1[k]);
    const Rational blo = std::min(b0[k], b1[k]), bhi = std::max(b0[k], b1[k]);
    Rational g = 0;
    if (ahi < blo) g = blo - ahi;
    else if (bhi < alo) g = alo - bhi;
    d += g * g;
  }
  return d;
}

CantorTubeSpec build_cantor_tube(int depth,
                                 const std::optional<std::vector<double>>& lambda_override) {
  if (depth < 1) fail(ErrorKind::PreconditionNotMet, "cantor depth must be >= 1");
  CantorTubeSpec s;
  s.depth = depth;
  s.lambda.assign(depth + 1, Rational(0));
  for (int n = 1; n <= depth; ++n) {
    double v = default_lambda(n);
    if (lambda_override) {
      if (static_cast<int>(lambda_override->size()) < depth)
        fail(ErrorKind::PreconditionNotMet, "lambda override shorter than depth");
      v = (*lambda_override)[n - 1];
    }
    s.lambda[n] = rat(v);
    if (!(s.lambda[n] > 0) || !(s.lambda[n] < Rational(1, 2)))
      fail(ErrorKind::PreconditionNotMet, "lambda must lie in (0, 1/2)");
    if (n > 1 && !(s.lambda[n] > s.lambda[n - 1]))
      fail(ErrorKind::PreconditionNotMet, "lambda must be strictly increasing");
  }

  s.l.assign(depth + 1, Rational(1));
  s.e.assign(depth + 1, Rational(0));
  s.c.assign(depth + 1, Rational(0));
  for (int n = 1; n <= depth; ++n) {
    s.l[n] = s.l[n - 1] * s.lambda[n];
    s.e[n] = s.l[n - 1] * (1 - 2 * s.lambda[n]) / 3;
  }
  s.c[0] = s.e[1] / 8;
  for (int n = 1; n <= depth; ++n) s.c[n] = s.c[n - 1] / 64;

  s.cubes.resize(depth + 1);
  s.cubes[0].push_back(CantorCube{0, -1, RPoint{0, 0, 0}});
  for (int n = 1; n <= depth; ++n) {
    const auto& prev = s.cubes[n - 1];
    auto& cur = s.cubes[n];
    cur.reserve(prev.size() * 8);
    for (std::size_t p = 0; p < prev.size(); ++p) {
      for (int bits = 0; bits < 8; ++bits) {
        CantorCube q{n, static_cast<int>(p), prev[p].lo};
        for (int k = 0; k < 3; ++k)
          q.lo[k] += s.e[n] + ((bits >> k) & 1) * (s.e[n] + s.l[n]);
        cur.push_back(q);
      }
    }
  }

  s.curves.resize(depth + 1);
  for (int n = 1; n <= depth; ++n) {
    const Rational u = 3 * s.c[n] / 2;
    for (std::size_t i = 0; i < s.cubes[n].size(); ++i) {
      const int bits = static_cast<int>(i % 8);
      const int a = bits & 1, b = (bits >> 1) & 1, top = (bits >> 2) & 1;
      const CantorCube& parent = s.cubes[n - 1][s.cubes[n][i].parent];
      const RPoint x = s.top_center(n, static_cast<int>(i));
      const Rational x0 = parent.lo[0] + s.l[n - 1] / 2;
      const Rational y0 = parent.lo[1] + s.l[n - 1] / 2;
      const Rational ztop = parent.lo[2] + s.l[n - 1];
      const int mult = top ? 3 : 1;
      const Rational lane_x = x0 + (2 * a - 1) * mult * u;
      const Rational lane_y = y0 + (2 * b - 1) * mult * u;
      const Rational z1 = x[2] + s.e[n] / 2;

      TubeCurve curve;
      curve.level = n;
      curve.cube = static_cast<int>(i);
      curve.vertices = {
          RPoint{lane_x, lane_y, ztop}, RPoint{lane_x, lane_y, z1},
          RPoint{lane_x, x[1], z1},     RPoint{x[0], x[1], z1},
          x,
      };
      const Rational total = polyline_length(curve.vertices);
      if (total < 8 * s.c[n]) {
        fail(ErrorKind::ConstructionError,
             "curve shorter than 8c at level " + std::to_string(n) + " cube " +
                 std::to_string(i));
      }
      Rational pos = 0;
      curve.cuts.push_back(pos);
      for (const Rational& len : split_lengths(total, s.c[n])) {
        pos += len;
        curve.cuts.push_back(pos);
      }
      s.curves[n].push_back(std::move(curve));
    }
  }

  // Routing must leave room for the lanes; certify before returning.
  const CantorAudit audit = audit_cantor(s);
  if (!audit.ok) fail(ErrorKind::ConstructionError, audit.failures.front());
  return s;
}

Rational cantor_measure(const CantorTubeSpec& spec, int n) {
  Rational m = 0;
  const Rational vol = spec.l[n] * spec.l[n] * spec.l[n];
  for (std::size_t i = 0; i < spec.cubes[n].size(); ++i) m += vol;
  return m;
}

CantorAudit audit_cantor(const CantorTubeSpec& s) {
  CantorAudit out;
  auto bad = [&](const std::string& what) {
    out.ok = false;
    out.failures.push_back(what);
  };
  const int m = s.depth;

  for (int n = 1; n <= m; ++n) {
    if (!(s.lambda[n] > 0 && s.lambda[n] < Rational(1, 2))) bad("lambda range");
    if (n > 1 && !(s.lambda[n] > s.lambda[n - 1])) bad("lambda not increasing");
    if (s.l[n] != s.l[n - 1] * s.lambda[n]) bad("l_n recursion");
    if (s.e[n] != s.l[n - 1] * (1 - 2 * s.lambda[n]) / 3) bad("e_n definition");
    if (s.c[n] != s.c[n - 1] / 64) bad("c_n recursion");
    if (s.c[n] > s.e[n] / 8) bad("c_n > e_n/8 at level " + std::to_string(n));
    if (s.c[n] > s.l[n]) bad("c_n > l_n at level " + std::to_string(n));
  }
  if (m >= 1 && s.c[0] != s.e[1] / 8) bad("c_0 definition");

  Rational prod = 1;
  for (int n = 1; n <= m; ++n) {
    prod *= 2 * s.lambda[n];
    if (cantor_measure(s, n) != prod * prod * prod) bad("|C_n| product formula");
    if (s.cubes[n].size() != s.cubes[n - 1].size() * 8) bad("cube count");
  }

  // Children: inside the parent, separated by at least e_n from each other and
  // from the parent boundary.
  for (int n = 1; n <= m; ++n) {
    const auto& cubes = s.cubes[n];
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      const CantorCube& q = cubes[i];
      const CantorCube& p = s.cubes[n - 1][q.parent];
      for (int k = 0; k < 3; ++k) {
        if (q.lo[k] - p.lo[k] < s.e[n] ||
            (p.lo[k] + s.l[n - 1]) - (q.lo[k] + s.l[n]) < s.e[n])
          bad("child too close to parent boundary");
      }
      for (std::size_t j = i + 1; j < cubes.size() && cubes[j].parent == q.parent; ++j) {
        Rational gap = 0;
        for (int k = 0; k < 3; ++k) {
          const Rational g = std::max(cubes[j].lo[k] - (q.lo[k] + s.l[n]),
                                      q.lo[k] - (cubes[j].lo[k] + s.l[n]));
          gap = std::max(gap, g);
        }
        if (gap < s.e[n]) bad("sibling cubes closer than e_n");
      }
    }
  }

  for (int n = 1; n <= m; ++n) {
    const auto& curves = s.curves[n];
    const Rational cn = s.c[n];
    for (const TubeCurve& L : curves) {
      ++out.curves_checked;
      const std::string tag =
          " (level " + std::to_string(n) + ", cube " + std::to_string(L.cube) + ")";
      const CantorCube& own = s.cubes[n][L.cube];
      const CantorCube& parent = s.cubes[n - 1][own.parent];
      const auto& v = L.vertices;
      if (v.size() < 2) {
        bad("degenerate curve" + tag);
        continue;
      }
      // (L1) and sibling clearance.
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (!seg_in_closed_box(v[k], v[k + 1], parent.lo, s.l[n - 1]))
          bad("(L1) leaves parent cube" + tag);
        const int first = own.parent * 8;
        for (int sib = first; sib < first + 8; ++sib) {
          const CantorCube& q = s.cubes[n][sib];
          if (seg_hits_open_box(v[k], v[k + 1], q.lo, s.l[n]))
            bad("(L1) enters a child interior" + tag);
          if (sib != L.cube && seg_box_distance_sq(v[k], v[k + 1], q.lo, s.l[n]) < cn * cn)
            bad("curve within c_n of a sibling cube" + tag);
        }
        // (L4)
        const int ax = moving_axis(v[k], v[k + 1]);
        if (ax < 0) bad("(L4) segment not axis-parallel" + tag);
        else if (seg_length(v[k], v[k + 1]) < cn) bad("(L4) segment shorter than c_n" + tag);
      }
      // Endpoints and (L2), (L5).
      const RPoint x = s.top_center(n, L.cube);
      if (v.back() != x) bad("curve does not end at x_{n,i}" + tag);
      const RPoint& y = v.front();
      if (y[2] != parent.lo[2] + s.l[n - 1]) bad("y_{n,i} not on parent top face" + tag);
      const RPoint xp = s.top_center(n - 1, own.parent);
      Rational d2 = 0;
      for (int k = 0; k < 3; ++k) d2 += (y[k] - xp[k]) * (y[k] - xp[k]);
      if (d2 * 4 > s.c[n - 1] * s.c[n - 1]) bad("(L2) |y - x_parent| > c_{n-1}/2" + tag);
      if (moving_axis(v[0], v[1]) != 2 || moving_axis(v[v.size() - 2], v.back()) != 2)
        bad("(L5) endpoint approach not perpendicular" + tag);
      const Rational total = polyline_length(v);
      if (total < 8 * cn) bad("curve shorter than 8 c_n" + tag);

      // (P1)-(P4)
      // Pieces are arc-length intervals, so consecutive ones share exactly the
      // cut point once the cuts increase strictly.
      const std::size_t J = L.piece_count();
      if (J == 0 || J % 2 != 0) bad("(P1) odd piece count" + tag);
      for (std::size_t j = 0; j < J; ++j) {
        ++out.pieces_checked;
        const Rational len = L.cuts[j + 1] - L.cuts[j];
        if (len < 2 * cn || len > 6 * cn) bad("(P2) piece length outside [2c,6c]" + tag);
      }
      if (J > 0) {
        if (L.cuts.front() != 0 || L.cuts.back() != total)
          bad("pieces do not cover the curve" + tag);
        if (L.piece(0).front() != y) bad("(P4) first piece does not touch parent boundary" + tag);
        if (L.piece(J - 1).back() != x) bad("(P4) last piece does not touch C_{n,i}" + tag);
      }
    }

    // (L3) with the tube radius: curves at least 2c_n apart so tubes keep c_n.
    // Curves with different parents live in closed parent cubes at least
    // e_{n-1} >= 8c_{n-1} apart, so only siblings need the exact test.
    Rational min_ratio = -1;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      for (std::size_t j = i + 1; j < curves.size() && j / 8 == i / 8; ++j) {
        Rational best = -1;
        const auto& a = curves[i].vertices;
        const auto& b = curves[j].vertices;
        for (std::size_t p = 0; p + 1 < a.size(); ++p)
          for (std::size_t q = 0; q + 1 < b.size(); ++q) {
            const Rational d = segment_distance_sq(a[p], a[p + 1], b[q], b[q + 1]);
            if (best < 0 || d < best) best = d;
          }
        if (best < cn * cn) bad("(L3) curves closer than c_n at level " + std::to_string(n));
        if (best < 4 * cn * cn)
          bad("tubes closer than c_n at level " + std::to_string(n));
        const Rational r = best / (cn * cn);
        if (min_ratio < 0 || r < min_ratio) min_ratio = r;
      }
    }
    if (min_ratio >= 0 &&
        (n == 1 || min_ratio < out.min_curve_gap_sq_over_c_sq))
      out.min_curve_gap_sq_over_c_sq = min_ratio;
  }
  return out;
}

namespace {

void put(std::ostringstream& os, const Rational& r) {
  os << numerator(r) << '/' << denominator(r);
}

void put(std::ostringstream& os, const RPoint& p) {
  for (int k = 0; k < 3; ++k) {
    os << ' ';
    put(os, p[k]);
  }
}

Rational get_rational(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) fail(ErrorKind::Format, "cantor: truncated rational");
  const auto slash = tok.find('/');
  if (slash == std::string::npos) fail(ErrorKind::Format, "cantor: bad rational " + tok);
  using boost::multiprecision::cpp_int;
  return Rational(cpp_int(tok.substr(0, slash)), cpp_int(tok.substr(slash + 1)));
}

RPoint get_point(std::istream& is) {
  RPoint p;
  for (int k = 0; k < 3; ++k) p[k] = get_rational(is);
  return p;
}

}  // namespace

std::string serialize_cantor(const CantorTubeSpec& s) {
  std::ostringstream os;
  os << "CANTOR1\n";
  os << "depth " << s.depth << "\n";
  for (int n = 1; n <= s.depth; ++n) {
    os << "lambda " << n << ' ';
    put(os, s.lambda[n]);
    os << "\n";
  }
  for (int n = 0; n <= s.depth; ++n) {
    os << "l " << n << ' ';
    put(os, s.l[n]);
    os << "\nc " << n << ' ';
    put(os, s.c[n]);
    os << "\n";
    if (n >= 1) {
      os << "e " << n << ' ';
      put(os, s.e[n]);
      os << "\n";
    }
  }
  for (int n = 0; n <= s.depth; ++n)
    for (std::size_t i = 0; i < s.cubes[n].size(); ++i) {
      os << "cube " << n << ' ' << i << ' ' << s.cubes[n][i].parent;
      put(os, s.cubes[n][i].lo);
      os << "\n";
    }
  for (int n = 1; n <= s.depth; ++n)
    for (const TubeCurve& L : s.curves[n]) {
      os << "curve " << n << ' ' << L.cube << ' ' << L.vertices.size();
      for (const auto& p : L.vertices) put(os, p);
      os << "\n";
      // Piece lengths, run-length encoded.
      os << "cuts " << n << ' ' << L.cube;
      std::size_t j = 0;
      const std::size_t J = L.piece_count();
      std::vector<std::pair<std::size_t, Rational>> runs;
      while (j < J) {
        const Rational len = L.cuts[j + 1] - L.cuts[j];
        std::size_t k = j + 1;
        while (k < J && L.cuts[k + 1] - L.cuts[k] == len) ++k;
        runs.emplace_back(k - j, len);
        j = k;
      }
      os << ' ' << runs.size();
      for (const auto& [count, len] : runs) {
        os << ' ' << count << ' ';
        put(os, len);
      }
      os << "\n";
    }
  os << "end\n";
  return os.str();
}

CantorTubeSpec parse_cantor(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  if (!(is >> tok) || tok != "CANTOR1") fail(ErrorKind::Format, "cantor: missing CANTOR1 header");
  CantorTubeSpec s;
  if (!(is >> tok >> s.depth) || tok != "depth" || s.depth < 1)
    fail(ErrorKind::Format, "cantor: bad depth line");
  const int m = s.depth;
  s.lambda.assign(m + 1, Rational(0));
  s.l.assign(m + 1, Rational(0));
  s.e.assign(m + 1, Rational(0));
  s.c.assign(m + 1, Rational(0));
  s.cubes.resize(m + 1);
  s.curves.resize(m + 1);
  auto level = [&](int n) {
    if (n < 0 || n > m) fail(ErrorKind::Format, "cantor: level out of range");
    return n;
  };
  while (is >> tok) {
    int n = 0;
    if (tok == "end") return s;
    if (!(is >> n)) fail(ErrorKind::Format, "cantor: missing level");
    level(n);
    if (tok == "lambda") {
      s.lambda[n] = get_rational(is);
    } else if (tok == "l") {
      s.l[n] = get_rational(is);
    } else if (tok == "e") {
      s.e[n] = get_rational(is);
    } else if (tok == "c") {
      s.c[n] = get_rational(is);
    } else if (tok == "cube") {
      std::size_t i = 0;
      CantorCube q;
      is >> i >> q.parent;
      q.level = n;
      q.lo = get_point(is);
      if (i != s.cubes[n].size()) fail(ErrorKind::Format, "cantor: cubes out of order");
      s.cubes[n].push_back(q);
    } else if (tok == "curve") {
      TubeCurve L;
      std::size_t count = 0;
      is >> L.cube >> count;
      L.level = n;
      for (std::size_t k = 0; k < count; ++k) L.vertices.push_back(get_point(is));
      s.curves[n].push_back(std::move(L));
    } else if (tok == "cuts") {
      int cube = 0;
      std::size_t runs = 0;
      is >> cube >> runs;
      if (s.curves[n].empty() || s.curves[n].back().cube != cube)
        fail(ErrorKind::Format, "cantor: cuts without curve");
      auto& cuts = s.curves[n].back().cuts;
      Rational pos = 0;
      cuts.assign(1, pos);
      for (std::size_t r = 0; r < runs && is; ++r) {
        std::size_t count = 0;
        is >> count;
        const Rational len = get_rational(is);
        for (std::size_t k = 0; k < count; ++k) {
          pos += len;
          cuts.push_back(pos);
        }
      }
    } else {
      fail(ErrorKind::Format, "cantor: unknown record " + tok);
    }
    if (!is) fail(ErrorKind::Format, "cantor: malformed record " + tok);
  }
  fail(ErrorKind::Format, "cantor: missing end record");
}

// ---------------------------------------------------------------------------

TubeIndex::TubeIndex(const CantorTubeSpec& spec) : spec_(&spec) {
  const int m = spec.depth;
  side_.resize(m + 1);
  radius_.resize(m + 1);
  lo_.resize(m + 1);
  segs_.resize(m + 1);
  for (int n = 0; n <= m; ++n) {
    side_[n] = to_d(spec.l[n]);
    radius_[n] = to_d(spec.c[n]) / 2;
    for (const auto& q : spec.cubes[n]) lo_[n].push_back(to_vec(q.lo));
    if (n >= 1) {
      for (const auto& L : spec.curves[n]) {
        std::vector<Seg> segs;
        for (std::size_t k = 0; k + 1 < L.vertices.size(); ++k)
          segs.push_back({to_vec(L.vertices[k]), to_vec(L.vertices[k + 1])});
        segs_[n].push_back(std::move(segs));
      }
    }
  }
}

bool TubeIndex::in_tube(int n, int i, const Vec3& x) const {
  const int parent = spec_->cubes[n][i].parent;
  const Vec3& plo = lo_[n - 1][parent];
  const Vec3& clo = lo_[n][i];
  bool in_child = true;
  for (int k = 0; k < 3; ++k) {
    if (x[k] < plo[k] || x[k] > plo[k] + side_[n - 1]) return false;
    if (!(x[k] > clo[k] && x[k] < clo[k] + side_[n])) in_child = false;
  }
  if (in_child) return false;
  const double r2 = radius_[n] * radius_[n];
  for (const Seg& s : segs_[n][i]) {
    double d2 = 0;
    for (int k = 0; k < 3; ++k) {
      const double a = std::min(s.a[k], s.b[k]), b = std::max(s.a[k], s.b[k]);
      const double g = x[k] < a ? a - x[k] : (x[k] > b ? x[k] - b : 0.0);
      d2 += g * g;
    }
    if (d2 <= r2) return true;
  }
  return false;
}

int TubeIndex::cube_of(const Vec3& x, int n) const {
  int idx = 0;
  for (int level = 1; level <= n; ++level) {
    const Vec3& plo = lo_[level - 1][idx];
    int bits = 0;
    for (int k = 0; k < 3; ++k) {
      const Vec3& c0 = lo_[level][idx * 8];
      const double lo0 = c0[k];
      const double lo1 = plo[k] + (lo0 - plo[k]) * 2 + side_[level];
      if (x[k] >= lo0 && x[k] <= lo0 + side_[level]) continue;
      if (x[k] >= lo1 && x[k] <= lo1 + side_[level]) {
        bits |= 1 << k;
        continue;
      }
      return -1;
    }
    idx = idx * 8 + bits;
  }
  return idx;
}

std::pair<int, int> TubeIndex::tube_of(const Vec3& x) const {
  for (int k = 0; k < 3; ++k)
    if (x[k] < 0 || x[k] > 1) return {0, -1};
  int parent = 0;
  for (int n = 1; n <= spec_->depth; ++n) {
    for (int i = parent * 8; i < parent * 8 + 8; ++i)
      if (in_tube(n, i, x)) return {n, i};
    if (n == spec_->depth) break;
    const int next = cube_of(x, n);
    if (next < 0) break;
    parent = next;
  }
  return {0, -1};
}

bool TubeIndex::in_tubes(const Vec3& x) const { return tube_of(x).first != 0; }

std::uint64_t pack_cell(std::int64_t i, std::int64_t j, std::int64_t k) {
  return (static_cast<std::uint64_t>(k) << 42) | (static_cast<std::uint64_t>(j) << 21) |
         static_cast<std::uint64_t>(i);
}

std::array<std::int64_t, 3> unpack_cell(std::uint64_t key) {
  const std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  return {static_cast<std::int64_t>(key & mask),
          static_cast<std::int64_t>((key >> 21) & mask),
          static_cast<std::int64_t>(key >> 42)};
}

std::vector<std::vector<std::uint64_t>> voxelize_tubes(const CantorTubeSpec& spec, int n,
                                                       int level) {
  if (n < 1 || n > spec.depth) fail(ErrorKind::PreconditionNotMet, "tube level out of range");
  if (level > 20) fail(ErrorKind::ResourceLimit, "voxelize_tubes supports K <= 20");
  TubeIndex index(spec);
  const double h = std::ldexp(1.0, -level);
  const double r = static_cast<double>(spec.c[n]) / 2;
  const std::int64_t top = std::int64_t{1} << level;
  std::vector<std::vector<std::uint64_t>> out;
  for (const TubeCurve& L : spec.curves[n]) {
    std::vector<std::uint64_t> cells;
    for (std::size_t s = 0; s + 1 < L.vertices.size(); ++s) {
      const Vec3 a = to_vec(L.vertices[s]), b = to_vec(L.vertices[s + 1]);
      std::int64_t lo[3], hi[3];
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::max<std::int64_t>(0, static_cast<std::int64_t>(
                                              std::floor((std::min(a[k], b[k]) - r) / h)));
        hi[k] = std::min<std::int64_t>(top - 1, static_cast<std::int64_t>(
                                                    std::floor((std::max(a[k], b[k]) + r) / h)));
      }
      for (std::int64_t kk = lo[2]; kk <= hi[2]; ++kk)
        for (std::int64_t jj = lo[1]; jj <= hi[1]; ++jj)
          for (std::int64_t ii = lo[0]; ii <= hi[0]; ++ii) {
            const Vec3 x{(ii + 0.5) * h, (jj + 0.5) * h, (kk + 0.5) * h};
            if (index.tube_of(x) == std::pair<int, int>{n, L.cube})
              cells.push_back(pack_cell(ii, jj, kk));
          }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    out.push_back(std::move(cells));
  }
  return out;
}

TubeSeparation tube_separation(const std::vector<std::vector<std::uint64_t>>& tubes,
                               int level, double search_radius) {
  const double h = std::ldexp(1.0, -level);
  const std::int64_t bucket = static_cast<std::int64_t>(std::ceil(search_radius / h)) + 1;

  struct Entry {
    std::uint64_t bucket_key;
    int tube;
    std::array<std::int64_t, 3> cell;
  };
  std::vector<Entry> entries;
  TubeSeparation out;
  for (std::size_t t = 0; t < tubes.size(); ++t) {
    const auto& cells = tubes[t];
    for (std::uint64_t key : cells) {
      const auto c = unpack_cell(key);
      bool boundary = false;
      for (int k = 0; k < 3 && !boundary; ++k)
        for (int s : {-1, 1}) {
          auto d = c;
          d[k] += s;
          if (d[k] < 0 || !std::binary_search(cells.begin(), cells.end(),
                                              pack_cell(d[0], d[1], d[2]))) {
            boundary = true;
            break;
          }
        }
      if (!boundary) continue;
      entries.push_back({pack_cell(c[0] / bucket, c[1] / bucket, c[2] / bucket),
                         static_cast<int>(t), c});
    }
  }
  out.boundary_voxels = entries.size();
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.bucket_key < b.bucket_key; });

  double best2 = search_radius * search_radius / (h * h);
  auto range = [&](std::uint64_t key) {
    return std::equal_range(entries.begin(), entries.end(), Entry{key, 0, {}},
                            [](const Entry& a, const Entry& b) { return a.bucket_key < b.bucket_key; });
  };
  std::size_t start = 0;
  while (start < entries.size()) {
    std::size_t stop = start;
    while (stop < entries.size() && entries[stop].bucket_key == entries[start].bucket_key) ++stop;
    const auto b = unpack_cell(entries[start].bucket_key);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const std::int64_t bx = b[0] + dx, by = b[1] + dy, bz = b[2] + dz;
          if (bx < 0 || by < 0 || bz < 0) continue;
          const std::uint64_t nkey = pack_cell(bx, by, bz);
          if (nkey < entries[start].bucket_key) continue;  // each bucket pair once
          auto [first, last] = range(nkey);
          for (std::size_t p = start; p < stop; ++p)
            for (auto it = first; it != last; ++it) {
              if (it->tube == entries[p].tube) continue;
              double d2 = 0;
              for (int k = 0; k < 3; ++k) {
                const double g =
                    std::max<std::int64_t>(0, std::llabs(it->cell[k] - entries[p].cell[k]) - 1);
                d2 += g * g;
              }
              if (d2 < best2) {
                best2 = d2;
                out.tube_a = std::min(it->tube, entries[p].tube);
                out.tube_b = std::max(it->tube, entries[p].tube);
              }
            }
        }
    start = stop;
  }
  out.min_face_distance = std::sqrt(best2) * h;
  return out;
}

}  // namespace sobext

namespace sobext {

std::vector<Vec3> cantor_sample_points(const CantorTubeSpec& spec, std::size_t count,
                                       std::uint64_t seed) {
  const int d = spec.depth;
  std::vector<std::vector<std::vector<int>>> kids(d + 1);
  for (int n = 0; n < d; ++n) kids[n].assign(spec.cubes[n].size(), {});
  for (int n = 1; n <= d; ++n)
    for (int i = 0; i < static_cast<int>(spec.cubes[n].size()); ++i)
      kids[n - 1][spec.cubes[n][i].parent].push_back(i);
  std::mt19937_64 rng(seed);
  const double half = static_cast<double>(spec.l[d]) / 2;
  std::vector<Vec3> out;
  for (std::size_t s = 0; s < count; ++s) {
    int idx = 0;
    for (int n = 0; n < d; ++n) {
      const auto& k = kids[n][idx];
      idx = k[rng() % k.size()];
    }
    const RPoint& lo = spec.cubes[d][idx].lo;
    out.push_back({static_cast<double>(lo[0]) + half, static_cast<double>(lo[1]) + half,
                   static_cast<double>(lo[2]) + half});
  }
  return out;
}

}  // namespace sobext
