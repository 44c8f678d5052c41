#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "output.hpp"
#include "sobext/cantor.hpp"
#include "sobext/curves.hpp"
#include "sobext/errors.hpp"
#include "sobext/extension.hpp"
#include "sobext/perimeter.hpp"
#include "sobext/sets.hpp"
#include "sobext/whitney.hpp"

namespace sobext::cli {

namespace fs = std::filesystem;

namespace {

std::string out_dir(const Config& cfg) { return cfg.get_string("run", "out", "run"); }

std::uint64_t run_seed(const Config& cfg) {
  return static_cast<std::uint64_t>(cfg.get_int("run", "seed", 1));
}

int base_level(const Config& cfg) {
  const long long k = cfg.get_int("domain", "K", 7);
  if (k < 1 || k > 20) fail(ErrorKind::Usage, "K must lie in [1, 20]");
  return static_cast<int>(k);
}

VoxelDomain load_domain(const Config& cfg) {
  if (const auto file = cfg.get("domain", "file")) return read_voxd(*file);
  const auto gen = cfg.get("domain", "generator");
  if (!gen) fail(ErrorKind::Usage, "no domain: give --domain or --domain-file");
  return build_domain(GeneratorSpec::parse(*gen), base_level(cfg));
}

/// Generator behind a domain, needed to rebuild it at finer levels.
GeneratorSpec domain_generator(const Config& cfg, const VoxelDomain& dom) {
  if (const auto gen = cfg.get("domain", "generator")) return GeneratorSpec::parse(*gen);
  try {
    return GeneratorSpec::parse(dom.name);
  } catch (const Error&) {
    fail(ErrorKind::Usage, "domain file carries no generator; refinement is unavailable");
  }
}

std::string cell(const LemmaRatio& r) {
  return r.flag == RatioFlag::Ok ? num(r.ratio) : std::string(to_string(r.flag));
}

std::string cube_line(const DyadicCube& q) {
  std::string s = std::to_string(q.level);
  for (int a = 0; a < q.dim; ++a) s += " " + std::to_string(q.index[a]);
  return s;
}

Vec3 point_of(const std::vector<double>& v, const char* what) {
  if (v.size() < 2 || v.size() > 3) fail(ErrorKind::Usage, std::string(what) + " needs 2 or 3 coordinates");
  return {v[0], v[1], v.size() == 3 ? v[2] : 0.0};
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) row.push_back(f);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int cmd_gen(const Config& cfg) {
  Stopwatch sw;
  const auto gen = cfg.get("domain", "generator");
  if (!gen) fail(ErrorKind::Usage, "gen needs --domain");
  const GeneratorSpec spec = GeneratorSpec::parse(*gen);
  const int k = base_level(cfg);
  const VoxelDomain dom = build_domain(spec, k);
  RunRecorder rec(out_dir(cfg), "gen", cfg.emit());
  write_voxd(dom, rec.path("domain.voxd"));
  rec.add("domain.voxd");
  rec.write("domain.ppm", domain_ppm(dom));
  std::ostringstream os;
  os << "domain=" << spec.to_string() << " K=" << k << " dim=" << dom.grid.dim
     << " cells=" << dom.grid.cells() << " occupied=" << dom.count()
     << " measure=" << num(dom.measure()) << " connected=" << (dom.connected ? 1 : 0) << "\n";
  rec.write("gen_summary.txt", os.str());
  rec.write("gen.ini", cfg.emit());
  rec.time("gen", sw.seconds());
  rec.finish();
  std::cout << os.str();
  return 0;
}

int cmd_whitney(const Config& cfg) {
  Stopwatch sw;
  const VoxelDomain dom = load_domain(cfg);
  const int lmax = static_cast<int>(cfg.get_int("whitney", "max_level", -1));
  const WhitneyDecomposition dec = whitney_decompose(dom, lmax);
  const WhitneyAudit audit = audit_whitney(dec, dom);
  RunRecorder rec(out_dir(cfg), "whitney", cfg.emit());
  rec.write("whitney.txt", whitney_text(dec));
  if (dom.grid.dim == 2) rec.write("whitney.svg", whitney_svg(dec));
  auto mark = [](std::size_t fails) { return fails == 0 ? std::string("ok") : "FAIL(" + std::to_string(fails) + ")"; };
  std::ostringstream os;
  os << "W1 " << mark(audit.w1_fail) << " W2 " << mark(audit.w2_fail) << " W3 " << mark(audit.w3_fail)
     << " W4 " << mark(audit.w4_fail)
     << " collar=" << num(static_cast<double>(audit.collar_cells) * dom.grid.cell_volume()) << "\n";
  os << "cubes=" << audit.cubes << " face_pairs=" << audit.face_pairs
     << " touch_pairs=" << audit.touch_pairs << " dist_ratio=[" << num(audit.min_dist_ratio) << ","
     << num(audit.max_dist_ratio) << "]\n";
  const auto hist = level_histogram(dec);
  for (std::size_t l = 0; l < hist.size(); ++l)
    if (hist[l]) os << "level " << l << ": " << hist[l] << "\n";
  rec.write("whitney_summary.txt", os.str());
  rec.write("whitney.ini", cfg.emit());
  rec.time("whitney", sw.seconds());
  rec.finish();
  std::cout << os.str();
  if (!audit.ok()) fail(ErrorKind::Internal, "Whitney audit failed");
  return 0;
}

int cmd_extend(const Config& cfg) {
  Stopwatch sw;
  const VoxelDomain dom0 = load_domain(cfg);
  const SetSpec set = SetSpec::parse(cfg.get_string("extend", "set", "half"));
  const std::vector<double> ps = cfg.get_list("extend", "p", {1.5});
  const long long refine = cfg.get_int("domain", "refine", 0);
  if (refine < 0 || refine > 6) fail(ErrorKind::Usage, "refine must lie in [0, 6]");
  ExtensionParams prm;
  prm.c = cfg.get_double("extend", "c", 0);
  prm.margin_units = static_cast<int>(cfg.get_int("extend", "margin", 0));
  prm.max_level = static_cast<int>(cfg.get_int("extend", "max_level", -1));
  prm.energy_per_side = static_cast<int>(cfg.get_int("extend", "energy_per_side", 32));
  prm.lemmas = cfg.get_bool("extend", "lemmas", true);
  const GeneratorSpec gen = refine > 0 ? domain_generator(cfg, dom0) : GeneratorSpec{};

  RunRecorder rec(out_dir(cfg), "extend", cfg.emit());
  std::string csv = std::string(kExtendHeader) + "\n";
  std::ostringstream summary;
  for (long long j = 0; j <= refine; ++j) {
    const VoxelDomain dom = j == 0 ? dom0 : build_domain(gen, dom0.grid.level + static_cast<int>(j));
    const auto a = build_set(dom, set);
    for (double p : ps) {
      prm.p = p;
      Stopwatch cell_sw;
      const ExtensionResult r = extend_set(dom, a, prm);
      const InequalityReport& q = r.report;
      csv += std::to_string(q.level) + "," + num(p) + "," + num(q.rhs) + "," + num(q.lhs_exterior) +
             "," + num(q.lhs_interior) + "," + num(q.lhs_touching) + "," + cell(q.total) + "," +
             cell(q.lemma31) + "," + cell(q.lemma32) + "," + cell(q.lemma33) + "\n";
      summary << "K=" << q.level << " p=" << num(p) << " ratio=" << cell(q.total)
              << " touching=" << num(q.lhs_touching) << " split=" << (q.split_ok ? "ok" : "FAIL")
              << (q.fallback ? " fallback" : "") << "\n";
      const std::string tag = "K" + std::to_string(q.level) + "_p" + num(p);
      rec.time("extend_" + tag, cell_sw.seconds());
      if (j != 0) continue;
      std::ostringstream cubes;
      cubes << "# A' cubes (level i j [k])\n";
      for (int id : r.prime_cubes) cubes << cube_line(r.interior->cubes[id]) << "\n";
      cubes << "# A' collar cells " << r.prime_collar << "\n# A0 cubes\n";
      for (int id : r.a0_cubes) cubes << cube_line(r.exterior->cubes[id]) << "\n";
      cubes << "# A0 collar cells " << r.a0_collar << "\n";
      rec.write("cubes_" + tag + ".txt", cubes.str());
      if (r.domain->grid.dim == 2)
        rec.write("overlay_" + tag + ".svg",
                  layers_svg(r.domain->grid, {{&r.domain->occ, "#cccccc"},
                                              {&r.a_tilde.occ, "#2ca02c"},
                                              {&r.a_prime.occ, "#1f77b4"},
                                              {&r.a.occ, "#d62728"}}));
    }
  }
  rec.write("extend.csv", csv);
  rec.write("extend_summary.txt", summary.str());
  rec.write("extend.ini", cfg.emit());
  rec.time("extend", sw.seconds());
  rec.finish();
  std::cout << summary.str();
  return 0;
}

int cmd_curvescan(const Config& cfg) {
  Stopwatch sw;
  const std::vector<double> ps = cfg.get_list("curves", "p", {1.5});
  ScanOptions opt;
  opt.pairs_per_scale = static_cast<int>(cfg.get_int("curves", "pairs", 8));
  opt.seed = static_cast<std::uint64_t>(cfg.get_int("curves", "seed", static_cast<long long>(run_seed(cfg))));
  opt.scales = cfg.get_list("curves", "scales", {});
  opt.margin_units = static_cast<int>(cfg.get_int("curves", "margin", 1));
  if (opt.pairs_per_scale < 1) fail(ErrorKind::Usage, "pairs must be positive");
  const auto alpha = cfg.get("curves", "cusp_alpha");
  std::optional<VoxelDomain> dom;
  if (!alpha) dom = load_domain(cfg);

  RunRecorder rec(out_dir(cfg), "curvescan", cfg.emit());
  std::string csv = std::string(kCurveHeader) + "\n";
  std::ostringstream summary;
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
  std::size_t id = 0;
  for (double p : ps) {
    CurveConditionReport r;
    if (alpha) {
      std::vector<double> scales = opt.scales;
      if (scales.empty()) scales = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
      r = cusp_scan(parse_double(*alpha), p, scales,
                    static_cast<int>(cfg.get_int("curves", "per_width", 8)));
    } else {
      opt.p = p;
      r = curve_condition_scan(*dom, opt);
    }
    for (const CurvePair& cp : r.pairs)
      csv += std::to_string(id++) + "," + num(p) + "," + num(cp.scale) + "," + num(cp.z1[0]) + "," +
             num(cp.z1[1]) + "," + num(cp.z2[0]) + "," + num(cp.z2[1]) + "," + num(cp.separation) +
             "," + num(cp.cost) + "," + num(cp.ratio) + "," + std::to_string(r.level) + "\n";
    summary << "p=" << num(p) << " K=" << r.level << " sup_ratio=" << num(r.sup_ratio) << "\n";
    std::vector<std::pair<double, double>> pts;
    for (std::size_t s = 0; s < r.scales.size(); ++s) {
      summary << "  scale=" << num(r.scales[s]) << " max_ratio=" << num(r.scale_max[s]) << "\n";
      pts.emplace_back(std::log2(r.scales[s]), r.scale_max[s]);
    }
    series.emplace_back("p=" + num(p), pts);
    if (dom && dom->grid.dim == 2 && !r.pairs.empty()) {
      const auto worst = std::max_element(r.pairs.begin(), r.pairs.end(),
                                          [](const auto& x, const auto& y) { return x.ratio < y.ratio; });
      const VoxelDomain work = embed(*dom, opt.margin_units << dom->grid.level);
      const DistanceField df = distance_transform(work);
      const GeodesicSolver solver(work, df, {Side::Complement, p, WeightKind::Power});
      rec.write("path_p" + num(p) + ".svg", path_svg({solver.solve(worst->z1, worst->z2)}, work));
    }
  }
  rec.write("curvescan.csv", csv);
  rec.write("curvescan_ratio.svg", chart_svg("curve condition ratio", "log2 scale", "max ratio", series));
  rec.write("curvescan_summary.txt", summary.str());
  rec.write("curvescan.ini", cfg.emit());
  rec.time("curvescan", sw.seconds());
  rec.finish();
  std::cout << summary.str();
  return 0;
}

int cmd_geodesic(const Config& cfg) {
  Stopwatch sw;
  const VoxelDomain dom = load_domain(cfg);
  const auto from = cfg.get("geodesic", "from");
  const auto to = cfg.get("geodesic", "to");
  if (!from || !to) fail(ErrorKind::Usage, "geodesic needs --from and --to");
  const Vec3 z1 = point_of(parse_list(*from), "--from");
  const Vec3 z2 = point_of(parse_list(*to), "--to");
  GeodesicOptions go;
  go.p = cfg.get_double("geodesic", "p", 1.5);
  const std::string side = cfg.get_string("geodesic", "side", "complement");
  const std::string weight = cfg.get_string("geodesic", "weight", "power");
  if (side == "complement") go.side = Side::Complement;
  else if (side == "interior") go.side = Side::Interior;
  else fail(ErrorKind::Usage, "side must be complement or interior");
  if (weight == "power") go.weight = WeightKind::Power;
  else if (weight == "inverse") go.weight = WeightKind::InverseDistance;
  else fail(ErrorKind::Usage, "weight must be power or inverse");
  const int margin = static_cast<int>(cfg.get_int("geodesic", "margin", 1));
  const VoxelDomain work = go.side == Side::Complement ? embed(dom, margin << dom.grid.level) : dom;
  const DistanceField df = distance_transform(work);
  const GeodesicSolver solver(work, df, go);
  const GeodesicPath path = solver.solve(z1, z2);

  RunRecorder rec(out_dir(cfg), "geodesic", cfg.emit());
  std::string csv = "i,x,y,z,segment_length,segment_weight\n";
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const Vec3& x = path.points[i];
    csv += std::to_string(i) + "," + num(x[0]) + "," + num(x[1]) + "," + num(x[2]) + "," +
           (i ? num(path.lengths[i - 1]) + "," + num(path.weights[i - 1]) : std::string("0,0")) + "\n";
  }
  rec.write("geodesic.csv", csv);
  if (work.grid.dim == 2) rec.write("geodesic.svg", path_svg({path}, work));
  std::ostringstream os;
  os << "K=" << dom.grid.level << " p=" << num(go.p) << " side=" << side << " weight=" << weight
     << " cost=" << num(path.cost) << " length=" << num(path.length)
     << " nodes=" << path.points.size() << "\n";
  rec.write("geodesic_summary.txt", os.str());
  rec.write("geodesic.ini", cfg.emit());
  rec.time("geodesic", sw.seconds());
  rec.finish();
  std::cout << os.str();
  return 0;
}

int cmd_cantor(const Config& cfg) {
  Stopwatch sw;
  const long long depth = cfg.get_int("cantor", "depth", 2);
  if (depth < 1 || depth > 4) fail(ErrorKind::Usage, "depth must lie in [1, 4]");
  const CantorTubeSpec spec = build_cantor_tube(static_cast<int>(depth));
  const CantorAudit audit = audit_cantor(spec);
  RunRecorder rec(out_dir(cfg), "cantor", cfg.emit());
  rec.write("cantor_spec.txt", serialize_cantor(spec));
  std::ostringstream os;
  os << "depth=" << depth << " audit=" << (audit.ok ? "ok" : "FAIL") << " curves=" << audit.curves_checked
     << " pieces=" << audit.pieces_checked << "\n";
  for (const auto& f : audit.failures) os << "  failure: " << f << "\n";
  for (int n = 0; n <= depth; ++n)
    os << "n=" << n << " l=" << num(static_cast<double>(spec.l[n])) << " c=" << num(static_cast<double>(spec.c[n]))
       << " measure=" << num(static_cast<double>(cantor_measure(spec, n))) << "\n";

  if (const auto kv = cfg.get("cantor", "K")) {
    const int k = static_cast<int>(parse_int(*kv));
    if (k < 1 || k > 14) fail(ErrorKind::Usage, "cantor K must lie in [1, 14]");
    const double h = std::ldexp(1.0, -k);
    bool any = false;
    for (int n = 1; n <= depth; ++n) {
      const double cn = static_cast<double>(spec.c[n]);
      if (cn < 4 * h) continue;
      any = true;
      const auto tubes = voxelize_tubes(spec, n, k);
      const TubeSeparation sep = tube_separation(tubes, k, 2 * cn);
      os << "voxelized n=" << n << " K=" << k << " tubes=" << tubes.size()
         << " min_gap=" << num(sep.min_face_distance) << " c_n=" << num(cn)
         << " separated=" << (sep.min_face_distance >= cn ? "yes" : "no") << "\n";
    }
    if (!any) fail(ErrorKind::ResolutionTooCoarse, "no tube level is resolved at K=" + std::to_string(k));
  }

  const auto samples = static_cast<std::size_t>(cfg.get_int("cantor", "samples", 20));
  const TubeIndex index(spec);
  const auto in = [&](const Vec3& x) {
    for (int a = 0; a < 3; ++a)
      if (x[a] <= 0 || x[a] >= 1) return false;
    return !index.in_tubes(x);
  };
  std::vector<double> radii;
  for (int j = 2; j <= 6; ++j) radii.push_back(std::ldexp(1.0, -j));
  std::string csv = "point,x,y,z,r,ratio\n";
  double floor = 1;
  const auto pts = cantor_sample_points(spec, samples, run_seed(cfg));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const DensityProfile d = density_profile_implicit(in, 3, pts[i], radii, 16);
    for (std::size_t r = 0; r < radii.size(); ++r) {
      csv += std::to_string(i) + "," + num(pts[i][0]) + "," + num(pts[i][1]) + "," + num(pts[i][2]) +
             "," + num(radii[r]) + "," + num(d.ratios[r]) + "\n";
      floor = std::min(floor, d.ratios[r]);
    }
  }
  os << "density samples=" << pts.size() << " floor=" << num(floor) << "\n";
  rec.write("cantor_density.csv", csv);
  rec.write("cantor_summary.txt", os.str());
  rec.write("cantor.ini", cfg.emit());
  rec.time("cantor", sw.seconds());
  rec.finish();
  std::cout << os.str();
  return audit.ok ? 0 : 1;
}

int cmd_report(const std::string& run_dir) {
  const fs::path mp = fs::path(run_dir) / "manifest.json";
  if (!fs::exists(mp)) fail(ErrorKind::Usage, "empty run dir: " + run_dir);
  nlohmann::ordered_json m;
  try {
    m = nlohmann::ordered_json::parse(read_file(mp.string()));
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Format, "corrupt manifest " + mp.string());
  }
  if (!m.contains("runs") || m["runs"].empty()) fail(ErrorKind::Usage, "empty run dir: " + run_dir);

  const std::string config = m["runs"].begin().value().value("config", "");
  RunRecorder rec(run_dir, "report", config);
  std::ostringstream os;
  for (const auto& [command, run] : m["runs"].items()) {
    if (command == "report") continue;
    os << "== " << command << "\n";
    const fs::path sp = fs::path(run_dir) / (command + "_summary.txt");
    if (fs::exists(sp)) os << read_file(sp.string());
    if (command == "extend") {
      const auto rows = read_csv((fs::path(run_dir) / "extend.csv").string());
      std::map<double, std::vector<std::pair<double, double>>> by_p;
      double best = -1, best_p = 0;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() < 7) fail(ErrorKind::Format, "short row in extend.csv");
        const double p = parse_double(rows[i][1]);
        double ratio = NAN;
        try {
          ratio = parse_double(rows[i][6]);
        } catch (const Error&) {
        }
        by_p[p].emplace_back(parse_double(rows[i][0]), ratio);
        if (std::isfinite(ratio) && ratio > best) best = ratio, best_p = p;
      }
      if (best >= 0) os << "max ratio across p: " << num(best) << " at p=" << num(best_p) << "\n";
      std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
      for (const auto& [p, pts] : by_p) series.emplace_back("p=" + num(p), pts);
      rec.write("report_extend.svg", chart_svg("extension ratio", "K", "lhs/rhs", series));
    } else if (command == "curvescan") {
      const auto rows = read_csv((fs::path(run_dir) / "curvescan.csv").string());
      std::map<double, std::map<double, double>> by_p;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() < 11) fail(ErrorKind::Format, "short row in curvescan.csv");
        auto& v = by_p[parse_double(rows[i][1])][parse_double(rows[i][2])];
        v = std::max(v, parse_double(rows[i][9]));
      }
      std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
      for (const auto& [p, scales] : by_p) {
        std::vector<std::pair<double, double>> pts;
        double lo = INFINITY, hi = 0;
        for (const auto& [s, r] : scales) {
          pts.emplace_back(std::log2(s), r);
          lo = std::min(lo, r), hi = std::max(hi, r);
        }
        os << "p=" << num(p) << " spread across scales: " << num(hi / lo) << "\n";
        series.emplace_back("p=" + num(p), pts);
      }
      rec.write("report_curvescan.svg", chart_svg("curve condition ratio", "log2 scale", "max ratio", series));
    }
  }
  rec.write("summary.txt", os.str());
  rec.finish();
  std::cout << os.str();
  return 0;
}

}  // namespace sobext::cli
