#include <omp.h>

#include <deque>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "output.hpp"
#include "sobext/domain.hpp"
#include "sobext/errors.hpp"

using namespace sobext;
using namespace sobext::cli;

namespace {

struct Binding {
  CLI::Option* opt;
  std::string section, key;
  const std::string* value;
};

int exit_code(ErrorKind kind) {
  return kind == ErrorKind::Internal || kind == ErrorKind::ConstructionError ? 1 : 2;
}

void report_error(const char* kind, std::string msg) {
  for (char& c : msg)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "error kind=" << kind << " msg=" << msg << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sobolev extension experiments on dyadic voxel grids"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);

  std::deque<std::string> store;
  std::vector<Binding> bindings;
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& section,
                  const std::string& key, const std::string& desc) {
    store.emplace_back();
    bindings.push_back({sub->add_option(flag, store.back(), desc), section, key, &store.back()});
  };

  std::string config_path;
  app.add_option("--config", config_path, "experiment config file");
  bind(&app, "--out", "run", "out", "output directory (default: run)");
  bind(&app, "--threads", "run", "threads", "OpenMP threads (0: runtime default)");
  bind(&app, "--seed", "run", "seed", "global seed (default: 1)");

  auto domain_flags = [&](CLI::App* sub) {
    bind(sub, "--domain", "domain", "generator", "generator spec, e.g. ball:r=0.4");
    bind(sub, "--K", "domain", "K", "grid level");
    bind(sub, "--domain-file", "domain", "file", "VOXD domain file");
  };

  CLI::App* gen = app.add_subcommand("gen", "voxelize a generator domain");
  domain_flags(gen);
  std::map<std::string, std::string> gen_params;
  const std::vector<std::pair<std::string, std::string>> param_flags{
      {"--slit-len", "len"}, {"--alpha", "alpha"}, {"--r", "r"},       {"--iter", "iter"},
      {"--depth", "depth"},  {"--width", "width"}, {"--dim", "dim"}};
  std::deque<std::string> param_store;
  std::vector<std::pair<CLI::Option*, std::string>> param_opts;
  for (const auto& [flag, key] : param_flags) {
    param_store.emplace_back();
    param_opts.emplace_back(gen->add_option(flag, param_store.back(), "generator parameter " + key), key);
  }
  std::vector<std::string> extra_params;
  gen->add_option("--param", extra_params, "extra generator parameter k=v");

  CLI::App* whitney = app.add_subcommand("whitney", "Whitney decomposition and audit");
  domain_flags(whitney);
  bind(whitney, "--max-level", "whitney", "max_level", "truncation level");

  CLI::App* extend = app.add_subcommand("extend", "set extension and inequality ratios");
  domain_flags(extend);
  bind(extend, "--set", "extend", "set", "set A: half, quadrant, below_slit, random:seed=S, cubes:...");
  bind(extend, "--p", "extend", "p", "comma-separated exponents in (1, 2)");
  bind(extend, "--refine", "domain", "refine", "extra refinement levels");
  bind(extend, "--c", "extend", "c", "dilation constant (0: 20 sqrt(n))");
  bind(extend, "--margin", "extend", "margin", "exterior margin in world units");
  bind(extend, "--max-level", "extend", "max_level", "Whitney truncation level");
  bind(extend, "--lemmas", "extend", "lemmas", "evaluate lemma sub-ratios (true/false)");

  CLI::App* curvescan = app.add_subcommand("curvescan", "curve-condition ratio scan");
  domain_flags(curvescan);
  bind(curvescan, "--p", "curves", "p", "comma-separated exponents in [1, 2)");
  bind(curvescan, "--pairs", "curves", "pairs", "pairs per scale");
  bind(curvescan, "--scales", "curves", "scales", "comma-separated separation scales");
  bind(curvescan, "--margin", "curves", "margin", "working margin in world units");
  bind(curvescan, "--cusp-alpha", "curves", "cusp_alpha", "windowed outward-cusp scan with this exponent");
  bind(curvescan, "--per-width", "curves", "per_width", "cells across the spike in cusp windows");

  CLI::App* geodesic = app.add_subcommand("geodesic", "one weighted geodesic");
  domain_flags(geodesic);
  bind(geodesic, "--from", "geodesic", "from", "start point x,y");
  bind(geodesic, "--to", "geodesic", "to", "end point x,y");
  bind(geodesic, "--p", "geodesic", "p", "exponent");
  bind(geodesic, "--side", "geodesic", "side", "complement or interior");
  bind(geodesic, "--weight", "geodesic", "weight", "power or inverse");
  bind(geodesic, "--margin", "geodesic", "margin", "working margin in world units");

  CLI::App* cantor = app.add_subcommand("cantor", "Cantor-tube construction and audits");
  bind(cantor, "--depth", "cantor", "depth", "construction depth");
  bind(cantor, "--K", "cantor", "K", "voxelization level for the separation check");
  bind(cantor, "--samples", "cantor", "samples", "Cantor points for density profiles");

  CLI::App* report = app.add_subcommand("report", "summarize a run directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "run directory (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("Usage", e.what());
    return 2;
  }

  try {
    Config cfg = config_path.empty() ? Config::parse("") : Config::load(config_path);
    for (const Binding& b : bindings)
      if (b.opt->count()) cfg.set(b.section, b.key, *b.value);
    if (gen->parsed()) {
      GeneratorSpec spec = GeneratorSpec::parse(cfg.get_string("domain", "generator", "cube"));
      for (const auto& [opt, key] : param_opts)
        if (opt->count()) spec.params[key] = parse_double(opt->as<std::string>());
      for (const auto& kv : extra_params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Usage, "--param expects k=v");
        spec.params[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
      }
      cfg.set("domain", "generator", spec.to_string());
    }
    if (!cfg.get("run", "seed")) cfg.set("run", "seed", "1");
    const long long threads = cfg.get_int("run", "threads", 0);
    if (threads < 0) fail(ErrorKind::Usage, "threads must be non-negative");
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));

    if (gen->parsed()) return cmd_gen(cfg);
    if (whitney->parsed()) return cmd_whitney(cfg);
    if (extend->parsed()) return cmd_extend(cfg);
    if (curvescan->parsed()) return cmd_curvescan(cfg);
    if (geodesic->parsed()) return cmd_geodesic(cfg);
    if (cantor->parsed()) return cmd_cantor(cfg);
    if (report->parsed()) return cmd_report(report_dir.empty() ? cfg.get_string("run", "out", "run") : report_dir);
    fail(ErrorKind::Usage, "no subcommand");
  } catch (const Error& e) {
    report_error(to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return 1;
  }
}
