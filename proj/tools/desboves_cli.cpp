// desboves: command-line front end.
//
//   desboves render      --lambda 2 --chart X --resolution 256 --out out/
//   desboves sweep       --rect 1.5,2.5,-0.5,0.5 --step 0.125 --samples 4000 --out out/
//   desboves misiurewicz --target x0 --depth 6 --out out/
//   desboves continuity  --lambda 2 --samples 10000 --out out/
//   desboves cloud       --lambda 2 --samples 10000 --out out/
//   desboves selftest
//
// Exit codes: 0 success, 1 failed check, 2 bad configuration.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "desboves/desboves.hpp"
#include "desboves/io.hpp"
#include "desboves/selftest.hpp"

namespace {

using namespace desboves;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string lambda = "2";
  std::string rect = "1.5,2.5,-0.5,0.5";
  double step = 0.125;
  std::size_t samples = 0;  // 0: per-command default
  int depth = 20;
  std::uint64_t seed = 1;
  double escape_radius = kDefaultEscapeRadius;
  int max_iter = kDefaultMaxIter;
  int resolution = 256;
  std::string chart = "X";
  std::string center = "0";
  double half_width = 2.0;
  unsigned threads = 0;
  std::string out = "out";
  double tolerance = 1e-10;
  std::string target = "x0";
  double radius = 0.1;
  bool probe = false;
  int stop_after_rows = -1;
};

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double x = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') throw ConfigError("not a number: '" + cell + "'");
    v.push_back(x);
  }
  return v;
}

/// "re" or "re,im".
Complex parse_complex(const std::string& s) {
  const auto v = split_numbers(s);
  if (v.size() == 1) return {v[0], 0};
  if (v.size() == 2) return {v[0], v[1]};
  throw ConfigError("expected re or re,im: '" + s + "'");
}

Complex parse_lambda(const std::string& s) {
  const Complex l = parse_complex(s);
  if (l == Complex(0)) throw ConfigError("parameter must be nonzero");
  return l;
}

unsigned thread_count(const Options& o) { return o.threads > 0 ? o.threads : default_threads(); }

void write(const fs::path& p, const std::string& bytes) { io::write_atomic(p, bytes); }

io::json common_manifest(const std::string& command, const Options& o) {
  io::json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["seed"] = o.seed;
  m["tolerance"] = o.tolerance;
  return m;
}

SliceSpec slice_for(const Options& o) {
  const Complex c = parse_complex(o.center);
  if (o.resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!(o.half_width > 0)) throw ConfigError("half-width must be positive");
  if (o.chart == "X") return SliceSpec::line_X(c, o.half_width, o.resolution);
  if (o.chart == "Y") return SliceSpec::line_Y(c, o.half_width, o.resolution);
  if (o.chart == "Z") return SliceSpec::line_Z(c, o.half_width, o.resolution);
  throw ConfigError("chart must be X, Y or Z");
}

int cmd_render(const Options& o) {
  const Complex l = parse_lambda(o.lambda);
  if (!(o.escape_radius > 1)) throw ConfigError("escape radius must exceed 1");
  if (o.max_iter < 0) throw ConfigError("max-iter must be nonnegative");
  const SliceSpec s = slice_for(o);
  const Raster r = render_slice(DesbovesMap(l), s, o.escape_radius, o.max_iter, thread_count(o));
  const fs::path dir = o.out;
  write(dir / "render.pgm", io::raster_pgm(r));
  // Bounded only means "not escaped yet"; rerun at twice the budget and report the difference.
  const Raster longer = render_slice(DesbovesMap(l), s, o.escape_radius, 2 * o.max_iter, thread_count(o));
  const std::size_t flips = escape_flips(r, longer);
  write(dir / "render.txt", "line = " + o.chart + "\n" + io::raster_sidecar(r, o.seed) +
                                "flips_at_double_max_iter = " + std::to_string(flips) + "\n");
  std::cout << "bounded pixels: " << r.bounded_count() << " of " << r.pixels.size() << " (" << flips
            << " escape at " << 2 * o.max_iter << " iterates)\n";
  return 0;
}

int cmd_cloud(const Options& o) {
  const Complex l = parse_lambda(o.lambda);
  const std::size_t n = o.samples ? o.samples : 10000;
  if (o.depth < 1) throw ConfigError("depth must be positive");
  const PointCloud c = julia_cloud(DesbovesMap(l), n, o.depth, o.seed, thread_count(o));
  const fs::path dir = o.out;
  write(dir / "cloud.csv", io::cloud_csv(c));
  io::json m = common_manifest("cloud", o);
  m["lambda"] = {l.real(), l.imag()};
  m["samples"] = n;
  m["depth"] = o.depth;
  m["provenance"] = to_string(c.provenance);
  write(dir / "cloud.json", m.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& o) {
  SweepSpec s;
  const auto r = split_numbers(o.rect);
  if (r.size() != 4) throw ConfigError("rect must be re_min,re_max,im_min,im_max");
  s.rect = {r[0], r[1], r[2], r[3]};
  s.step = o.step;
  s.samples = o.samples ? o.samples : 4000;
  s.depth = o.depth;
  s.seed = o.seed;
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const fs::path dir = o.out;
  const fs::path chk = dir / "checkpoints";
  BifurcationGrid g(s);
  int fresh = 0;
  for (int j = 0; j < g.ny; ++j) {
    if (io::load_row_checkpoint(g, j, chk)) continue;
    if (o.stop_after_rows >= 0 && fresh >= o.stop_after_rows) {
      std::cout << "stopped after " << fresh << " new rows; run again to resume\n";
      return 0;
    }
    sweep_row(g, j, thread_count(o));
    io::save_row_checkpoint(g, j, chk);
    ++fresh;
    std::cerr << "row " << j + 1 << "/" << g.ny << " done\n";
  }
  write(dir / "grid.csv", io::grid_csv(g));
  write(dir / "laplacian.pgm", io::laplacian_pgm(g));
  io::json m = common_manifest("sweep", o);
  m.update(io::sweep_manifest(s, thread_count(o), kVersion));
  int defined = 0, positive = 0;
  for (const auto& l : g.laplacian) {
    defined += l.defined;
    positive += l.positive;
  }
  m["interior_nodes"] = defined;
  m["positive_nodes"] = positive;
  write(dir / "manifest.json", m.dump(2) + "\n");
  std::cout << "positive Laplacian at " << positive << " of " << defined << " interior nodes\n";
  return 0;
}

int cmd_misiurewicz(const Options& o) {
  if (o.depth < 1 || o.depth > kMaxTreeDepth) throw ConfigError("depth must be between 1 and 12");
  const double tol = o.tolerance > 0 ? o.tolerance : 1e-9;
  const fs::path dir = o.out;
  MisiurewiczFinder finder;
  if (o.probe) {
    const Complex l = parse_lambda(o.lambda);
    const auto r = finder.density_probe(l, o.radius, o.depth, tol);
    io::json m = common_manifest("misiurewicz-probe", o);
    m["lambda0"] = {l.real(), l.imag()};
    m["radius"] = o.radius;
    m["depth_searched"] = r.depth_searched;
    if (r.found) m["found"] = io::to_json(*r.found);
    else m["closest_miss"] = r.closest_miss;
    write(dir / "probe.json", m.dump(2) + "\n");
    std::cout << (r.found ? "found" : "not found") << " (depth " << r.depth_searched << ")\n";
    return r.found ? 0 : 1;
  }
  Target t;
  if (o.target == "x0") t = Target::X0;
  else if (o.target == "z0") t = Target::Z0;
  else throw ConfigError("target must be x0 or z0");
  const auto cands = finder.candidates(t, o.depth, tol);
  write(dir / "candidates.json", io::candidates_json(cands));
  std::cout << cands.size() << " candidates\n";
  return 0;
}

int cmd_continuity(const Options& o) {
  const Complex l = parse_lambda(o.lambda);
  const std::size_t n = o.samples ? o.samples : 10000;
  const std::vector<Real> deltas{0.2, 0.1, 0.05, 0.025};
  const auto rep = continuity_ladder(l, deltas, n, o.depth, o.seed, thread_count(o));
  const fs::path dir = o.out;
  std::string csv = "delta,hausdorff\n";
  for (std::size_t k = 0; k < deltas.size(); ++k) csv += io::fmt(deltas[k]) + "," + io::fmt(rep.distances[k]) + "\n";
  write(dir / "continuity.csv", csv);
  io::json m = common_manifest("continuity", o);
  m["lambda0"] = {l.real(), l.imag()};
  m["samples"] = n;
  m["depth"] = o.depth;
  m["noise_floor"] = rep.noise_floor;
  m["monotone_within_noise"] = rep.monotone();
  write(dir / "continuity.json", m.dump(2) + "\n");
  return rep.monotone() ? 0 : 1;
}

int cmd_selftest() {
  int failed = 0;
  for (const auto& r : selftest::run_all()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.reason;
    std::cout << "\n";
    failed += !r.passed;
  }
  std::cout << (failed ? std::to_string(failed) + " failed\n" : "all passed\n");
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of the elementary Desboves maps of the projective plane"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(false);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  // Comma lists arrive split when they come unquoted from a config file.
  auto joined = [](CLI::Option* opt) { opt->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::Join); };
  joined(app.add_option("--lambda", o.lambda, "parameter, re or re,im"));
  joined(app.add_option("--rect", o.rect, "parameter rectangle re_min,re_max,im_min,im_max"));
  app.add_option("--step", o.step, "grid step");
  app.add_option("--samples", o.samples, "points per cloud / walks per node");
  app.add_option("--depth", o.depth, "walk length, or tree depth for misiurewicz");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--escape-radius", o.escape_radius, "pencil-height escape threshold");
  app.add_option("--max-iter", o.max_iter, "iteration budget for classification");
  app.add_option("--resolution", o.resolution, "pixels per axis");
  app.add_option("--chart", o.chart, "slice: X, Y or Z (the invariant lines)");
  joined(app.add_option("--center", o.center, "slice centre, re or re,im"));
  app.add_option("--half-width", o.half_width, "slice half-width");
  app.add_option("--threads", o.threads, "worker threads (default: DESBOVES_THREADS or all cores)");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--tolerance", o.tolerance, "projective equality tolerance");
  app.add_option("--target", o.target, "x0 or z0");
  app.add_option("--radius", o.radius, "density probe radius");
  app.add_flag("--probe", o.probe, "misiurewicz: search near --lambda instead of listing");
  app.add_option("--stop-after-rows", o.stop_after_rows, "sweep: compute at most this many new rows")->group("");

  auto* render = app.add_subcommand("render", "escape-time raster of a slice");
  auto* sweep = app.add_subcommand("sweep", "L(lambda) grid and its Laplacian");
  auto* misiurewicz = app.add_subcommand("misiurewicz", "Misiurewicz parameters from preimage trees");
  auto* continuity = app.add_subcommand("continuity", "Hausdorff distances along a delta ladder");
  auto* cloud = app.add_subcommand("cloud", "equilibrium-measure point cloud");
  auto* self = app.add_subcommand("selftest", "closed-form examples and invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!(o.tolerance > 0)) throw ConfigError("tolerance must be positive");
    tolerance::set_projective(o.tolerance);
    if (*render) return cmd_render(o);
    if (*sweep) return cmd_sweep(o);
    if (*misiurewicz) return cmd_misiurewicz(o);
    if (*continuity) return cmd_continuity(o);
    if (*cloud) return cmd_cloud(o);
    if (*self) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateLambda& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
