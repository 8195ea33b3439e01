#pragma once

// File formats: point-cloud CSV, PGM rasters with a text sidecar, sweep grid
// CSV with row checkpoints, and JSON manifests / candidate lists. Numbers are
// printed with %.17g (round-trip exact); checkpoints use hexfloat.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "desboves/bifurcation.hpp"
#include "desboves/julia.hpp"
#include "desboves/measures.hpp"

namespace desboves::io {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hexfmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline Real parse_real(const std::string& s) {
  char* end = nullptr;
  const Real v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("not a number: " + s);
  return v;
}

/// Writes via a temporary file and rename, so readers never see a partial file.
inline void write_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- point clouds -----------------------------------------------------------

inline constexpr const char* kCloudHeader = "x_re,x_im,y_re,y_im,z_re,z_im,weight";

inline std::string cloud_csv(const PointCloud& c) {
  std::string s = std::string(kCloudHeader) + "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& p = c.points[i];
    for (int k = 0; k < 3; ++k) s += fmt(p[k].real()) + "," + fmt(p[k].imag()) + ",";
    s += fmt(c.weights[i]) + "\n";
  }
  return s;
}

inline PointCloud parse_cloud_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCloudHeader) throw IoError("bad cloud header");
  PointCloud c;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<Real> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(parse_real(cell));
    if (v.size() != 7) throw IoError("cloud row needs 7 columns");
    c.points.push_back(ProjPoint::normalize(Complex(v[0], v[1]), Complex(v[2], v[3]), Complex(v[4], v[5])));
    c.weights.push_back(v[6]);
  }
  return c;
}

// --- rasters ----------------------------------------------------------------

/// Pixel byte: min(n, 254) for Escaped(n), 255 for Bounded.
inline unsigned char pixel_byte(const EscapeClass& e) {
  if (!e.escaped) return 255;
  return static_cast<unsigned char>(std::min(e.iterations, 254));
}

inline std::string pgm(int width, int height, const std::vector<unsigned char>& bytes) {
  std::string s = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  s.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return s;
}

inline std::string raster_pgm(const Raster& r) {
  std::vector<unsigned char> bytes(r.pixels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = pixel_byte(r.pixels[i]);
  return pgm(r.slice.resolution, r.slice.resolution, bytes);
}

inline const char* chart_name(Chart c) { return c == Chart::X ? "X" : c == Chart::Y ? "Y" : "Z"; }

inline std::string raster_sidecar(const Raster& r, std::uint64_t seed) {
  const SliceSpec& s = r.slice;
  std::string t;
  t += "chart = " + std::string(chart_name(s.chart)) + "\n";
  t += "axis = " + std::string(s.axis == SliceAxis::U ? "u" : "v") + "\n";
  t += "center_u = " + fmt(s.center_u.real()) + " " + fmt(s.center_u.imag()) + "\n";
  t += "center_v = " + fmt(s.center_v.real()) + " " + fmt(s.center_v.imag()) + "\n";
  t += "half_width = " + fmt(s.half_width_re) + " " + fmt(s.half_width_im) + "\n";
  t += "resolution = " + std::to_string(s.resolution) + "\n";
  t += "lambda = " + fmt(r.lambda.real()) + " " + fmt(r.lambda.imag()) + "\n";
  t += "escape_radius = " + fmt(r.escape_radius) + "\n";
  t += "max_iter = " + std::to_string(r.max_iter) + "\n";
  t += "seed = " + std::to_string(seed) + "\n";
  t += "bounded_pixels = " + std::to_string(r.bounded_count()) + "\n";
  return t;
}

// --- sweep grids ------------------------------------------------------------

inline constexpr const char* kGridHeader = "re_lambda,im_lambda,L,stderr,laplacian,laplacian_stderr,flag";

/// One row per unmasked node. flag: 1 positive Laplacian, 0 not, empty when
/// the Laplacian is undefined (border or masked stencil).
inline std::string grid_csv(const BifurcationGrid& g) {
  std::string s = std::string(kGridHeader) + "\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const GridNode& n = g.at(i, j);
      if (n.masked) continue;
      const LaplacianNode& l = g.lap(i, j);
      s += fmt(n.lambda.real()) + "," + fmt(n.lambda.imag()) + "," + fmt(n.estimate.value) + "," +
           fmt(n.estimate.std_error) + ",";
      if (l.defined) s += fmt(l.value) + "," + fmt(l.std_error) + "," + (l.positive ? "1" : "0");
      else s += ",,";
      s += "\n";
    }
  return s;
}

/// Laplacian heat map: 0 at the minimum, 254 at the maximum, 255 where the
/// Laplacian is undefined. Row 0 is the largest Im(lambda).
inline std::string laplacian_pgm(const BifurcationGrid& g) {
  Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
  for (const auto& l : g.laplacian)
    if (l.defined) {
      lo = std::min(lo, l.value);
      hi = std::max(hi, l.value);
    }
  std::vector<unsigned char> bytes;
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      const auto& l = g.lap(i, j);
      if (!l.defined) {
        bytes.push_back(255);
        continue;
      }
      const Real t = hi > lo ? (l.value - lo) / (hi - lo) : 0.0;
      bytes.push_back(static_cast<unsigned char>(std::lround(254 * t)));
    }
  return pgm(g.nx, g.ny, bytes);
}

inline json sweep_manifest(const SweepSpec& s, unsigned threads, const std::string& version) {
  json m;
  m["rect"] = {s.rect.re_min, s.rect.re_max, s.rect.im_min, s.rect.im_max};
  m["step"] = s.step;
  m["samples"] = s.samples;
  m["depth"] = s.depth;
  m["seed"] = s.seed;
  m["r_min"] = s.r_min;
  m["threads"] = threads;
  m["version"] = version;
  return m;
}

// --- checkpoints ------------------------------------------------------------

/// Identifies the sweep a checkpoint belongs to; rows from a different spec
/// are never reused.
inline std::string spec_fingerprint(const SweepSpec& s) {
  return hexfmt(s.rect.re_min) + " " + hexfmt(s.rect.re_max) + " " + hexfmt(s.rect.im_min) + " " +
         hexfmt(s.rect.im_max) + " " + hexfmt(s.step) + " " + std::to_string(s.samples) + " " +
         std::to_string(s.depth) + " " + std::to_string(s.seed) + " " + hexfmt(s.r_min);
}

inline fs::path row_checkpoint_path(const fs::path& dir, int j) {
  char name[32];
  std::snprintf(name, sizeof name, "row_%04d.chk", j);
  return dir / name;
}

inline std::string encode_row(const BifurcationGrid& g, int j) {
  std::string s = spec_fingerprint(g.spec) + "\n";
  for (int i = 0; i < g.nx; ++i) {
    const GridNode& n = g.at(i, j);
    const LyapunovEstimate& e = n.estimate;
    const LaplacianNode& l = g.lap(i, j);
    s += std::to_string(n.done) + " " + hexfmt(e.value) + " " + hexfmt(e.std_error) + " " + std::to_string(e.samples) +
         " " + std::to_string(e.discarded) + " " + std::to_string(e.flagged);
    for (Real b : e.batch_means) s += " " + hexfmt(b);
    s += " " + std::to_string(l.defined) + " " + hexfmt(l.value) + " " + hexfmt(l.std_error) + " " +
         std::to_string(l.positive) + "\n";
  }
  return s;
}

/// Restores row j from text; false when the fingerprint or shape differs.
inline bool decode_row(BifurcationGrid& g, int j, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != spec_fingerprint(g.spec)) return false;
  for (int i = 0; i < g.nx; ++i) {
    if (!std::getline(in, line)) return false;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.size() != 6 + kBatches + 4) return false;
    GridNode& n = g.at(i, j);
    LaplacianNode& l = g.laplacian[static_cast<std::size_t>(j) * g.nx + i];
    n.done = tok[0] == "1";
    n.estimate.lambda = n.lambda;
    n.estimate.value = parse_real(tok[1]);
    n.estimate.std_error = parse_real(tok[2]);
    n.estimate.samples = std::stoull(tok[3]);
    n.estimate.discarded = std::stoull(tok[4]);
    n.estimate.flagged = tok[5] == "1";
    for (int b = 0; b < kBatches; ++b) n.estimate.batch_means[b] = parse_real(tok[6 + b]);
    l.defined = tok[6 + kBatches] == "1";
    l.value = parse_real(tok[7 + kBatches]);
    l.std_error = parse_real(tok[8 + kBatches]);
    l.positive = tok[9 + kBatches] == "1";
  }
  return true;
}

inline bool load_row_checkpoint(BifurcationGrid& g, int j, const fs::path& dir) {
  const fs::path p = row_checkpoint_path(dir, j);
  if (!fs::exists(p)) return false;
  return decode_row(g, j, read_file(p));
}

inline void save_row_checkpoint(const BifurcationGrid& g, int j, const fs::path& dir) {
  write_atomic(row_checkpoint_path(dir, j), encode_row(g, j));
}

// --- Misiurewicz candidates -------------------------------------------------

inline json to_json(const MisiurewiczCandidate& c) {
  json j;
  j["lambda"] = {c.lambda.real(), c.lambda.imag()};
  if (c.critical_w.infinite) j["critical_w"] = "inf";
  else j["critical_w"] = {c.critical_w.value.real(), c.critical_w.value.imag()};
  j["n"] = c.n;
  j["target"] = to_string(c.target);
  j["cubic_residual"] = c.cubic_residual;
  j["landing_residual"] = c.landing_residual;
  j["repelling_margin"] = c.repelling_margin;
  j["transversality"] = c.transversality;
  return j;
}

inline std::string candidates_json(const std::vector<MisiurewiczCandidate>& cands) {
  json arr = json::array();
  for (const auto& c : cands) arr.push_back(to_json(c));
  return arr.dump(2) + "\n";
}

}  // namespace desboves::io
