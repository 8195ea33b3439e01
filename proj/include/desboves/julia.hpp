#pragma once

// Julia/Fatou classification. For lambda != 0 the Fatou set of f_lambda is
// exactly the basin of rho_0, so a point is classified by whether its orbit
// climbs the pencil towards rho_0 within a fixed budget.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <limits>
#include <vector>

#include "desboves/desboves_map.hpp"
#include "desboves/measures.hpp"
#include "desboves/parallel.hpp"
#include "desboves/proj_geometry.hpp"
#include "desboves/rng.hpp"

namespace desboves {

inline constexpr Real kDefaultEscapeRadius = 1e3;
inline constexpr int kDefaultMaxIter = 500;

/// |y| / max(|x|, |z|) on the canonical lift; +infinity at rho_0.
inline Real pencil_height_ratio(const ProjPoint& p) {
  const Real base = std::max(std::abs(p.x()), std::abs(p.z()));
  if (base == 0) return std::numeric_limits<Real>::infinity();
  return std::abs(p.y()) / base;
}

struct EscapeClass {
  bool escaped = false;
  int iterations = 0;  // first iterate above the escape radius; 0 when bounded

  static EscapeClass bounded() { return {false, 0}; }
  static EscapeClass escaped_at(int n) { return {true, n}; }
  bool operator==(const EscapeClass&) const = default;
};

inline EscapeClass classify_point(const DesbovesMap& f, ProjPoint p, Real escape_radius = kDefaultEscapeRadius,
                                  int max_iter = kDefaultMaxIter) {
  if (f.is_degenerate()) throw DegenerateLambda();
  if (!(escape_radius > 1)) throw InvalidArgument("escape radius must exceed 1");
  for (int n = 0;; ++n) {
    if (pencil_height_ratio(p) > escape_radius) return EscapeClass::escaped_at(n);
    if (n == max_iter) return EscapeClass::bounded();
    p = f.eval(p);
  }
}

enum class SliceAxis { U, V };

/// A complex affine line in a chart, rasterised over a rectangle of the
/// varying coordinate. The other affine coordinate is held at its centre value.
struct SliceSpec {
  Chart chart = Chart::Z;
  Complex center_u{};
  Complex center_v{};
  SliceAxis axis = SliceAxis::V;
  Real half_width_re = 2.0;
  Real half_width_im = 2.0;
  int resolution = 256;

  /// The invariant line X in t = y/z.
  static SliceSpec line_X(Complex center = 0, Real half_width = 2.0, int resolution = 256) {
    return {Chart::Z, 0.0, center, SliceAxis::V, half_width, half_width, resolution};
  }
  /// The invariant line Y in w = x/z.
  static SliceSpec line_Y(Complex center = 0, Real half_width = 2.0, int resolution = 256) {
    return {Chart::Z, center, 0.0, SliceAxis::U, half_width, half_width, resolution};
  }
  /// The invariant line Z in s = y/x.
  static SliceSpec line_Z(Complex center = 0, Real half_width = 2.0, int resolution = 256) {
    return {Chart::X, center, 0.0, SliceAxis::U, half_width, half_width, resolution};
  }
  /// The line of the pencil through rho_0 and [w:0:1], in t = y/z.
  static SliceSpec pencil_line(Complex w, Complex center = 0, Real half_width = 2.0, int resolution = 256) {
    return {Chart::Z, w, center, SliceAxis::V, half_width, half_width, resolution};
  }

  void validate() const {
    if (resolution < 2) throw InvalidArgument("resolution must be at least 2");
    if (!(half_width_re > 0) || !(half_width_im > 0)) throw InvalidArgument("half-widths must be positive");
  }

  Real pixel_width() const { return 2.0 * half_width_re / resolution; }
  Real pixel_height() const { return 2.0 * half_width_im / resolution; }

  /// Value of the varying coordinate at the centre of pixel (col, row); row 0
  /// is the top (largest imaginary part).
  Complex pixel_coordinate(int col, int row) const {
    const Complex c = axis == SliceAxis::U ? center_u : center_v;
    return c + Complex(-half_width_re + (col + 0.5) * pixel_width(), half_width_im - (row + 0.5) * pixel_height());
  }

  ProjPoint pixel_point(int col, int row) const {
    const Complex s = pixel_coordinate(col, row);
    return axis == SliceAxis::U ? from_chart({chart, s, center_v}) : from_chart({chart, center_u, s});
  }
};

struct Raster {
  SliceSpec slice;
  Complex lambda{};
  Real escape_radius = kDefaultEscapeRadius;
  int max_iter = kDefaultMaxIter;
  std::vector<EscapeClass> pixels;  // row-major, resolution^2

  const EscapeClass& at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * slice.resolution + col]; }
  std::size_t bounded_count() const {
    return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](const auto& p) { return !p.escaped; }));
  }
};

inline Raster render_slice(const DesbovesMap& f, const SliceSpec& slice, Real escape_radius = kDefaultEscapeRadius,
                           int max_iter = kDefaultMaxIter, unsigned threads = 1) {
  slice.validate();
  Raster r{slice, f.lambda(), escape_radius, max_iter, {}};
  const int n = slice.resolution;
  r.pixels.assign(static_cast<std::size_t>(n) * n, EscapeClass::bounded());
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
    for (int col = 0; col < n; ++col)
      r.pixels[row * n + col] = classify_point(f, slice.pixel_point(col, static_cast<int>(row)), escape_radius, max_iter);
  });
  return r;
}

/// Centres of bounded pixels with an escaped 4-neighbour.
/// Pixels Bounded in `a` that escape in `b` (same slice, larger iteration
/// budget): how much of the Bounded set is an artefact of N_max.
inline std::size_t escape_flips(const Raster& a, const Raster& b) {
  if (a.pixels.size() != b.pixels.size()) throw InvalidArgument("rasters differ in size");
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) n += !a.pixels[i].escaped && b.pixels[i].escaped;
  return n;
}

inline PointCloud raster_boundary(const Raster& r) {
  const int n = r.slice.resolution;
  std::vector<ProjPoint> pts;
  for (int row = 0; row < n; ++row)
    for (int col = 0; col < n; ++col) {
      if (r.at(col, row).escaped) continue;
      const bool edge = (col > 0 && r.at(col - 1, row).escaped) || (col + 1 < n && r.at(col + 1, row).escaped) ||
                        (row > 0 && r.at(col, row - 1).escaped) || (row + 1 < n && r.at(col, row + 1).escaped);
      if (edge) pts.push_back(r.slice.pixel_point(col, row));
    }
  PointCloud c = PointCloud::uniform(std::move(pts));
  c.provenance = Provenance::RasterBoundary;
  c.lambda = r.lambda;
  return c;
}

/// Equilibrium samples are Julia samples: supp(mu) is the Julia set here.
inline PointCloud julia_cloud(const DesbovesMap& f, std::size_t n_points, int depth, std::uint64_t seed,
                              unsigned threads = 1) {
  PointCloud c = sample_equilibrium(f, n_points, depth, seed, threads);
  c.provenance = Provenance::BackwardOrbit;
  return c;
}

/// Clouds for several parameters whose walks follow the same inverse
/// branches (coupled_backward_orbits); the first is julia_cloud(lambdas[0]).
/// Each cloud is an equilibrium sample for its own parameter, but the clouds
/// are matched point by point, so their differences reflect the motion of
/// the Julia set rather than independent sampling noise.
inline std::vector<PointCloud> matched_julia_clouds(const std::vector<Complex>& lambdas, std::size_t n_points,
                                                    int depth, std::uint64_t seed, unsigned threads = 1) {
  std::vector<DesbovesMap> maps;
  for (const auto& l : lambdas) maps.emplace_back(l);
  std::vector<std::vector<ProjPoint>> pts(maps.size(), std::vector<ProjPoint>(n_points, rho0()));
  parallel_for(n_points, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, {i});
    const ProjPoint start = random_fermat_point(rng);
    const auto ends = coupled_backward_orbits(maps, start, depth, rng);
    for (std::size_t k = 0; k < maps.size(); ++k) pts[k][i] = ends[k];
  });
  std::vector<PointCloud> out;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    PointCloud c = PointCloud::uniform(std::move(pts[k]));
    c.seed = seed;
    c.depth = depth;
    c.lambda = lambdas[k];
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distance between finite clouds in the chordal metric.
// ---------------------------------------------------------------------------

inline Real nearest_distance(const PointCloud& cloud, const ProjPoint& p) {
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& q : cloud.points) best = std::min(best, chordal_distance(p, q));
  return best;
}

/// max over a in A of min over b in B, all pairs.
inline Real directed_hausdorff_exact(const PointCloud& A, const PointCloud& B) {
  if (A.points.empty() || B.points.empty()) throw InvalidArgument("Hausdorff distance of an empty cloud");
  Real h = 0;
  for (const auto& a : A.points) {
    Real best = std::numeric_limits<Real>::infinity();
    for (const auto& b : B.points) {
      best = std::min(best, chordal_distance(a, b));
      if (best <= h) break;  // cannot raise the maximum
    }
    h = std::max(h, best);
  }
  return h;
}

/// Uniform 3D grid over three coordinates of the Hermitian-projector
/// embedding p -> u u^* (u a unit lift). That embedding is isometric up to a
/// factor sqrt(2), so each grid coordinate differs by at most
/// sqrt(2) * chordal distance, which gives exact pruning bounds.
class ChordalGrid {
 public:
  explicit ChordalGrid(const PointCloud& cloud) : cloud_(&cloud) {
    const std::size_t n = cloud.size();
    keys_.resize(n);
    for (std::size_t i = 0; i < n; ++i) keys_[i] = embed(cloud.points[i]);
    lo_.fill(std::numeric_limits<Real>::infinity());
    std::array<Real, 3> hi;
    hi.fill(-std::numeric_limits<Real>::infinity());
    for (const auto& k : keys_)
      for (int d = 0; d < 3; ++d) {
        lo_[d] = std::min(lo_[d], k[d]);
        hi[d] = std::max(hi[d], k[d]);
      }
    Real extent = 0;
    for (int d = 0; d < 3; ++d) extent = std::max(extent, hi[d] - lo_[d]);
    const int per_axis = std::max(1, static_cast<int>(std::cbrt(Real(n) / 2.0)));
    cell_ = std::max(extent / per_axis, 1e-12);
    for (int d = 0; d < 3; ++d) dims_[d] = std::max(1, static_cast<int>((hi[d] - lo_[d]) / cell_) + 1);
    const std::size_t cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    start_.assign(cells + 1, 0);
    std::vector<std::size_t> cell_of(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = cell_index(keys_[i]);
      cell_of[i] = flat(c);
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
    items_.resize(n);
    auto fill = start_;
    for (std::size_t i = 0; i < n; ++i) items_[fill[cell_of[i]]++] = i;
  }

  /// Distance from p to the nearest cloud point. Search stops early once the
  /// answer is known to be below `stop_below`; the return value is then some
  /// distance < stop_below rather than the minimum.
  Real nearest(const ProjPoint& p, Real stop_below = -1) const {
    const auto key = embed(p);
    std::array<int, 3> q;
    for (int d = 0; d < 3; ++d) q[d] = static_cast<int>(std::floor((key[d] - lo_[d]) / cell_));
    int kmax = 0;
    for (int d = 0; d < 3; ++d) kmax = std::max({kmax, std::abs(q[d]), std::abs(dims_[d] - 1 - q[d])});
    Real best = std::numeric_limits<Real>::infinity();
    const Real inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k <= kmax; ++k) {
      if (k >= 1 && (k - 1) * cell_ * inv_sqrt2 >= best) break;
      for (int i = std::max(0, q[0] - k); i <= std::min(dims_[0] - 1, q[0] + k); ++i)
        for (int j = std::max(0, q[1] - k); j <= std::min(dims_[1] - 1, q[1] + k); ++j)
          for (int l = std::max(0, q[2] - k); l <= std::min(dims_[2] - 1, q[2] + k); ++l) {
            if (std::max({std::abs(i - q[0]), std::abs(j - q[1]), std::abs(l - q[2])}) != k) continue;
            const std::size_t c = flat({i, j, l});
            for (std::size_t s = start_[c]; s < start_[c + 1]; ++s)
              best = std::min(best, chordal_distance(p, cloud_->points[items_[s]]));
          }
      if (best < stop_below) return best;
    }
    return best;
  }

 private:
  static std::array<Real, 3> embed(const ProjPoint& p) {
    const Triple u = p.unit_lift();
    return {std::norm(u[0]), std::norm(u[2]), std::sqrt(2.0) * std::real(u[0] * std::conj(u[2]))};
  }
  std::array<int, 3> cell_index(const std::array<Real, 3>& k) const {
    std::array<int, 3> c;
    for (int d = 0; d < 3; ++d) c[d] = std::clamp(static_cast<int>(std::floor((k[d] - lo_[d]) / cell_)), 0, dims_[d] - 1);
    return c;
  }
  std::size_t flat(const std::array<int, 3>& c) const {
    return (static_cast<std::size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
  }

  const PointCloud* cloud_;
  std::vector<std::array<Real, 3>> keys_;
  std::array<Real, 3> lo_{};
  std::array<int, 3> dims_{};
  Real cell_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

inline Real directed_hausdorff_binned(const PointCloud& A, const PointCloud& B) {
  if (A.points.empty() || B.points.empty()) throw InvalidArgument("Hausdorff distance of an empty cloud");
  const ChordalGrid grid(B);
  Real h = 0;
  for (const auto& a : A.points) h = std::max(h, grid.nearest(a, h));
  return h;
}

inline Real hausdorff_exact(const PointCloud& A, const PointCloud& B) {
  return std::max(directed_hausdorff_exact(A, B), directed_hausdorff_exact(B, A));
}

inline Real hausdorff_binned(const PointCloud& A, const PointCloud& B) {
  return std::max(directed_hausdorff_binned(A, B), directed_hausdorff_binned(B, A));
}

inline constexpr std::size_t kExactHausdorffLimit = 10000;

/// Symmetric chordal Hausdorff distance: all pairs below 10^4 points, grid
/// search above. Both paths return the same value.
inline Real hausdorff_distance(const PointCloud& A, const PointCloud& B) {
  if (std::max(A.size(), B.size()) < kExactHausdorffLimit) return hausdorff_exact(A, B);
  return hausdorff_binned(A, B);
}

struct ContinuityReport {
  Complex lambda0{};
  std::vector<Real> deltas;
  std::vector<Real> distances;  // d_H(J(lambda0), J(lambda0 + delta)), matched clouds
  Real noise_floor = 0;         // d_H between independent clouds at lambda0

  /// Non-increasing as delta shrinks, up to twice the noise floor.
  bool monotone() const {
    for (std::size_t k = 1; k < distances.size(); ++k)
      if (distances[k] > distances[k - 1] + 2.0 * noise_floor) return false;
    return true;
  }
};

/// Hausdorff distances along a ladder of real offsets (listed from large to
/// small). The noise floor compares the seed's cloud at lambda0 with an
/// independent one drawn from a derived seed.
inline ContinuityReport continuity_ladder(Complex lambda0, const std::vector<Real>& deltas, std::size_t n_points,
                                          int depth, std::uint64_t seed, unsigned threads = 1) {
  ContinuityReport r;
  r.lambda0 = lambda0;
  r.deltas = deltas;
  std::vector<Complex> lambdas{lambda0};
  for (Real d : deltas) lambdas.push_back(lambda0 + d);
  const auto clouds = matched_julia_clouds(lambdas, n_points, depth, seed, threads);
  for (std::size_t k = 1; k < clouds.size(); ++k) r.distances.push_back(hausdorff_distance(clouds[0], clouds[k]));
  const DesbovesMap f0(lambda0);
  const PointCloud other = julia_cloud(f0, n_points, depth, derive_seed(seed, {1}), threads);
  r.noise_floor = hausdorff_distance(clouds[0], other);
  return r;
}

}  // namespace desboves
