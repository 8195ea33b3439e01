#pragma once

// Equilibrium-measure sampling by random inverse branches, the intrinsic
// (Fubini-Study) log-Jacobian, the Lyapunov function L(lambda) and
// verification of repelling periodic points.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "desboves/desboves_map.hpp"
#include "desboves/critical_locus.hpp"
#include "desboves/parallel.hpp"
#include "desboves/preimage.hpp"
#include "desboves/rng.hpp"

namespace desboves {

enum class Provenance { BackwardOrbit, RasterBoundary };

inline const char* to_string(Provenance p) {
  return p == Provenance::BackwardOrbit ? "backward-orbit" : "raster-boundary";
}

/// Weighted finite sample of P^2.
struct PointCloud {
  std::vector<ProjPoint> points;
  std::vector<Real> weights;  // nonnegative, summing to 1
  Provenance provenance = Provenance::BackwardOrbit;
  std::uint64_t seed = 0;
  int depth = 0;
  Complex lambda{};

  std::size_t size() const { return points.size(); }

  static PointCloud uniform(std::vector<ProjPoint> pts) {
    PointCloud c;
    c.weights.assign(pts.size(), pts.empty() ? 0.0 : 1.0 / Real(pts.size()));
    c.points = std::move(pts);
    return c;
  }
};

/// A point of the Fermat curve x^3 + y^3 + z^3 = 0 with random (x, y).
template <class R>
ProjPoint random_fermat_point(R& rng) {
  std::normal_distribution<Real> g(0.0, 1.0);
  const Complex x(g(rng), g(rng));
  const Complex y(g(rng), g(rng));
  std::uniform_int_distribution<int> pick(0, 2);
  const Complex z = std::pow(-(x * x * x + y * y * y), 1.0 / 3.0) * omega(pick(rng));
  return ProjPoint::normalize(x, y, z);
}

/// n_points independent inverse-branch walks of length `depth`, each started
/// at a random point of the Fermat curve (which lies in the Julia set). Walk i
/// draws from make_rng(seed, {i}), so the result does not depend on the
/// thread count and equal seeds at different lambda share random numbers.
inline PointCloud sample_equilibrium(const DesbovesMap& f, std::size_t n_points, int depth, std::uint64_t seed,
                                     unsigned threads = 1) {
  if (f.is_degenerate()) throw DegenerateLambda();
  std::vector<ProjPoint> pts(n_points, rho0());
  parallel_for(n_points, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, {i});
    const ProjPoint start = random_fermat_point(rng);
    pts[i] = backward_orbit_sample(f, start, depth, rng);
  });
  PointCloud cloud = PointCloud::uniform(std::move(pts));
  cloud.seed = seed;
  cloud.depth = depth;
  cloud.lambda = f.lambda();
  return cloud;
}

namespace detail {

inline Real affine_norm2(const ProjPoint& p, Chart c) {
  const ChartCoord a = to_chart(p, c);
  return 1.0 + std::norm(a.u) + std::norm(a.v);
}

inline bool near_critical(Complex lambda, const ProjPoint& p, Real tol = 1e-14) {
  const Real n = p.norm();
  const Real n3 = n * n * n;
  const Complex x3 = p.x() * p.x() * p.x();
  const Complex z3 = p.z() * p.z() * p.z();
  return std::abs(x3 - z3) < tol * 2.0 * n3 ||
         std::abs(critical_cubic(lambda, p.coords())) < tol * (2.0 + 6.0 * std::abs(lambda)) * n3;
}

}  // namespace detail

/// log of the Jacobian of f with respect to the Fubini-Study volume, per
/// complex dimension:
///   log|det Df| + (3/2) log((1 + |a|^2) / (1 + |f(a)|^2))
/// with a, f(a) affine coordinates in the given charts. The metric factors
/// make the value chart independent. Returns -infinity on the critical set.
inline Real fs_log_jacobian(const DesbovesMap& f, const ProjPoint& p, Chart in, Chart out) {
  if (detail::near_critical(f.lambda(), p)) return -std::numeric_limits<Real>::infinity();
  const ProjPoint q = f.eval(p);
  const Complex d = det(f.differential(p, in, out));
  if (d == Complex(0)) return -std::numeric_limits<Real>::infinity();
  return std::log(std::abs(d)) + 1.5 * std::log(detail::affine_norm2(p, in) / detail::affine_norm2(q, out));
}

inline Real fs_log_jacobian(const DesbovesMap& f, const ProjPoint& p) {
  const ProjPoint q = f.eval(p);
  return fs_log_jacobian(f, p, static_cast<Chart>(p.pivot()), static_cast<Chart>(q.pivot()));
}

/// The same quantity from homogeneous data:
///   log|jac F(P)| + 3 log|P| - 3 log|F(P)| - log 4.
inline Real fs_log_jacobian_lift(const DesbovesMap& f, const ProjPoint& p) {
  const Triple P = p.coords();
  const Triple Q = f.lift(P);
  const Real nq = std::sqrt(std::norm(Q[0]) + std::norm(Q[1]) + std::norm(Q[2]));
  return std::log(std::abs(f.jacobian_det(P))) + 3.0 * std::log(p.norm()) - 3.0 * std::log(nq) -
         std::log(Real(kDegree));
}

/// Mean of fs_log_jacobian over the 16 preimages of p (with multiplicity):
/// the transfer operator applied to the log-Jacobian. Averaging the final
/// step of a walk this way is its exact conditional expectation.
inline Real fiber_average_log_jacobian(const DesbovesMap& f, const ProjPoint& p) {
  const PreimageSet set = fiber_preimages(f, p);
  Real acc = 0;
  int m = 0;
  for (const auto& b : set.branches) {
    acc += b.multiplicity * fs_log_jacobian(f, b.point);
    m += b.multiplicity;
  }
  return acc / m;
}

inline constexpr int kBatches = 16;

struct LyapunovEstimate {
  Complex lambda{};
  Real value = 0;      // nats per iterate, sum of both exponents
  Real std_error = 0;  // batch-means standard error
  std::size_t samples = 0;
  std::size_t discarded = 0;  // samples on the critical set
  bool flagged = false;       // more than 1% discarded
  std::array<Real, kBatches> batch_means{};
};

/// Mean and batch-means standard error of per-sample values (non-finite
/// values are skipped and counted). Batches are contiguous index blocks.
inline LyapunovEstimate batch_mean_estimate(const std::vector<Real>& values, const std::vector<Real>& weights) {
  LyapunovEstimate est;
  const std::size_t n = values.size();
  est.samples = n;
  Real total_w = 0, total = 0;
  std::array<Real, kBatches> bw{}, bs{};
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      ++est.discarded;
      continue;
    }
    const std::size_t b = i * kBatches / n;
    bw[b] += weights[i];
    bs[b] += weights[i] * values[i];
    total_w += weights[i];
    total += weights[i] * values[i];
  }
  est.value = total_w > 0 ? total / total_w : std::numeric_limits<Real>::quiet_NaN();
  Real mean_of_batches = 0;
  int used = 0;
  for (int b = 0; b < kBatches; ++b) {
    est.batch_means[b] = bw[b] > 0 ? bs[b] / bw[b] : est.value;
    if (bw[b] > 0) {
      mean_of_batches += est.batch_means[b];
      ++used;
    }
  }
  if (used > 1) {
    mean_of_batches /= used;
    Real ss = 0;
    for (int b = 0; b < kBatches; ++b)
      if (bw[b] > 0) ss += (est.batch_means[b] - mean_of_batches) * (est.batch_means[b] - mean_of_batches);
    est.std_error = std::sqrt(ss / (used - 1) / used);
  }
  est.flagged = n > 0 && est.discarded * 100 > n;
  return est;
}

/// L(lambda) as the cloud average of the one-step intrinsic log-Jacobian.
inline LyapunovEstimate lyapunov_L(const DesbovesMap& f, const PointCloud& cloud, unsigned threads = 1) {
  std::vector<Real> values(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t i) { values[i] = fs_log_jacobian(f, cloud.points[i]); });
  LyapunovEstimate est = batch_mean_estimate(values, cloud.weights);
  est.lambda = f.lambda();
  return est;
}

struct PeriodicVerdict {
  bool repelling = false;
  FixedPointInfo info;
  Real residual = 0;  // chordal distance between f^period(p) and p
};

namespace detail {

/// f^period(p) and the derivative of f^period from chart c at p to chart c
/// at the image (intermediate charts follow the pivots).
inline std::pair<ProjPoint, Mat2> iterate_with_derivative(const DesbovesMap& f, const ProjPoint& p, int period,
                                                          Chart c) {
  Mat2 D = identity2();
  ProjPoint r = p;
  Chart in = c;
  for (int s = 0; s < period; ++s) {
    const ProjPoint next = f.eval(r);
    const Chart out = (s == period - 1) ? c : static_cast<Chart>(next.pivot());
    D = f.differential(r, in, out) * D;
    r = next;
    in = out;
  }
  return {r, D};
}

}  // namespace detail

/// Refines p to a point of period `period` by Newton's method on f^n - id and
/// classifies it by the eigenvalues of D(f^n). Throws NotPeriodic if the
/// refinement does not reach `tol`.
inline PeriodicVerdict is_repelling_periodic(const DesbovesMap& f, ProjPoint p, int period, Real tol = 1e-10) {
  if (period < 1) throw InvalidArgument("period must be at least 1");
  const Chart c = static_cast<Chart>(p.pivot());
  Real residual = 1;
  Mat2 D{};
  for (int iter = 0; iter < 60; ++iter) {
    ProjPoint image = rho0();
    try {
      std::tie(image, D) = detail::iterate_with_derivative(f, p, period, c);
    } catch (const ChartOverflow&) {
      throw NotPeriodic("orbit left the chart of the seed");
    }
    residual = chordal_distance(image, p);
    if (residual < 1e-15) break;
    const ChartCoord a = to_chart(p, c);
    const ChartCoord ga = to_chart(image, c);
    Mat2 M = D;
    M[0][0] -= 1.0;
    M[1][1] -= 1.0;
    std::array<Complex, 2> step;
    if (!solve2(M, {ga.u - a.u, ga.v - a.v}, step)) break;
    const ProjPoint next = from_chart({c, a.u - step[0], a.v - step[1]});
    if (chordal_distance(next, p) < 1e-16) {
      p = next;
      break;
    }
    p = next;
  }
  auto [image, Dfinal] = detail::iterate_with_derivative(f, p, period, c);
  residual = chordal_distance(image, p);
  if (!(residual < tol)) throw NotPeriodic();
  PeriodicVerdict v;
  v.info.location = p;
  v.info.eigenvalues = eigenvalues(Dfinal);
  v.info.stability = classify_multipliers(v.info.eigenvalues);
  v.info.label = "period-" + std::to_string(period);
  v.repelling = v.info.stability == Stability::Repelling;
  v.residual = residual;
  return v;
}

}  // namespace desboves
