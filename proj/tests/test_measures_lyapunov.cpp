#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace desboves;
using namespace testing_support;

namespace {

const Real kLog4 = std::log(4.0);

// Shared clouds: 10^4 points are a few seconds each on one core.
const PointCloud& cloud_at(Complex l, std::uint64_t seed, std::size_t n = 10000, int depth = 20) {
  static std::map<std::tuple<Real, Real, std::uint64_t, std::size_t, int>, PointCloud> cache;
  auto key = std::make_tuple(l.real(), l.imag(), seed, n, depth);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, julia_cloud(DesbovesMap(l), n, depth, seed, default_threads())).first;
  return it->second;
}

Real median_nearest(const PointCloud& a, const PointCloud& b) {
  const ChordalGrid g(b);
  std::vector<Real> d;
  for (const auto& p : a.points) d.push_back(g.nearest(p));
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

}  // namespace

TEST(Sampling, DeterministicAndThreadIndependent) {
  const DesbovesMap f(Complex(1.2, -0.7));
  const PointCloud a = sample_equilibrium(f, 500, 15, 42, 1);
  const PointCloud b = sample_equilibrium(f, 500, 15, 42, 3);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a.points[i].coords(), b.points[i].coords());
  const PointCloud c = sample_equilibrium(f, 500, 15, 43, 1);
  EXPECT_NE(a.points[0].coords(), c.points[0].coords());
}

TEST(Sampling, WeightsAndAvoidanceOfRho0) {
  const PointCloud& c = cloud_at(2.0, 1);
  Real w = 0, d = 1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    w += c.weights[i];
    d = std::min(d, chordal_distance(c.points[i], rho0()));
  }
  EXPECT_NEAR(w, 1.0, 1e-12);
  EXPECT_GT(d, 1e-6);
  EXPECT_EQ(c.provenance, Provenance::BackwardOrbit);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.depth, 20);
}

TEST(Sampling, RejectsDegenerateParameter) {
  EXPECT_THROW(sample_equilibrium(DesbovesMap::degenerate(), 10, 5, 1), DegenerateLambda);
}

TEST(Sampling, PointsNearFermatCurveExist) {
  const PointCloud& c = cloud_at(2.0, 1);
  int near = 0;
  for (const auto& p : c.points) near += on_fermat(p, 1e-3);
  EXPECT_GT(near, 0);
}

// Two independent 10^4-point clouds, and a cloud and its image, are compared
// by median nearest-neighbour distance. Their full Hausdorff distance is
// about 0.3: in real dimension four, 10^4 samples leave gaps of that size in
// the sparse tails of the measure.
TEST(Sampling, SeedStability) {
  const PointCloud& a = cloud_at(2.0, 1);
  const PointCloud& b = cloud_at(2.0, 2);
  EXPECT_LT(median_nearest(a, b), 0.05);
  EXPECT_LT(median_nearest(b, a), 0.05);
  RecordProperty("hausdorff", std::to_string(hausdorff_distance(a, b)));
}

TEST(Sampling, ImageCloudMatchesCloud) {
  const DesbovesMap f(2.0);
  const PointCloud& a = cloud_at(2.0, 1);
  PointCloud fa = a;
  for (auto& p : fa.points) p = f(p);
  EXPECT_LT(median_nearest(a, fa), 0.05);
  EXPECT_LT(median_nearest(fa, a), 0.05);
}

TEST(LogJacobian, CriticalPointsGiveMinusInfinity) {
  const Complex l = 2.0;
  const Complex w = std::pow((1.0 + 5.0 * l) / (1.0 - l), 1.0 / 3.0);
  const DesbovesMap f(l);
  EXPECT_EQ(fs_log_jacobian(f, ProjPoint::normalize(w, 1.0, 1.0)), -std::numeric_limits<Real>::infinity());
  EXPECT_EQ(fs_log_jacobian(f, ProjPoint::normalize(1.0, 0.4, 1.0)), -std::numeric_limits<Real>::infinity());
}

TEST(LogJacobian, ChartIndependent) {
  Rng rng = make_rng(11, {1});
  for (int k = 0; k < 100; ++k) {
    const DesbovesMap f(random_lambda(rng));
    const ProjPoint p = random_point(rng);
    const ProjPoint q = f(p);
    const Real ref = fs_log_jacobian(f, p);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        if (std::abs(p[a]) < 1e-3 || std::abs(q[b]) < 1e-3) continue;
        ASSERT_NEAR(fs_log_jacobian(f, p, static_cast<Chart>(a), static_cast<Chart>(b)), ref, 1e-9);
      }
    // Homogeneous formula, no charts at all.
    ASSERT_NEAR(fs_log_jacobian_lift(f, p), ref, 1e-9);
  }
}

TEST(LogJacobian, AtFixedPointIsLogOfMultiplierProduct) {
  const DesbovesMap f(Complex(0.3, 1.1));
  for (const auto& p : {ProjPoint::normalize(1.0, 0.0, -1.0), x0(), z0()}) {
    const auto e = eigenvalues(f.multiplier_matrix(p));
    EXPECT_NEAR(fs_log_jacobian(f, p), std::log(std::abs(e[0]) * std::abs(e[1])), 1e-12);
  }
}

TEST(BatchMeans, KnownValues) {
  std::vector<Real> v(160), w(160, 1.0 / 160);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Real(i / 10);  // batch b holds value b
  const auto e = batch_mean_estimate(v, w);
  EXPECT_NEAR(e.value, 7.5, 1e-12);
  for (int b = 0; b < kBatches; ++b) EXPECT_NEAR(e.batch_means[b], b, 1e-12);
  // sd of 0..15 over sqrt(16).
  EXPECT_NEAR(e.std_error, std::sqrt(16.0 * 17.0 / 12.0) / 4.0, 1e-12);
  v[3] = -std::numeric_limits<Real>::infinity();
  v[4] = -std::numeric_limits<Real>::infinity();
  const auto f = batch_mean_estimate(v, w);
  EXPECT_EQ(f.discarded, 2u);
  EXPECT_TRUE(f.flagged);
}

TEST(Lyapunov, AboveTheFloor) {
  for (Complex l : {Complex(2), Complex(0.5, 0.5), Complex(-3, 1), Complex(0.2)}) {
    const auto e = lyapunov_L(DesbovesMap(l), julia_cloud(DesbovesMap(l), 4000, 20, 5, default_threads()));
    EXPECT_GE(e.value, kLog4 - 3 * e.std_error) << l;
    EXPECT_FALSE(e.flagged);
  }
}

TEST(Lyapunov, StandardErrorScaling) {
  const DesbovesMap f(2.0);
  const auto a = lyapunov_L(f, cloud_at(2.0, 7, 4000));
  const auto b = lyapunov_L(f, cloud_at(2.0, 7, 8000));
  const Real ratio = a.std_error / b.std_error;
  EXPECT_GT(ratio, std::sqrt(2.0) / 2);
  EXPECT_LT(ratio, 2 * std::sqrt(2.0));
}

TEST(Lyapunov, SymmetricUnderNegation) {
  const Complex l(1.5, 0.8);
  const auto a = lyapunov_L(DesbovesMap(l), cloud_at(l, 3, 8000));
  const auto b = lyapunov_L(DesbovesMap(-l), cloud_at(-l, 4, 8000));
  EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.std_error, b.std_error));
}

TEST(Lyapunov, DepthStable) {
  const auto a = lyapunov_L(DesbovesMap(2.0), cloud_at(2.0, 1));
  const auto b = lyapunov_L(DesbovesMap(2.0), cloud_at(2.0, 9, 10000, 30));
  EXPECT_LT(std::abs(a.value - b.value), 3 * std::hypot(a.std_error, b.std_error));
}

TEST(Lyapunov, FibreAverageHasTheSameMean) {
  // One step of the transfer operator leaves the mean unchanged.
  const DesbovesMap f(2.0);
  const PointCloud& c = cloud_at(2.0, 1);
  std::vector<Real> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = fiber_average_log_jacobian(f, c.points[i]);
  const auto avg = batch_mean_estimate(v, c.weights);
  const auto direct = lyapunov_L(f, c);
  EXPECT_LT(std::abs(avg.value - direct.value), 3 * std::hypot(avg.std_error, direct.std_error));
  EXPECT_LT(avg.std_error, direct.std_error);
}

TEST(Periodic, Examples) {
  const auto r = is_repelling_periodic(DesbovesMap(Complex(0.4, 0.9)), ProjPoint::normalize(1.0, 0.0, -1.0), 1);
  EXPECT_TRUE(r.repelling);
  const auto& e = r.info.eigenvalues;
  EXPECT_TRUE(std::abs(std::abs(e[0]) - 2) < 1e-9 || std::abs(std::abs(e[1]) - 2) < 1e-9);

  const auto x = is_repelling_periodic(DesbovesMap(3.0), x0(), 1);
  EXPECT_TRUE(x.repelling);
  EXPECT_TRUE(std::abs(x.info.eigenvalues[0] - 4.0) < 1e-9 || std::abs(x.info.eigenvalues[1] - 4.0) < 1e-9);

  EXPECT_FALSE(is_repelling_periodic(DesbovesMap(3.0), rho0(), 1).repelling);
}

TEST(Periodic, RefinesAPerturbedSeed) {
  const ProjPoint seed = ProjPoint::normalize(1.0, 1e-4, Complex(-1, 1e-4));
  const auto r = is_repelling_periodic(DesbovesMap(2.0), seed, 1);
  EXPECT_LT(chordal_distance(r.info.location, ProjPoint::normalize(1.0, 0.0, -1.0)), 1e-10);
}

TEST(Periodic, PeriodTwoOnY) {
  // Refine seeds on a circle in Y towards genuine 2-cycles of g.
  const DesbovesMap f(3.0);
  int found = 0;
  for (int a = 0; a < 12 && !found; ++a) {
    const ProjPoint seed = point_on_Y(ExtComplex::finite(std::polar(0.7, 2 * kPi * a / 12)));
    try {
      const auto r = is_repelling_periodic(f, seed, 2);
      if (chordal_distance(f(r.info.location), r.info.location) > 1e-6) {
        ++found;
        EXPECT_LT(r.residual, 1e-10);
      }
    } catch (const NotPeriodic&) {
    }
  }
  EXPECT_GT(found, 0);
  EXPECT_THROW(is_repelling_periodic(f, x0(), 0), InvalidArgument);
}
