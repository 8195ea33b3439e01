#include <gtest/gtest.h>

#include "support.hpp"

using namespace desboves;
using namespace testing_support;

TEST(Classify, Examples) {
  const DesbovesMap f(Complex(0.8, -1.2));
  EXPECT_EQ(classify_point(f, rho0()), EscapeClass::escaped_at(0));
  EXPECT_EQ(classify_point(f, ProjPoint::normalize(1.0, 0.0, -1.0)), EscapeClass::bounded());
  EXPECT_THROW(classify_point(f, x0(), 1.0), InvalidArgument);
  EXPECT_THROW(classify_point(DesbovesMap::degenerate(), x0()), DegenerateLambda);
}

TEST(Classify, LineYIsBounded) {
  Rng rng = make_rng(12, {1});
  const DesbovesMap f(random_lambda(rng));
  for (int a = 0; a < 40; ++a)
    for (int b = 0; b < 40; ++b) {
      const Complex w(-3 + 6.0 * a / 39, -3 + 6.0 * b / 39);
      ASSERT_FALSE(classify_point(f, point_on_Y(ExtComplex::finite(w))).escaped) << w;
    }
}

TEST(Classify, EscapeRegionIsForwardInvariant) {
  Rng rng = make_rng(12, {2});
  std::uniform_real_distribution<Real> u(0, 1);
  for (int k = 0; k < 10000; ++k) {
    const DesbovesMap f(random_lambda(rng));
    // Ratio above 10^3: y = 1, |x|, |z| < 10^-3.
    const Real r = 1e-3 * u(rng);
    const ProjPoint p = ProjPoint::normalize(std::polar(r, 2 * kPi * u(rng)), 1.0,
                                             std::polar(1e-3 * u(rng), 2 * kPi * u(rng)));
    if (!(pencil_height_ratio(p) > kDefaultEscapeRadius)) continue;
    ASSERT_GT(pencil_height_ratio(f(p)), pencil_height_ratio(p));
  }
}

TEST(Render, XSliceHasBothClasses) {
  const Raster r = render_slice(DesbovesMap(0.5), SliceSpec::line_X(0, 2.0, 64));
  EXPECT_GT(r.bounded_count(), 0u);
  EXPECT_LT(r.bounded_count(), r.pixels.size());
  EXPECT_FALSE(r.at(32, 32).escaped);  // t near 0: x0 and its neighbourhood
  EXPECT_TRUE(r.at(0, 0).escaped);     // large |t|
}

TEST(Render, YSliceAllBounded) {
  Rng rng = make_rng(12, {3});
  const Raster r = render_slice(DesbovesMap(random_lambda(rng)), SliceSpec::line_Y(0, 3.0, 64));
  EXPECT_EQ(r.bounded_count(), r.pixels.size());
}

TEST(Render, EscapeRadiusInsensitive) {
  const DesbovesMap f(Complex(1.5, 0.5));
  const SliceSpec s = SliceSpec::line_Z(0, 2.0, 128);
  const Raster a = render_slice(f, s, 1e6, 500);
  const Raster b = render_slice(f, s, 1e3, 500);
  int differ = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) differ += a.pixels[i].escaped != b.pixels[i].escaped;
  EXPECT_EQ(differ, 0);
}

TEST(Render, FlipsOnlyFromBoundedToEscaped) {
  const DesbovesMap f(0.5);
  const SliceSpec s = SliceSpec::line_X(0, 2.0, 48);
  const Raster a = render_slice(f, s, 1e3, 20);
  const Raster b = render_slice(f, s, 1e3, 40);
  std::size_t lost = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    if (a.pixels[i].escaped) ASSERT_EQ(a.pixels[i], b.pixels[i]);
    lost += !a.pixels[i].escaped && b.pixels[i].escaped;
  }
  EXPECT_EQ(escape_flips(a, b), lost);
  EXPECT_EQ(a.bounded_count() - b.bounded_count(), lost);
  EXPECT_EQ(escape_flips(a, a), 0u);
  EXPECT_THROW(escape_flips(a, render_slice(f, SliceSpec::line_X(0, 2.0, 8), 1e3, 20)), InvalidArgument);
}

TEST(Render, DeterministicAcrossThreadCounts) {
  const DesbovesMap f(2.0);
  const SliceSpec s = SliceSpec::line_X(Complex(0.1, 0.2), 1.5, 48);
  const Raster a = render_slice(f, s, 1e3, 200, 1);
  const Raster b = render_slice(f, s, 1e3, 200, 4);
  EXPECT_TRUE(a.pixels == b.pixels);
}

TEST(Render, RejectsBadSlices) {
  EXPECT_THROW(render_slice(DesbovesMap(2.0), SliceSpec::line_X(0, 2.0, 1)), InvalidArgument);
  EXPECT_THROW(render_slice(DesbovesMap(2.0), SliceSpec::line_X(0, -1.0, 16)), InvalidArgument);
}

TEST(Slice, PixelGeometry) {
  const SliceSpec s = SliceSpec::line_X(Complex(1, 1), 2.0, 5);
  EXPECT_LT(std::abs(s.pixel_coordinate(2, 2) - Complex(1, 1)), 1e-15);
  // Row 0 is the top (largest imaginary part).
  EXPECT_GT(s.pixel_coordinate(2, 0).imag(), s.pixel_coordinate(2, 4).imag());
  EXPECT_LT(s.pixel_coordinate(0, 2).real(), s.pixel_coordinate(4, 2).real());
  EXPECT_TRUE(on_line_X(s.pixel_point(3, 1)));
  EXPECT_TRUE(on_line_Y(SliceSpec::line_Y(0, 1, 4).pixel_point(1, 2)));
  EXPECT_TRUE(on_line_Z(SliceSpec::line_Z(0, 1, 4).pixel_point(1, 2)));
}

// Forward orbits of Julia points cannot be followed for long in double
// precision: rounding error grows at the Lyapunov rate and everything off J
// lies in the basin of rho0. The earliest escape seen over several parameters
// is iterate 19, so the check uses a budget of 15.
TEST(Cloud, PointsStayBoundedWithinShadowingHorizon) {
  for (Complex l : {Complex(2), Complex(3), Complex(0.5, 0.5)}) {
    const DesbovesMap f(l);
    for (const auto& p : julia_cloud(f, 2000, 20, 1, default_threads()).points)
      ASSERT_FALSE(classify_point(f, p, kDefaultEscapeRadius, 15).escaped) << l;
  }
}

// x0 is in the support, but the measure is thin there: mass within r of x0
// falls like r^3.5 (8e4 points: 993 within 0.4, 67 within 0.2, 9 within 0.1,
// none within 0.05), so at 10^4 points the nearest sample sits near 0.1.
TEST(Cloud, ApproachesRepellingFixedPoint) {
  const PointCloud c = julia_cloud(DesbovesMap(3.0), 10000, 20, 2, default_threads());
  EXPECT_LT(nearest_distance(c, x0()), 0.2);
  int within = 0;
  for (const auto& p : c.points) within += chordal_distance(p, x0()) < 0.4;
  EXPECT_GT(within, 50);
}

TEST(Cloud, MeetsBallsAroundFermatPoints) {
  const PointCloud c = julia_cloud(DesbovesMap(2.0), 10000, 20, 3, default_threads());
  const ChordalGrid g(c);
  Rng rng = make_rng(12, {4});
  for (int k = 0; k < 20; ++k) EXPECT_LT(g.nearest(random_fermat_point(rng)), 0.1);
}

TEST(Cloud, MatchedCloudsStartFromTheReferenceCloud) {
  const auto m = matched_julia_clouds({2.0, 2.1}, 300, 12, 8, 2);
  const PointCloud c = julia_cloud(DesbovesMap(2.0), 300, 12, 8, 1);
  for (std::size_t i = 0; i < c.size(); ++i) ASSERT_EQ(m[0].points[i].coords(), c.points[i].coords());
  // Matched points move little for a small parameter change.
  Real mean = 0;
  for (std::size_t i = 0; i < c.size(); ++i) mean += chordal_distance(m[0].points[i], m[1].points[i]);
  EXPECT_LT(mean / c.size(), 0.05);
}

namespace {

PointCloud random_cloud(Rng& rng, std::size_t n) {
  std::vector<ProjPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng));
  return PointCloud::uniform(std::move(pts));
}

// All pairs, no early exit: the oracle.
Real directed_brute(const PointCloud& a, const PointCloud& b) {
  Real h = 0;
  for (const auto& p : a.points) {
    Real d = 1;
    for (const auto& q : b.points) d = std::min(d, chordal_distance(p, q));
    h = std::max(h, d);
  }
  return h;
}

}  // namespace

TEST(Hausdorff, Examples) {
  Rng rng = make_rng(12, {5});
  const PointCloud a = random_cloud(rng, 300);
  EXPECT_EQ(hausdorff_distance(a, a), 0.0);
  PointCloud b = a;
  for (const auto& p : random_cloud(rng, 100).points) b.points.push_back(p);
  EXPECT_EQ(directed_hausdorff_exact(a, b), 0.0);
  EXPECT_EQ(directed_hausdorff_binned(a, b), 0.0);
  EXPECT_GT(directed_hausdorff_exact(b, a), 0.0);
}

TEST(Hausdorff, BinnedMatchesBruteForce) {
  Rng rng = make_rng(12, {6});
  const PointCloud a = random_cloud(rng, 2000);
  const PointCloud b = random_cloud(rng, 2000);
  const Real oracle = std::max(directed_brute(a, b), directed_brute(b, a));
  EXPECT_NEAR(hausdorff_binned(a, b), oracle, 1e-12);
  EXPECT_NEAR(hausdorff_exact(a, b), oracle, 1e-12);
  // Clustered clouds stress the grid differently.
  const PointCloud c = julia_cloud(DesbovesMap(2.0), 2000, 15, 1);
  const PointCloud d = julia_cloud(DesbovesMap(2.0), 2000, 15, 2);
  EXPECT_NEAR(hausdorff_binned(c, d), std::max(directed_brute(c, d), directed_brute(d, c)), 1e-12);
}

TEST(Hausdorff, NearestQueriesMatchLinearScan) {
  Rng rng = make_rng(12, {7});
  const PointCloud a = julia_cloud(DesbovesMap(Complex(0.5, 0.5)), 3000, 15, 4);
  const ChordalGrid g(a);
  for (int k = 0; k < 500; ++k) {
    const ProjPoint p = random_point(rng);
    ASSERT_NEAR(g.nearest(p), nearest_distance(a, p), 1e-12);
  }
}

TEST(Continuity, LadderReport) {
  const auto r = continuity_ladder(2.0, {0.2, 0.05}, 1500, 15, 3, default_threads());
  ASSERT_EQ(r.distances.size(), 2u);
  EXPECT_GT(r.noise_floor, 0);
  EXPECT_LT(r.distances[1], r.distances[0]);
}
