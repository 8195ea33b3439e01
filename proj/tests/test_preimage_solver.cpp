#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace desboves;
using namespace testing_support;

namespace {

// Elementary symmetric functions of the roots against the monic coefficients.
void expect_vieta(const std::array<Complex, 5>& c, const QuarticRoots& r) {
  const auto z = r.expanded();
  ASSERT_EQ(z.size(), 4u);
  std::array<Complex, 5> e{1.0, 0.0, 0.0, 0.0, 0.0};
  for (const auto& x : z)
    for (int k = 4; k >= 1; --k) e[k] += e[k - 1] * x;
  for (int k = 1; k <= 4; ++k) {
    const Complex want = (k % 2 ? -1.0 : 1.0) * c[k] / c[0];
    EXPECT_LT(std::abs(e[k] - want), 1e-8 * (1 + std::abs(want))) << "e" << k;
  }
}

int count_distinct(const std::vector<ProjPoint>& pts, Real tol) {
  std::vector<ProjPoint> kept;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : kept)
      if (chordal_distance(p, q) < tol) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(p);
  }
  return static_cast<int>(kept.size());
}

}  // namespace

TEST(Quartic, FourthRootsOfUnity) {
  const auto r = quartic_roots(1.0, 0.0, 0.0, 0.0, -1.0);
  ASSERT_EQ(r.roots.size(), 4u);
  for (const Complex want : {Complex(1), Complex(-1), Complex(0, 1), Complex(0, -1)}) {
    bool found = false;
    for (const auto& x : r.roots) found = found || std::abs(x.value - want) < 1e-14;
    EXPECT_TRUE(found) << want;
  }
}

TEST(Quartic, QuadrupleRoot) {
  const auto r = quartic_roots(1.0, -4.0, 6.0, -4.0, 1.0);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0].multiplicity, 4);
  EXPECT_LT(std::abs(r.roots[0].value - 1.0), 1e-10);
}

TEST(Quartic, DegreeDropGoesToInfinity) {
  const auto r = quartic_roots(0.0, 0.0, 1.0, 0.0, -4.0);
  EXPECT_EQ(r.infinite_multiplicity, 2);
  EXPECT_EQ(r.total_multiplicity(), 4);
  EXPECT_THROW(quartic_roots(0.0, 0.0, 0.0, 0.0, 0.0), InvalidArgument);
}

TEST(Quartic, VietaOracle) {
  Rng rng = make_rng(10, {1});
  for (int k = 0; k < 50; ++k) {
    std::array<Complex, 5> c{1.0};
    for (int i = 1; i < 5; ++i) c[i] = random_complex(rng) * 3.0;
    const auto r = quartic_roots(c[0], c[1], c[2], c[3], c[4]);
    EXPECT_LT(r.residual, 1e-10);
    expect_vieta(c, r);
  }
}

TEST(Quartic, ClosePairsStayResolved) {
  // (w - 1)(w - 1 - 1e-6)(w + 2)(w - i): distinct roots must not be merged
  // into a cluster that fails the residual test.
  const Complex a = 1.0, b = 1.0 + 1e-6, c = -2.0, d = Complex(0, 1);
  const Complex e1 = a + b + c + d, e2 = a * b + a * c + a * d + b * c + b * d + c * d;
  const Complex e3 = a * b * c + a * b * d + a * c * d + b * c * d, e4 = a * b * c * d;
  const auto r = quartic_roots(1.0, -e1, e2, -e3, e4);
  EXPECT_LT(r.residual, 1e-10);
  EXPECT_EQ(r.total_multiplicity(), 4);
}

TEST(Base, Examples) {
  auto has = [](const std::vector<std::pair<ExtComplex, int>>& v, const ExtComplex& w) {
    for (const auto& [x, m] : v)
      if (sphere_distance(x, w) < 1e-12) return true;
    return false;
  };
  const auto z = g_preimages(ExtComplex::finite(0));
  EXPECT_TRUE(has(z, ExtComplex::finite(0)));
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(has(z, ExtComplex::finite(std::cbrt(-2.0) * omega(j))));
  EXPECT_TRUE(has(g_preimages(ExtComplex::finite(-1)), ExtComplex::finite(1)));
  const auto inf = g_preimages(ExtComplex::infinity());
  EXPECT_TRUE(has(inf, ExtComplex::infinity()));
  for (int j = 0; j < 3; ++j) EXPECT_TRUE(has(inf, ExtComplex::finite(std::cbrt(-0.5) * omega(j))));
}

TEST(Base, FibreOfGHasFourPointsMappingBack) {
  Rng rng = make_rng(10, {2});
  for (int k = 0; k < 500; ++k) {
    const ExtComplex W = ExtComplex::finite(random_complex(rng));
    const auto pre = g_preimages(W);
    int m = 0;
    for (const auto& [w, mult] : pre) {
      m += mult;
      ASSERT_LT(sphere_distance(lattes_g(w), W), 1e-10);
    }
    ASSERT_EQ(m, 4);
  }
}

TEST(Fibre, PencilCentre) {
  const auto s = fiber_preimages(DesbovesMap(2.0), rho0());
  ASSERT_EQ(s.branches.size(), 1u);
  EXPECT_EQ(s.branches[0].multiplicity, 16);
  EXPECT_TRUE(s.branches[0].point == rho0());
}

TEST(Fibre, FixedPointAmongItsPreimages) {
  const ProjPoint r0 = ProjPoint::normalize(1.0, 0.0, -1.0);
  const auto s = fiber_preimages(DesbovesMap(1.0), r0);
  bool found = false;
  for (const auto& b : s.branches) found = found || b.point == r0;
  EXPECT_TRUE(found);
  EXPECT_EQ(s.total_multiplicity(), 16);
}

TEST(Fibre, SixteenBranchesWithSmallResidual) {
  Rng rng = make_rng(10, {3});
  for (int k = 0; k < 1000; ++k) {
    const DesbovesMap f(random_lambda(rng));
    const ProjPoint t = random_point(rng);
    const auto s = fiber_preimages(f, t);
    ASSERT_EQ(s.total_multiplicity(), 16);
    std::vector<ProjPoint> pts;
    for (const auto& b : s.branches) {
      ASSERT_LT(chordal_distance(f(b.point), t), 1e-9);
      ASSERT_LT(b.residual, 1e-9);
      pts.push_back(b.point);
    }
    if (k < 100) ASSERT_EQ(count_distinct(pts, 1e-8), 16);
  }
}

TEST(Fibre, BaseCompatibility) {
  Rng rng = make_rng(10, {4});
  for (int k = 0; k < 200; ++k) {
    const DesbovesMap f(random_lambda(rng));
    const ProjPoint t = random_point(rng);
    const ExtComplex W = w_coordinate(project_pencil(t));
    for (const auto& b : fiber_preimages(f, t).branches)
      ASSERT_LT(sphere_distance(lattes_g(w_coordinate(project_pencil(b.point))), W), 1e-10);
  }
}

TEST(Fibre, DistinctPreimageGrowth) {
  Rng rng = make_rng(10, {5});
  const DesbovesMap f(Complex(1.7, 0.4));
  std::vector<ProjPoint> level{random_point(rng)};
  for (int n = 1; n <= 3; ++n) {
    std::vector<ProjPoint> next;
    for (const auto& p : level)
      for (const auto& b : fiber_preimages(f, p).branches)
        for (int m = 0; m < b.multiplicity; ++m) next.push_back(b.point);
    level = next;
    ASSERT_EQ(level.size(), static_cast<std::size_t>(1) << (4 * n));
    if (n < 3) {
      ASSERT_EQ(count_distinct(level, 1e-8), 1 << (4 * n));
    }
  }
  // Level 3 (4096 points): sort by a coordinate and compare neighbours only.
  std::vector<ProjPoint> s = level;
  std::sort(s.begin(), s.end(), [](const ProjPoint& a, const ProjPoint& b) {
    return a.unit_lift()[0].real() < b.unit_lift()[0].real();
  });
  int dups = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size() && s[j].unit_lift()[0].real() - s[i].unit_lift()[0].real() < 1e-8; ++j)
      dups += chordal_distance(s[i], s[j]) < 1e-8;
  EXPECT_EQ(dups, 0);
}

TEST(Slots, MatchTheFullFibre) {
  Rng rng = make_rng(10, {6});
  for (int k = 0; k < 100; ++k) {
    const DesbovesMap f(random_lambda(rng));
    const ProjPoint t = random_point(rng);
    const auto s = fiber_preimages(f, t);
    for (int slot = 0; slot < 16; ++slot) {
      const ProjPoint p = preimage_in_slot(f, t, slot);
      Real d = 1;
      for (const auto& b : s.branches) d = std::min(d, chordal_distance(p, b.point));
      ASSERT_LT(d, 1e-9);
    }
  }
}

TEST(Walk, Examples) {
  Rng rng = make_rng(10, {7});
  const DesbovesMap f(2.0);
  EXPECT_THROW(backward_orbit_sample(f, rho0(), 5, rng), ExceptionalPoint);
  const ProjPoint p = random_point(rng);
  EXPECT_EQ(backward_orbit_sample(f, p, 0, rng).coords(), p.coords());
}

TEST(Walk, AvoidsRho0) {
  const DesbovesMap f(2.0);
  const PointCloud c = sample_equilibrium(f, 20000, 25, 3, default_threads());
  Real d = 1;
  for (const auto& p : c.points) d = std::min(d, chordal_distance(p, rho0()));
  EXPECT_GT(d, 0.05);
}

TEST(Walk, CoupledReferenceMatchesSingleWalk) {
  const std::vector<DesbovesMap> maps{DesbovesMap(2.0), DesbovesMap(2.1), DesbovesMap(Complex(2, 0.1))};
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng a = make_rng(5, {i}), b = make_rng(5, {i});
    const ProjPoint start = random_fermat_point(a);
    random_fermat_point(b);
    const auto coupled = coupled_backward_orbits(maps, start, 10, a);
    const ProjPoint single = backward_orbit_sample(maps[0], start, 10, b);
    ASSERT_EQ(coupled[0].coords(), single.coords());
    for (std::size_t k = 1; k < maps.size(); ++k) {
      // Same base walk on Y for every parameter.
      ASSERT_LT(chordal_distance(project_pencil(coupled[k]), project_pencil(coupled[0])), 1e-9);
    }
  }
}
