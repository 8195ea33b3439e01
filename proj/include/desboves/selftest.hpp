#pragma once

// Quick checks of closed-form examples and module invariants, run by the
// `selftest` subcommand. Each check returns an empty string on success and a
// short reason otherwise. Sample sizes are kept small (seconds in total).

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "desboves/desboves.hpp"

namespace desboves::selftest {

struct Check {
  std::string name;
  std::function<std::string()> run;
};

struct Outcome {
  std::string name;
  bool passed = false;
  std::string reason;
};

namespace detail {

inline std::string expect(bool ok, const std::string& why) { return ok ? std::string() : why; }

inline ProjPoint random_point(Rng& rng) {
  std::normal_distribution<Real> g;
  return ProjPoint::normalize(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
}

inline Complex random_lambda(Rng& rng, Real rmin = 0.1, Real rmax = 10) {
  std::uniform_real_distribution<Real> u(0, 1);
  const Real r = rmin * std::pow(rmax / rmin, u(rng));
  return std::polar(r, 2 * kPi * u(rng));
}

}  // namespace detail

inline std::vector<Check> checks() {
  using detail::expect;
  std::vector<Check> c;

  c.push_back({"normalize scales to max modulus", [] {
                 const ProjPoint p = ProjPoint::normalize(Complex(1, 1), 2.0, 0.0);
                 return expect(std::abs(p.x() - Complex(0.5, 0.5)) < 1e-15 && p.y() == Complex(1),
                               "(1+i,2,0) not [(1+i)/2:1:0]");
               }});
  c.push_back({"normalize rejects zero", [] {
                 try {
                   ProjPoint::normalize(0.0, 0.0, 0.0);
                 } catch (const ZeroVector&) {
                   return std::string();
                 }
                 return std::string("no ZeroVector");
               }});
  c.push_back({"chordal distance of coordinate points", [] {
                 return expect(std::abs(chordal_distance(z0(), rho0()) - 1) < 1e-15, "d([1:0:0],[0:1:0]) != 1");
               }});
  c.push_back({"pencil projection", [] {
                 const ProjPoint q = project_pencil(ProjPoint::normalize(1.0, 5.0, -1.0));
                 bool center = false;
                 try {
                   project_pencil(rho0());
                 } catch (const AtPencilCenter&) {
                   center = true;
                 }
                 return expect(q == ProjPoint::normalize(1.0, 0.0, -1.0) && center, "projection examples");
               }});
  c.push_back({"fixed points of f_lambda", [] {
                 Rng rng = make_rng(1, {1});
                 for (int k = 0; k < 50; ++k) {
                   const DesbovesMap f(detail::random_lambda(rng));
                   std::vector<ProjPoint> fixed{rho0(), x0(), z0()};
                   for (int j = 0; j < 3; ++j) fixed.push_back(ProjPoint::normalize(Complex(1), 0.0, -omega(j)));
                   for (const auto& p : fixed)
                     if (chordal_distance(f(p), p) > 1e-12) return std::string("point not fixed");
                 }
                 return std::string();
               }});
  c.push_back({"lambda = 0 is indeterminate at rho0", [] {
                 try {
                   DesbovesMap::degenerate().eval(rho0());
                 } catch (const IndeterminacyHit&) {
                   return std::string();
                 }
                 return std::string("no IndeterminacyHit");
               }});
  c.push_back({"general family specializes", [] {
                 Rng rng = make_rng(1, {2});
                 for (int k = 0; k < 50; ++k) {
                   const Complex l = detail::random_lambda(rng);
                   const ProjPoint p = detail::random_point(rng);
                   if (chordal_distance(eval_general(-1.0, l, 1.0, p), DesbovesMap(l)(p)) > 1e-12)
                     return std::string("(-1, lambda, 1) differs from f_lambda");
                 }
                 return expect(!GeneralDesboves::well_defined(0.0, 1.0, 2.0) &&
                                   GeneralDesboves::well_defined(1.0, 1.0, 1.0),
                               "well_defined examples");
               }});
  c.push_back({"invariant lines and Fermat curve", [] {
                 Rng rng = make_rng(1, {3});
                 for (int k = 0; k < 100; ++k) {
                   const DesbovesMap f(detail::random_lambda(rng));
                   const ProjPoint p = detail::random_point(rng);
                   const ProjPoint onX = ProjPoint::normalize(0.0, p.y(), p.z());
                   const ProjPoint onY = ProjPoint::normalize(p.x(), 0.0, p.z());
                   const ProjPoint onZ = ProjPoint::normalize(p.x(), p.y(), 0.0);
                   const ProjPoint onC = random_fermat_point(rng);
                   if (!on_line_X(f(onX)) || !on_line_Y(f(onY)) || !on_line_Z(f(onZ)) || !on_fermat(f(onC)))
                     return std::string("image left its invariant set");
                 }
                 return std::string();
               }});
  c.push_back({"semiconjugacy over the pencil", [] {
                 Rng rng = make_rng(1, {4});
                 for (int k = 0; k < 100; ++k) {
                   const DesbovesMap f(detail::random_lambda(rng));
                   const ProjPoint p = detail::random_point(rng);
                   const ProjPoint lhs = project_pencil(f(p));
                   const ProjPoint rhs = point_on_Y(lattes_g(w_coordinate(project_pencil(p))));
                   if (chordal_distance(lhs, rhs) > 1e-12) return std::string("pi f != g pi");
                 }
                 return std::string();
               }});
  c.push_back({"sigma conjugacy", [] {
                 Rng rng = make_rng(1, {5});
                 auto sigma = [](const ProjPoint& p) { return ProjPoint::normalize(p.z(), p.y(), p.x()); };
                 for (int k = 0; k < 100; ++k) {
                   const Complex l = detail::random_lambda(rng);
                   const ProjPoint p = detail::random_point(rng);
                   if (chordal_distance(DesbovesMap(l)(sigma(p)), sigma(DesbovesMap(-l)(p))) > 1e-12)
                     return std::string("f_lambda sigma != sigma f_-lambda");
                 }
                 return std::string();
               }});
  c.push_back({"jacobian examples", [] {
                 const DesbovesMap f(2.5);
                 const Complex at_r0 = f.jacobian_det(ProjPoint::normalize(1.0, 0.0, -1.0));
                 const Complex on_L0 = f.jacobian_det(ProjPoint::normalize(1.0, 0.3, 1.0));
                 return expect(std::abs(at_r0 - 64.0) < 1e-12 && std::abs(on_L0) < 1e-12, "jacobian examples");
               }});
  c.push_back({"lattes map examples", [] {
                 bool ok = std::abs(lattes_g(ExtComplex::finite(0)).value) == 0 && lattes_g(ExtComplex::infinity()).infinite;
                 for (int j = 0; j < 3; ++j)
                   ok = ok && std::abs(lattes_g(ExtComplex::finite(omega(j))).value + omega(j)) < 1e-14;
                 return expect(ok, "g(0), g(inf) or g(omega^j)");
               }});
  c.push_back({"restriction to X", [] {
                 return expect(std::abs(restriction_X(Complex(0.5, 0.1), -1.0) + std::pow(Complex(0.5, 0.1), 4)) < 1e-15,
                               "lambda = -1 should give -t^4");
               }});
  c.push_back({"fixed point catalog", [] {
                 for (Complex l : {Complex(3), Complex(-1), Complex(0.3, 0.2), Complex(-0.5)}) {
                   const auto cat = fixed_point_catalog(l);
                   bool x_rep = false, z_rep = false;
                   for (const auto& fp : cat) {
                     if (fp.label == "x0") x_rep = fp.stability == Stability::Repelling;
                     if (fp.label == "z0") z_rep = fp.stability == Stability::Repelling;
                   }
                   if (!x_rep && !z_rep) return std::string("neither x0 nor z0 repelling");
                 }
                 return std::string();
               }});
  c.push_back({"critical trace on Y", [] {
                 const auto t3 = critical_cubic_on_Y(3.0);
                 bool ok = critical_cubic_on_Y(1.0).w[0].infinite && critical_cubic_on_Y(-1.0).w[0].value == Complex(0);
                 for (const auto& w : t3.w) ok = ok && std::abs(w.value * w.value * w.value + 2.0) < 1e-13;
                 ok = ok && std::abs(lambda_for_critical_w(ExtComplex::finite(std::pow(Complex(-2), 1.0 / 3))) - 3.0) < 1e-12;
                 return expect(ok, "trace or inverse");
               }});
  c.push_back({"critical components", [] {
                 const Complex l = 0.7;
                 bool ok = on_critical_set(l, ProjPoint::normalize(0.4, 2.0, 0.4)) == CriticalComponent::L0;
                 ok = ok && on_critical_set(l, ProjPoint::normalize(0.3, 0.9, -0.7)) == CriticalComponent::None;
                 return expect(ok, "component tags");
               }});
  c.push_back({"quartic solver", [] {
                 const auto r = quartic_roots(1.0, 0.0, 0.0, 0.0, -1.0);
                 const auto m = quartic_roots(1.0, -4.0, 6.0, -4.0, 1.0);
                 return expect(r.roots.size() == 4 && m.roots.size() == 1 && m.roots[0].multiplicity == 4 &&
                                   std::abs(m.roots[0].value - 1.0) < 1e-6,
                               "w^4 - 1 or (w - 1)^4");
               }});
  c.push_back({"g preimages", [] {
                 const auto p0 = g_preimages(ExtComplex::finite(0));
                 const auto pinf = g_preimages(ExtComplex::infinity());
                 int inf_count = 0;
                 for (const auto& [w, m] : pinf) inf_count += w.infinite ? m : 0;
                 return expect(p0.size() == 4 && inf_count == 1, "fibres of 0 and infinity");
               }});
  c.push_back({"sixteen preimages", [] {
                 Rng rng = make_rng(1, {6});
                 for (int k = 0; k < 20; ++k) {
                   const DesbovesMap f(detail::random_lambda(rng));
                   const auto set = fiber_preimages(f, detail::random_point(rng));
                   if (set.total_multiplicity() != 16) return std::string("branch count");
                   for (const auto& b : set.branches)
                     if (b.residual > 1e-9) return std::string("forward residual");
                 }
                 const auto c0 = fiber_preimages(DesbovesMap(2.0), rho0());
                 return expect(c0.branches.size() == 1 && c0.total_multiplicity() == 16, "preimage of rho0");
               }});
  c.push_back({"fs log-jacobian chart independence", [] {
                 Rng rng = make_rng(1, {7});
                 for (int k = 0; k < 50; ++k) {
                   const DesbovesMap f(detail::random_lambda(rng));
                   const ProjPoint p = detail::random_point(rng);
                   const Real a = fs_log_jacobian(f, p);
                   const Real b = fs_log_jacobian_lift(f, p);
                   if (std::abs(a - b) > 1e-9) return std::string("chart and homogeneous values differ");
                 }
                 return std::string();
               }});
  c.push_back({"repelling periodic points", [] {
                 const auto v = is_repelling_periodic(DesbovesMap(3.0), x0(), 1);
                 const auto w = is_repelling_periodic(DesbovesMap(0.4), ProjPoint::normalize(1.0, 0.0, -1.0), 1);
                 const auto r = is_repelling_periodic(DesbovesMap(3.0), rho0(), 1);
                 return expect(v.repelling && w.repelling && !r.repelling, "x0, r0 or rho0 classification");
               }});
  c.push_back({"escape classification", [] {
                 const DesbovesMap f(0.5);
                 bool ok = classify_point(f, rho0()) == EscapeClass::escaped_at(0);
                 ok = ok && !classify_point(f, ProjPoint::normalize(1.0, 0.0, -1.0)).escaped;
                 for (int k = 0; k < 20; ++k)
                   ok = ok && !classify_point(f, point_on_Y(ExtComplex::finite(std::polar(0.2 * k, 0.7 * k)))).escaped;
                 return expect(ok, "rho0, r0 or Y classification");
               }});
  c.push_back({"hausdorff trivial cases", [] {
                 const DesbovesMap f(2.0);
                 const PointCloud a = julia_cloud(f, 200, 15, 3);
                 PointCloud sub = PointCloud::uniform({a.points.begin(), a.points.begin() + 50});
                 return expect(hausdorff_distance(a, a) == 0 && directed_hausdorff_exact(sub, a) == 0,
                               "d(A,A) or subset distance");
               }});
  c.push_back({"stencil oracles", [] {
                 SweepSpec s;
                 s.rect = {1.5, 2.5, -0.5, 0.5};
                 s.step = 0.125;
                 const BifurcationGrid g(s);
                 const auto harm = laplacian_of_field(g, [](Complex l) { return (l * l).real(); });
                 const auto quad = laplacian_of_field(g, [](Complex l) { return std::norm(l); });
                 for (std::size_t k = 0; k < harm.size(); ++k)
                   if (harm[k].defined && (std::abs(harm[k].value) > 1e-11 || std::abs(quad[k].value - 4) > 1e-11))
                     return std::string("stencil not exact");
                 return std::string();
               }});
  c.push_back({"misiurewicz closed forms", [] {
                 MisiurewiczCandidate good{3.0, ExtComplex::finite(std::pow(Complex(-2), 1.0 / 3)), 1, Target::X0};
                 MisiurewiczCandidate bad{-1.0, ExtComplex::finite(0), 1, Target::X0};
                 const auto r1 = verify_misiurewicz(good);
                 const auto r2 = verify_misiurewicz(bad);
                 return expect(r1.all() && r2.first_failure() == 3 && r2.passed[0] && r2.passed[1] && r2.passed[3],
                               "lambda = 3 or lambda = -1 verdict");
               }});
  c.push_back({"finder depth one", [] {
                 const auto x = misiurewicz_candidates(Target::X0, 1);
                 const auto z = misiurewicz_candidates(Target::Z0, 1);
                 return expect(x.size() == 1 && std::abs(x[0].lambda - 3.0) < 1e-12 && z.size() == 1 &&
                                   std::abs(z[0].lambda + 3.0) < 1e-12,
                               "depth-one candidates");
               }});
  return c;
}

inline std::vector<Outcome> run_all() {
  std::vector<Outcome> out;
  for (const auto& c : checks()) {
    Outcome o{c.name, false, {}};
    try {
      o.reason = c.run();
      o.passed = o.reason.empty();
    } catch (const std::exception& e) {
      o.reason = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace desboves::selftest
