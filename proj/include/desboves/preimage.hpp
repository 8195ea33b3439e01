#pragma once

// Preimages of f_lambda through its skew-product structure. The first and
// third coordinates of the lift only involve (x, z), so the base point [x:z]
// of a preimage solves a quartic for the Lattes map g on Y; once (x, z) is
// fixed, y solves the fiber quartic
//
//   lambda y^4 + (z^3 - x^3 + lambda(x^3 + z^3)) y - s Y = 0,
//
// where s is the scale relating the lift to the target [X:Y:Z].

#include <algorithm>
#include <limits>
#include <array>
#include <random>
#include <vector>

#include "desboves/desboves_map.hpp"
#include "desboves/proj_geometry.hpp"
#include "desboves/quartic.hpp"

namespace desboves {

/// A base point on Y as a homogeneous pair with max(|x|,|z|) = 1.
struct BaseRoot {
  Complex x;
  Complex z;
  int multiplicity = 1;

  ExtComplex w() const { return ExtComplex::from_homogeneous(x, z); }
};

namespace detail {

/// Homogeneous solutions [x:z] of g([x:z]) = [X:Z], i.e. of
///   Z x^4 + 2X x^3 z + 2Z x z^3 + X z^4 = 0.
/// The quartic is dehomogenized on whichever of X, Z is larger so the
/// leading coefficient never degenerates.
inline std::vector<BaseRoot> base_preimages(Complex X, Complex Z) {
  std::vector<BaseRoot> out;
  if (std::abs(Z) >= std::abs(X)) {
    // In w = x/z: Z w^4 + 2X w^3 + 2Z w + X.
    const auto r = quartic_roots(Z, 2.0 * X, 0.0, 2.0 * Z, X);
    for (const auto& root : r.roots) {
      const Complex w = root.value;
      if (std::abs(w) <= 1.0) out.push_back({w, Complex(1), root.multiplicity});
      else out.push_back({Complex(1), Complex(1) / w, root.multiplicity});
    }
    if (r.infinite_multiplicity > 0) out.push_back({Complex(1), Complex(0), r.infinite_multiplicity});
  } else {
    // In v = z/x the equation keeps its shape with X and Z exchanged.
    const auto r = quartic_roots(X, 2.0 * Z, 0.0, 2.0 * X, Z);
    for (const auto& root : r.roots) {
      const Complex v = root.value;
      if (std::abs(v) <= 1.0) out.push_back({Complex(1), v, root.multiplicity});
      else out.push_back({Complex(1) / v, Complex(1), root.multiplicity});
    }
    if (r.infinite_multiplicity > 0) out.push_back({Complex(0), Complex(1), r.infinite_multiplicity});
  }
  return out;
}

}  // namespace detail

/// The g-fiber of W on Y, with multiplicities summing to 4.
inline std::vector<std::pair<ExtComplex, int>> g_preimages(const ExtComplex& W) {
  const auto [X, Z] = W.homogeneous();
  std::vector<std::pair<ExtComplex, int>> out;
  for (const auto& b : detail::base_preimages(X, Z)) out.emplace_back(b.w(), b.multiplicity);
  return out;
}

struct PreimageBranch {
  ProjPoint point = rho0();
  int multiplicity = 1;
  Real residual = 0;  // chordal distance from f(point) to the target
};

struct PreimageSet {
  ProjPoint target = rho0();
  std::vector<PreimageBranch> branches;

  int total_multiplicity() const {
    int n = 0;
    for (const auto& b : branches) n += b.multiplicity;
    return n;
  }
};

namespace detail {

/// Newton correction of p towards f(p) = target in affine charts (pivot of
/// the target for the equations, pivot of p for the unknowns).
inline ProjPoint polish_preimage(const DesbovesMap& f, ProjPoint p, const ProjPoint& target, int steps = 2) {
  const Chart out = static_cast<Chart>(target.pivot());
  const auto ao = chart_axes(out);
  const int m = static_cast<int>(out);
  Real best = chordal_distance(f.eval(p), target);
  for (int it = 0; it < steps && best > 0; ++it) {
    const Chart in = static_cast<Chart>(p.pivot());
    const Triple Q = f.lift(p.coords());
    if (Q[m] == Complex(0)) break;
    const std::array<Complex, 2> resid{Q[ao[0]] / Q[m] - target[ao[0]], Q[ao[1]] / Q[m] - target[ao[1]]};
    const Mat2 d = chart_differential(f.lift(), p, in, out);
    std::array<Complex, 2> step;
    if (!solve2(d, resid, step)) break;
    const ChartCoord c = to_chart(p, in);
    const ProjPoint cand = from_chart({in, c.u - step[0], c.v - step[1]});
    const Real r = chordal_distance(f.eval(cand), target);
    if (!(r < best)) break;
    p = cand;
    best = r;
  }
  return p;
}

inline bool is_pencil_center(const ProjPoint& t) {
  return chordal_distance(t, rho0()) < tolerance::projective();
}

/// Scale s with F_0(x,z) = s X and F_2(x,z) = s Z, taken from the larger of
/// X, Z. Throws DegenerateFiber when the two equations disagree.
inline Complex fiber_scale(const BaseRoot& b, const ProjPoint& target) {
  const Complex x3 = b.x * b.x * b.x;
  const Complex z3 = b.z * b.z * b.z;
  const Complex F0 = -b.x * (x3 + 2.0 * z3);
  const Complex F2 = b.z * (2.0 * x3 + z3);
  const Complex X = target.x(), Z = target.z();
  const Complex s = std::abs(X) >= std::abs(Z) ? F0 / X : F2 / Z;
  const Real mismatch = std::abs(F0 * Z - F2 * X);
  if (mismatch > 1e-8 * (std::abs(F0) + std::abs(F2)) * std::max(std::abs(X), std::abs(Z)))
    throw DegenerateFiber();
  return s;
}

inline QuarticRoots fiber_roots(Complex lambda, const BaseRoot& b, Complex s, Complex Y) {
  const Complex x3 = b.x * b.x * b.x;
  const Complex z3 = b.z * b.z * b.z;
  const Complex A = z3 - x3 + lambda * (x3 + z3);
  return quartic_roots(lambda, 0.0, 0.0, A, -s * Y);
}

}  // namespace detail

/// All d^2 = 16 preimages of target (with multiplicity). f^{-1}(rho_0) =
/// {rho_0} is returned as a single branch of multiplicity 16.
inline PreimageSet fiber_preimages(const DesbovesMap& f, const ProjPoint& target) {
  if (f.is_degenerate()) throw DegenerateLambda();
  PreimageSet out;
  out.target = target;
  if (detail::is_pencil_center(target)) {
    out.branches.push_back({rho0(), 16, 0.0});
    return out;
  }
  for (const auto& b : detail::base_preimages(target.x(), target.z())) {
    const Complex s = detail::fiber_scale(b, target);
    const auto ys = detail::fiber_roots(f.lambda(), b, s, target.y());
    for (const auto& y : ys.roots) {
      ProjPoint p = ProjPoint::normalize(b.x, y.value, b.z);
      p = detail::polish_preimage(f, p, target);
      out.branches.push_back({p, b.multiplicity * y.multiplicity, chordal_distance(f.eval(p), target)});
    }
  }
  return out;
}

namespace detail {

/// Base roots repeated by multiplicity: always four entries.
inline std::vector<BaseRoot> expanded_bases(const ProjPoint& target) {
  std::vector<BaseRoot> out;
  for (const auto& b : base_preimages(target.x(), target.z()))
    for (int i = 0; i < b.multiplicity; ++i) out.push_back(b);
  return out;
}

inline std::array<Complex, 4> expanded_fiber(const DesbovesMap& f, const BaseRoot& b, const ProjPoint& target) {
  const auto ys = fiber_roots(f.lambda(), b, fiber_scale(b, target), target.y()).expanded();
  std::array<Complex, 4> out{};
  for (std::size_t i = 0; i < 4 && i < ys.size(); ++i) out[i] = ys[i];
  return out;
}

}  // namespace detail

/// The preimage in branch slot 0..15: slot / 4 picks the base root and
/// slot % 4 the fiber root, both counted with multiplicity.
inline ProjPoint preimage_in_slot(const DesbovesMap& f, const ProjPoint& target, int slot) {
  if (detail::is_pencil_center(target)) return rho0();
  const BaseRoot b = detail::expanded_bases(target)[slot / 4];
  const Complex y = detail::expanded_fiber(f, b, target)[slot % 4];
  return detail::polish_preimage(f, ProjPoint::normalize(b.x, y, b.z), target);
}

/// One uniformly chosen preimage (uniform over the 16 branches counted with
/// multiplicity). Only the chosen fiber is solved.
template <class Rng>
ProjPoint random_preimage(const DesbovesMap& f, const ProjPoint& target, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, 15);
  return preimage_in_slot(f, target, pick(rng));
}

/// Endpoint of a random inverse-branch walk of the given length.
template <class Rng>
ProjPoint backward_orbit_sample(const DesbovesMap& f, const ProjPoint& start, int steps, Rng& rng) {
  if (f.is_degenerate()) throw DegenerateLambda();
  if (detail::is_pencil_center(start)) throw ExceptionalPoint();
  ProjPoint p = start;
  for (int i = 0; i < steps; ++i) p = random_preimage(f, p, rng);
  return p;
}

/// Inverse-branch walks for several parameters driven by one stream of
/// branch choices. maps[0] chooses slots exactly as random_preimage does.
/// The base walk on Y does not depend on the parameter, so every map reuses
/// the reference base root; each other map then takes the fiber root that the
/// least-displacement matching of its four roots with the reference's pairs
/// with the reference choice. Each walk is still a uniform inverse-branch
/// walk for its own map, but nearby parameters follow the same branches.
template <class Rng>
std::vector<ProjPoint> coupled_backward_orbits(const std::vector<DesbovesMap>& maps, const ProjPoint& start,
                                               int steps, Rng& rng) {
  if (maps.empty()) return {};
  for (const auto& f : maps)
    if (f.is_degenerate()) throw DegenerateLambda();
  if (detail::is_pencil_center(start)) throw ExceptionalPoint();
  std::vector<ProjPoint> p(maps.size(), start);
  std::uniform_int_distribution<int> pick(0, 15);
  for (int s = 0; s < steps; ++s) {
    const int slot = pick(rng);
    const BaseRoot b = detail::expanded_bases(p[0])[slot / 4];
    const auto ref = detail::expanded_fiber(maps[0], b, p[0]);
    const int choice = slot % 4;
    for (std::size_t k = 1; k < maps.size(); ++k) {
      const auto ys = detail::expanded_fiber(maps[k], b, p[k]);
      std::array<int, 4> perm{0, 1, 2, 3}, best = perm;
      Real best_cost = std::numeric_limits<Real>::infinity();
      do {
        Real c = 0;
        for (int i = 0; i < 4; ++i) c += std::abs(ys[perm[i]] - ref[i]);
        if (c < best_cost) {
          best_cost = c;
          best = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      p[k] = detail::polish_preimage(maps[k], ProjPoint::normalize(b.x, ys[best[choice]], b.z), p[k]);
    }
    p[0] = detail::polish_preimage(maps[0], ProjPoint::normalize(b.x, ref[choice], b.z), p[0]);
  }
  return p;
}

}  // namespace desboves
