#pragma once

// The elementary Desboves family
//
//   f_lambda = [ -x(x^3 + 2z^3) : y(z^3 - x^3 + lambda(x^3 + y^3 + z^3)) : z(2x^3 + z^3) ]
//
// and the general Desboves family f_{a,b,c}, both evaluated through a cached
// monomial table of the homogeneous lift.

#include <array>
#include <string>
#include <vector>

#include "desboves/proj_geometry.hpp"
#include "desboves/small_matrix.hpp"
#include "desboves/types.hpp"

namespace desboves {

inline constexpr int kDegree = 4;

struct Monomial {
  Complex coef;
  std::array<int, 3> exp;  // exponents of x, y, z; they sum to kDegree
};

/// A homogeneous polynomial map C^3 -> C^3 of degree 4, stored as monomials.
class HomogeneousQuartic {
 public:
  HomogeneousQuartic() = default;
  explicit HomogeneousQuartic(std::array<std::vector<Monomial>, 3> components) {
    for (int i = 0; i < 3; ++i)
      for (const auto& m : components[i])
        if (m.coef != Complex(0)) terms_[i].push_back(m);
  }

  const std::array<std::vector<Monomial>, 3>& terms() const { return terms_; }

  Triple operator()(const Triple& v) const {
    const auto pw = powers(v);
    Triple out{};
    for (int i = 0; i < 3; ++i) {
      Complex s = 0;
      for (const auto& m : terms_[i]) s += m.coef * pw[0][m.exp[0]] * pw[1][m.exp[1]] * pw[2][m.exp[2]];
      out[i] = s;
    }
    return out;
  }

  /// Matrix of partial derivatives d F_i / d v_j.
  Mat3 jacobian(const Triple& v) const {
    const auto pw = powers(v);
    Mat3 jac{};
    for (int i = 0; i < 3; ++i) {
      for (const auto& m : terms_[i]) {
        for (int j = 0; j < 3; ++j) {
          if (m.exp[j] == 0) continue;
          Complex t = m.coef * Real(m.exp[j]);
          for (int k = 0; k < 3; ++k) t *= pw[k][k == j ? m.exp[k] - 1 : m.exp[k]];
          jac[i][j] += t;
        }
      }
    }
    return jac;
  }

 private:
  static std::array<std::array<Complex, kDegree + 1>, 3> powers(const Triple& v) {
    std::array<std::array<Complex, kDegree + 1>, 3> pw;
    for (int i = 0; i < 3; ++i) {
      pw[i][0] = 1;
      for (int e = 1; e <= kDegree; ++e) pw[i][e] = pw[i][e - 1] * v[i];
    }
    return pw;
  }

  std::array<std::vector<Monomial>, 3> terms_;
};

/// Derivative of the chart representation of `lift` at p, from chart `in`
/// (around p) to chart `out` (around the image). Rows follow the affine axes
/// of `out`, columns those of `in`.
inline Mat2 chart_differential(const HomogeneousQuartic& lift, const ProjPoint& p, Chart in, Chart out) {
  const int k = static_cast<int>(in);
  const int m = static_cast<int>(out);
  if (p[k] == Complex(0)) throw ChartOverflow();
  Triple P = p.coords();
  const Complex inv = Complex(1) / P[k];
  for (auto& c : P) c *= inv;
  P[k] = 1;
  const Triple Q = lift(P);
  if (Q[m] == Complex(0)) throw ChartOverflow();
  const Mat3 dF = lift.jacobian(P);
  const auto ai = chart_axes(in);
  const auto ao = chart_axes(out);
  const Complex qm2 = Q[m] * Q[m];
  Mat2 d{};
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s) {
      const int i = ao[r];
      const int j = ai[s];
      d[r][s] = (dF[i][j] * Q[m] - Q[i] * dF[m][j]) / qm2;
    }
  return d;
}

enum class Stability { Repelling, Saddle, Attracting, Indifferent };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Repelling: return "repelling";
    case Stability::Saddle: return "saddle";
    case Stability::Attracting: return "attracting";
    case Stability::Indifferent: return "indifferent";
  }
  return "?";
}

inline Stability classify_multipliers(const std::array<Complex, 2>& eig, Real tol = 1e-9) {
  int above = 0, below = 0;
  for (const auto& e : eig) {
    const Real m = std::abs(e);
    if (m > 1 + tol) ++above;
    else if (m < 1 - tol) ++below;
  }
  if (above == 2) return Stability::Repelling;
  if (below == 2) return Stability::Attracting;
  if (above == 1 && below == 1) return Stability::Saddle;
  return Stability::Indifferent;
}

struct FixedPointInfo {
  ProjPoint location = rho0();
  std::array<Complex, 2> eigenvalues{};
  Stability stability = Stability::Indifferent;
  std::string label;
};

class DesbovesMap {
 public:
  /// lambda = 0 is rejected here; use DesbovesMap::degenerate() for f_0.
  explicit DesbovesMap(Complex lambda) : DesbovesMap(lambda, false) {
    if (lambda == Complex(0)) throw DegenerateLambda();
  }

  /// f_0, which is not an endomorphism: it is indeterminate at rho_0. Only
  /// used as a limit object.
  static DesbovesMap degenerate() { return DesbovesMap(Complex(0), true); }

  Complex lambda() const { return lambda_; }
  bool is_degenerate() const { return degenerate_; }
  const HomogeneousQuartic& lift() const { return lift_; }

  Triple lift(const Triple& v) const { return lift_(v); }

  /// f(p) from an arbitrary nonzero lift of p.
  ProjPoint eval_lift(const Triple& v) const {
    try {
      return ProjPoint::normalize(lift_(v));
    } catch (const ZeroVector&) {
      throw IndeterminacyHit();
    }
  }

  ProjPoint operator()(const ProjPoint& p) const { return eval_lift(p.coords()); }
  ProjPoint eval(const ProjPoint& p) const { return eval_lift(p.coords()); }

  ProjPoint iterate(ProjPoint p, int n) const {
    for (int i = 0; i < n; ++i) p = eval(p);
    return p;
  }

  /// Determinant of the 3x3 derivative of the lift on the canonical lift of
  /// p, in closed form: -8 (x^3 - z^3)^2 (-x^3 + z^3 + lambda(4y^3 + x^3 + z^3)).
  Complex jacobian_det(const ProjPoint& p) const { return jacobian_det(p.coords()); }

  Complex jacobian_det(const Triple& v) const {
    const Complex x3 = v[0] * v[0] * v[0];
    const Complex y3 = v[1] * v[1] * v[1];
    const Complex z3 = v[2] * v[2] * v[2];
    const Complex d = x3 - z3;
    return -8.0 * d * d * (-x3 + z3 + lambda_ * (4.0 * y3 + x3 + z3));
  }

  /// Chart derivative at p, using the best-conditioned charts (the pivots of
  /// p and f(p)).
  Mat2 differential(const ProjPoint& p) const {
    const ProjPoint q = eval(p);
    return chart_differential(lift_, p, static_cast<Chart>(p.pivot()), static_cast<Chart>(q.pivot()));
  }

  Mat2 differential(const ProjPoint& p, Chart in, Chart out) const {
    return chart_differential(lift_, p, in, out);
  }

  /// Derivative at a fixed point in one chart for both source and image, so
  /// its eigenvalues are the multipliers. differential(p) may pick different
  /// charts when coordinates of p tie in modulus.
  Mat2 multiplier_matrix(const ProjPoint& p) const {
    const Chart c = static_cast<Chart>(p.pivot());
    return chart_differential(lift_, p, c, c);
  }

 private:
  DesbovesMap(Complex lambda, bool degenerate) : lambda_(lambda), degenerate_(degenerate) {
    lift_ = HomogeneousQuartic({{
        {{Complex(-1), {4, 0, 0}}, {Complex(-2), {1, 0, 3}}},
        {{lambda - 1.0, {3, 1, 0}}, {lambda, {0, 4, 0}}, {lambda + 1.0, {0, 1, 3}}},
        {{Complex(2), {3, 0, 1}}, {Complex(1), {0, 0, 4}}},
    }});
  }

  Complex lambda_;
  bool degenerate_;
  HomogeneousQuartic lift_;
};

/// The general Desboves family
///   [ x(y^3 - z^3 + a Phi) : y(z^3 - x^3 + b Phi) : z(x^3 - y^3 + c Phi) ],
/// Phi = x^3 + y^3 + z^3.
class GeneralDesboves {
 public:
  GeneralDesboves(Complex a, Complex b, Complex c) : a_(a), b_(b), c_(c) {
    lift_ = HomogeneousQuartic({{
        {{a, {4, 0, 0}}, {1.0 + a, {1, 3, 0}}, {a - 1.0, {1, 0, 3}}},
        {{b - 1.0, {3, 1, 0}}, {b, {0, 4, 0}}, {1.0 + b, {0, 1, 3}}},
        {{1.0 + c, {3, 0, 1}}, {c - 1.0, {0, 3, 1}}, {c, {0, 0, 4}}},
    }});
  }

  /// True off the seven hyperplanes abc(a+b+c)(a+1-b)(b+1-c)(c+1-a) = 0.
  static bool well_defined(Complex a, Complex b, Complex c) {
    return a * b * c * (a + b + c) * (a + 1.0 - b) * (b + 1.0 - c) * (c + 1.0 - a) != Complex(0);
  }
  bool well_defined() const { return well_defined(a_, b_, c_); }

  const HomogeneousQuartic& lift() const { return lift_; }

  /// Throws NotEndomorphism when p is a common zero of the lift.
  ProjPoint eval(const ProjPoint& p) const {
    try {
      return ProjPoint::normalize(lift_(p.coords()));
    } catch (const ZeroVector&) {
      throw NotEndomorphism();
    }
  }

 private:
  Complex a_, b_, c_;
  HomogeneousQuartic lift_;
};

inline ProjPoint eval_general(Complex a, Complex b, Complex c, const ProjPoint& p) {
  return GeneralDesboves(a, b, c).eval(p);
}

/// The Lattes map g(w) = -w (w^3 + 2) / (2 w^3 + 1): the action of f_lambda on
/// Y, and on the pencil of lines through rho_0. Independent of lambda.
inline ExtComplex lattes_g(const ExtComplex& w) {
  const auto [x, z] = w.homogeneous();
  const Complex x3 = x * x * x;
  const Complex z3 = z * z * z;
  return ExtComplex::from_homogeneous(-x * (x3 + 2.0 * z3), z * (2.0 * x3 + z3));
}

/// Restriction of f_lambda to X in the coordinate t = y/z.
inline Complex restriction_X(Complex t, Complex lambda) {
  const Complex t2 = t * t;
  return (1.0 + lambda) * t + lambda * t2 * t2;
}

// Invariant curves. Residuals are taken on the canonical lift and scaled by
// the matching power of its norm.

inline bool on_fermat(const ProjPoint& p, Real tol = 1e-10) {
  const Real n = p.norm();
  return std::abs(p.x() * p.x() * p.x() + p.y() * p.y() * p.y() + p.z() * p.z() * p.z()) < tol * n * n * n;
}
inline bool on_line_X(const ProjPoint& p, Real tol = 1e-10) { return std::abs(p.x()) < tol * p.norm(); }
inline bool on_line_Y(const ProjPoint& p, Real tol = 1e-10) { return std::abs(p.y()) < tol * p.norm(); }
inline bool on_line_Z(const ProjPoint& p, Real tol = 1e-10) { return std::abs(p.z()) < tol * p.norm(); }

inline FixedPointInfo describe_fixed_point(const DesbovesMap& f, const ProjPoint& p, std::string label) {
  FixedPointInfo info;
  info.location = p;
  info.eigenvalues = eigenvalues(f.multiplier_matrix(p));
  info.stability = classify_multipliers(info.eigenvalues);
  info.label = std::move(label);
  return info;
}

/// The fixed points lying on the invariant lines: rho_0, x_0, z_0 and the
/// nine points where X, Y, Z meet the Fermat curve. Multipliers are computed
/// from the analytic differential, not tabulated.
inline std::vector<FixedPointInfo> fixed_point_catalog(Complex lambda) {
  const DesbovesMap f(lambda);
  std::vector<FixedPointInfo> out;
  out.push_back(describe_fixed_point(f, rho0(), "rho0"));
  out.push_back(describe_fixed_point(f, x0(), "x0"));
  out.push_back(describe_fixed_point(f, z0(), "z0"));
  for (int j = 0; j < 3; ++j) {
    const Complex mw = -omega(j);
    const std::string idx = std::to_string(j);
    out.push_back(describe_fixed_point(f, ProjPoint::normalize(1.0, 0.0, mw), "CnY" + idx));
    out.push_back(describe_fixed_point(f, ProjPoint::normalize(0.0, mw, 1.0), "CnX" + idx));
    out.push_back(describe_fixed_point(f, ProjPoint::normalize(1.0, mw, 0.0), "CnZ" + idx));
  }
  return out;
}

}  // namespace desboves
