#pragma once

// The critical set C_lambda = C'_lambda u L_0 u L_1 u L_2 of f_lambda, where
// C'_lambda = {-x^3 + z^3 + lambda(4y^3 + x^3 + z^3) = 0} and L_j is the line
// through rho_0 and [1:0:omega^j].

#include <array>
#include <cmath>
#include <vector>

#include "desboves/proj_geometry.hpp"
#include "desboves/types.hpp"

namespace desboves {

/// C'_lambda cap Y: the roots of (1 + lambda) z^3 + (lambda - 1) x^3 = 0,
/// i.e. w^3 = (1 + lambda) / (1 - lambda), listed with multiplicity.
struct CriticalTraceOnY {
  Complex lambda;
  std::array<ExtComplex, 3> w;
};

inline CriticalTraceOnY critical_cubic_on_Y(Complex lambda) {
  CriticalTraceOnY out{lambda, {}};
  const Complex a = 1.0 + lambda;  // coefficient of z^3
  const Complex b = lambda - 1.0;  // coefficient of x^3
  if (b == Complex(0)) {
    out.w.fill(ExtComplex::infinity());
    return out;
  }
  if (a == Complex(0)) {
    out.w.fill(ExtComplex::finite(0));
    return out;
  }
  const Complex root = std::pow(-a / b, 1.0 / 3.0);
  for (int j = 0; j < 3; ++j) out.w[j] = ExtComplex::finite(root * omega(j));
  return out;
}

/// Inverse of the critical-trace relation: lambda = (w^3 - 1)/(w^3 + 1),
/// with w = infinity giving lambda = 1.
inline Complex lambda_for_critical_w(const ExtComplex& w, Real tol = 1e-12) {
  if (w.infinite) return 1.0;
  const Complex w3 = w.value * w.value * w.value;
  const Real scale = std::max<Real>(1.0, std::abs(w3));
  if (std::abs(w3 + 1.0) <= tol * scale) throw PoleInput();
  if (std::abs(w3 - 1.0) <= tol * scale) throw DegenerateLambda("w^3 = 1 gives lambda = 0");
  return (w3 - 1.0) / (w3 + 1.0);
}

/// Samples W = union over lambda in the disc V of C'_lambda cap Y on a
/// uniform polar grid of V (rings x spokes, n_samples points in total plus
/// the centre). lambda = 0 is skipped.
inline std::vector<ExtComplex> critical_sweep_on_Y(Complex center, Real radius, int n_samples) {
  if (!(radius > 0)) throw InvalidArgument("disc radius must be positive");
  const int rings = std::max(1, static_cast<int>(std::lround(std::sqrt(Real(std::max(1, n_samples)) / 2.0))));
  const int spokes = std::max(1, n_samples / rings);
  std::vector<Complex> lambdas{center};
  for (int r = 1; r <= rings; ++r) {
    // Stay strictly inside V.
    const Real rho = radius * (Real(r) / Real(rings + 1));
    for (int s = 0; s < spokes; ++s) lambdas.push_back(center + std::polar(rho, 2 * kPi * s / spokes));
  }
  std::vector<ExtComplex> out;
  for (const auto& l : lambdas) {
    if (l == Complex(0)) continue;
    for (const auto& w : critical_cubic_on_Y(l).w) out.push_back(w);
  }
  return out;
}

enum class CriticalComponent { None, Cubic, L0, L1, L2 };

inline const char* to_string(CriticalComponent c) {
  switch (c) {
    case CriticalComponent::None: return "none";
    case CriticalComponent::Cubic: return "cubic";
    case CriticalComponent::L0: return "L0";
    case CriticalComponent::L1: return "L1";
    case CriticalComponent::L2: return "L2";
  }
  return "?";
}

/// Value of the cubic factor of the Jacobian at a lift.
inline Complex critical_cubic(Complex lambda, const Triple& v) {
  const Complex x3 = v[0] * v[0] * v[0];
  const Complex y3 = v[1] * v[1] * v[1];
  const Complex z3 = v[2] * v[2] * v[2];
  return -x3 + z3 + lambda * (4.0 * y3 + x3 + z3);
}

/// Which factor of the Jacobian vanishes at p; the cubic is tested first.
inline CriticalComponent on_critical_set(Complex lambda, const ProjPoint& p, Real tol = 1e-10) {
  const Real n = p.norm();
  const Real cubic_scale = (2.0 + 6.0 * std::abs(lambda)) * n * n * n;
  if (std::abs(critical_cubic(lambda, p.coords())) < tol * cubic_scale) return CriticalComponent::Cubic;
  for (int j = 0; j < 3; ++j) {
    if (std::abs(p.x() - omega(j) * p.z()) < tol * 2.0 * n) return static_cast<CriticalComponent>(2 + j);
  }
  return CriticalComponent::None;
}

}  // namespace desboves
