#pragma once

// Homogeneous-coordinate arithmetic on P^2(C).

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "desboves/types.hpp"

namespace desboves {

namespace tolerance {

inline Real& projective_storage() {
  static Real value = 1e-10;
  return value;
}

/// Chordal distance below which two points count as the same point of P^2.
/// Set once at startup (the CLI exposes it); read everywhere else.
inline Real projective() { return projective_storage(); }
inline void set_projective(Real tol) { projective_storage() = tol; }

}  // namespace tolerance

/// A point of P^2 held in canonical form: the coordinate of largest modulus
/// (lowest index on ties) is exactly 1, so every coordinate lies in the
/// closed unit disc.
class ProjPoint {
 public:
  /// Throws ZeroVector for (0,0,0) or non-finite input.
  static ProjPoint normalize(const Triple& raw) {
    int pivot = 0;
    Real best = std::abs(raw[0]);
    for (int i = 1; i < 3; ++i) {
      const Real m = std::abs(raw[i]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (!(best > 0) || !std::isfinite(best)) throw ZeroVector();
    Triple c;
    const Complex inv = Complex(1) / raw[pivot];
    for (int i = 0; i < 3; ++i) c[i] = (i == pivot) ? Complex(1) : raw[i] * inv;
    return ProjPoint(c, pivot);
  }

  static ProjPoint normalize(Complex a, Complex b, Complex c) { return normalize(Triple{a, b, c}); }

  const Triple& coords() const { return c_; }
  const Complex& operator[](std::size_t i) const { return c_[i]; }
  const Complex& x() const { return c_[0]; }
  const Complex& y() const { return c_[1]; }
  const Complex& z() const { return c_[2]; }

  /// Index of the coordinate that equals 1.
  int pivot() const { return pivot_; }

  Real norm() const { return std::sqrt(std::norm(c_[0]) + std::norm(c_[1]) + std::norm(c_[2])); }

  /// Lift of Euclidean length one.
  Triple unit_lift() const {
    const Real inv = 1.0 / norm();
    return {c_[0] * inv, c_[1] * inv, c_[2] * inv};
  }

 private:
  ProjPoint(const Triple& c, int pivot) : c_(c), pivot_(pivot) {}

  Triple c_;
  int pivot_;
};

inline ProjPoint normalize(const Triple& raw) { return ProjPoint::normalize(raw); }

/// rho_0 = [0:1:0], the superattracting fixed point and centre of the pencil.
inline ProjPoint rho0() { return ProjPoint::normalize(0.0, 1.0, 0.0); }
/// x_0 = [0:0:1] = X cap Y.
inline ProjPoint x0() { return ProjPoint::normalize(0.0, 0.0, 1.0); }
/// z_0 = [1:0:0] = Z cap Y.
inline ProjPoint z0() { return ProjPoint::normalize(1.0, 0.0, 0.0); }

/// Fubini-Study chordal distance: the norm of the cross product of unit
/// lifts, i.e. sin of the angle between the two complex lines. Values in
/// [0,1].
inline Real chordal_distance(const ProjPoint& p, const ProjPoint& q) {
  const Triple u = p.unit_lift();
  const Triple v = q.unit_lift();
  const Complex c0 = u[1] * v[2] - u[2] * v[1];
  const Complex c1 = u[2] * v[0] - u[0] * v[2];
  const Complex c2 = u[0] * v[1] - u[1] * v[0];
  return std::min<Real>(1.0, std::sqrt(std::norm(c0) + std::norm(c1) + std::norm(c2)));
}

inline bool approx_equal(const ProjPoint& p, const ProjPoint& q, Real tol = tolerance::projective()) {
  return chordal_distance(p, q) < tol;
}

inline bool operator==(const ProjPoint& p, const ProjPoint& q) { return approx_equal(p, q); }

/// Projection along the pencil of lines through rho_0 onto Y = {y = 0}.
inline ProjPoint project_pencil(const ProjPoint& p) {
  if (chordal_distance(p, rho0()) < tolerance::projective()) throw AtPencilCenter();
  return ProjPoint::normalize(p.x(), 0.0, p.z());
}

// ---------------------------------------------------------------------------
// Affine charts. Chart k is {coordinate k = 1}; the two affine coordinates are
// the remaining homogeneous coordinates in increasing index order, so the
// Z-chart gives (u, v) = (x/z, y/z): u is the w-coordinate on Y and v the
// t-coordinate on X.
// ---------------------------------------------------------------------------

enum class Chart { X = 0, Y = 1, Z = 2 };

inline std::array<int, 2> chart_axes(Chart c) {
  switch (c) {
    case Chart::X: return {1, 2};
    case Chart::Y: return {0, 2};
    case Chart::Z: return {0, 1};
  }
  return {0, 1};
}

struct ChartCoord {
  Chart chart = Chart::Z;
  Complex u;
  Complex v;
};

inline ChartCoord to_chart(const ProjPoint& p, Chart chart) {
  const int k = static_cast<int>(chart);
  if (p[k] == Complex(0)) throw ChartOverflow();
  const auto ax = chart_axes(chart);
  return {chart, p[ax[0]] / p[k], p[ax[1]] / p[k]};
}

inline ProjPoint from_chart(const ChartCoord& c) {
  Triple raw;
  const auto ax = chart_axes(c.chart);
  raw[static_cast<int>(c.chart)] = 1.0;
  raw[ax[0]] = c.u;
  raw[ax[1]] = c.v;
  return ProjPoint::normalize(raw);
}

// ---------------------------------------------------------------------------
// The Riemann sphere Y, coordinatised by w = x/z (w = infinity at z_0).
// ---------------------------------------------------------------------------

struct ExtComplex {
  Complex value{};
  bool infinite = false;

  static ExtComplex finite(Complex w) { return {w, false}; }
  static ExtComplex infinity() { return {Complex(0), true}; }

  /// Homogeneous pair (x, z) with max(|x|, |z|) = 1.
  std::pair<Complex, Complex> homogeneous() const {
    if (infinite) return {Complex(1), Complex(0)};
    if (std::abs(value) <= 1.0) return {value, Complex(1)};
    return {Complex(1), Complex(1) / value};
  }

  static ExtComplex from_homogeneous(Complex x, Complex z) {
    if (z == Complex(0)) {
      if (x == Complex(0)) throw ZeroVector();
      return infinity();
    }
    return finite(x / z);
  }
};

/// Chordal distance on the Riemann sphere, compatible with chordal_distance
/// on P^2 for points of Y.
inline Real sphere_distance(const ExtComplex& a, const ExtComplex& b) {
  const auto [ax, az] = a.homogeneous();
  const auto [bx, bz] = b.homogeneous();
  const Real na = std::sqrt(std::norm(ax) + std::norm(az));
  const Real nb = std::sqrt(std::norm(bx) + std::norm(bz));
  return std::abs(ax * bz - az * bx) / (na * nb);
}

inline ExtComplex w_coordinate(const ProjPoint& p) { return ExtComplex::from_homogeneous(p.x(), p.z()); }

inline ProjPoint point_on_Y(const ExtComplex& w) {
  const auto [x, z] = w.homogeneous();
  return ProjPoint::normalize(x, 0.0, z);
}

}  // namespace desboves
