#pragma once

#include <array>
#include <utility>

#include "desboves/types.hpp"

namespace desboves {

using Mat2 = std::array<std::array<Complex, 2>, 2>;
using Mat3 = std::array<std::array<Complex, 3>, 3>;

inline Complex det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Complex det(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline Mat2 identity2() { return Mat2{{{Complex(1), Complex(0)}, {Complex(0), Complex(1)}}}; }

/// Solves m * x = rhs. Returns false when m is numerically singular.
inline bool solve2(const Mat2& m, const std::array<Complex, 2>& rhs, std::array<Complex, 2>& x) {
  const Complex d = det(m);
  const Real scale = std::abs(m[0][0]) * std::abs(m[1][1]) + std::abs(m[0][1]) * std::abs(m[1][0]);
  if (!(std::abs(d) > 1e-300) || std::abs(d) <= 1e-14 * scale) return false;
  x[0] = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d;
  x[1] = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / d;
  return true;
}

/// Eigenvalues of a 2x2 complex matrix, larger modulus first.
inline std::array<Complex, 2> eigenvalues(const Mat2& m) {
  const Complex tr = m[0][0] + m[1][1];
  const Complex half_diff = 0.5 * (m[0][0] - m[1][1]);
  const Complex disc = std::sqrt(half_diff * half_diff + m[0][1] * m[1][0]);
  Complex big = 0.5 * tr + (std::real(std::conj(tr) * disc) >= 0 ? disc : -disc);
  // The smaller one through the determinant avoids cancellation.
  Complex small = std::abs(big) > 0 ? det(m) / big : Complex(0);
  if (std::abs(small) > std::abs(big)) std::swap(big, small);
  return {big, small};
}

}  // namespace desboves
