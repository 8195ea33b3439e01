#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace desboves {

// Single place to swap the scalar type (e.g. for a double-double experiment).
using Real = double;
using Complex = std::complex<Real>;
using Triple = std::array<Complex, 3>;

inline constexpr Real kPi = 3.14159265358979323846;

/// Primitive cube root of unity, exp(2 pi i / 3).
inline Complex omega(int power = 1) {
  const int k = ((power % 3) + 3) % 3;
  if (k == 0) return {1.0, 0.0};
  const Real s = std::sqrt(3.0) / 2.0;
  return k == 1 ? Complex(-0.5, s) : Complex(-0.5, -s);
}

// ---------------------------------------------------------------------------
// Errors. Every failure mode that callers are expected to branch on has its
// own type; all derive from desboves::Error.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector has no projective class") {}
};

class AtPencilCenter : public Error {
 public:
  AtPencilCenter() : Error("projection along the pencil is undefined at [0:1:0]") {}
};

class ChartOverflow : public Error {
 public:
  ChartOverflow() : Error("dehomogenizing coordinate is zero") {}
};

class IndeterminacyHit : public Error {
 public:
  IndeterminacyHit() : Error("point of indeterminacy of the degenerate map") {}
};

class NotEndomorphism : public Error {
 public:
  NotEndomorphism() : Error("common zero of the lift: coefficients are not an endomorphism") {}
};

class DegenerateLambda : public Error {
 public:
  explicit DegenerateLambda(const std::string& what = "parameter must be nonzero") : Error(what) {}
};

class PoleInput : public Error {
 public:
  PoleInput() : Error("w^3 = -1 is a pole of the critical-trace inversion") {}
};

class SolverDiverged : public Error {
 public:
  explicit SolverDiverged(const std::string& what = "polynomial root solver failed to converge")
      : Error(what) {}
};

class DegenerateFiber : public Error {
 public:
  DegenerateFiber() : Error("inconsistent scale between base and fiber equations") {}
};

class ExceptionalPoint : public Error {
 public:
  ExceptionalPoint() : Error("backward orbit of the exceptional point [0:1:0] is trivial") {}
};

class NotPeriodic : public Error {
 public:
  explicit NotPeriodic(const std::string& what = "no periodic point found near the seed")
      : Error(what) {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace desboves
