#pragma once

#include <random>

#include "desboves/desboves.hpp"

namespace testing_support {

using namespace desboves;

inline ProjPoint random_point(Rng& rng) {
  std::normal_distribution<Real> g;
  return ProjPoint::normalize(Complex(g(rng), g(rng)), Complex(g(rng), g(rng)), Complex(g(rng), g(rng)));
}

inline Complex random_complex(Rng& rng) {
  std::normal_distribution<Real> g;
  return {g(rng), g(rng)};
}

// Log-uniform modulus in [rmin, rmax], uniform argument.
inline Complex random_lambda(Rng& rng, Real rmin = 0.1, Real rmax = 10) {
  std::uniform_real_distribution<Real> u(0, 1);
  return std::polar(rmin * std::pow(rmax / rmin, u(rng)), 2 * kPi * u(rng));
}

inline Triple scaled(const Triple& v, Complex s) { return {v[0] * s, v[1] * s, v[2] * s}; }

}  // namespace testing_support
