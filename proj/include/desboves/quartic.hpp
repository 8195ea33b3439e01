#pragma once

// Roots of complex polynomials of degree <= 4.
//
// Primary path: Aberth-Ehrlich simultaneous iteration on the deflated
// polynomial, then Newton polishing of simple roots and merging of clustered
// roots into multiple roots. If that does not reach the residual target the
// Ferrari/Cardano closed form is tried before giving up.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "desboves/types.hpp"

namespace desboves {

struct PolyRoot {
  Complex value;
  int multiplicity = 1;
};

struct QuarticRoots {
  std::vector<PolyRoot> roots;    // finite roots
  int infinite_multiplicity = 0;  // degree lost to vanishing leading coefficients
  /// max |p(r)| / (max|c_i| * max(1,|r|)^4) over finite roots.
  Real residual = 0;

  int total_multiplicity() const {
    int n = infinite_multiplicity;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }

  /// Finite roots repeated according to multiplicity.
  std::vector<Complex> expanded() const {
    std::vector<Complex> out;
    for (const auto& r : roots)
      for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.value);
    return out;
  }
};

namespace detail {

// Coefficients are stored highest degree first.
using Poly = std::vector<Complex>;

inline Complex horner(const Poly& p, Complex z) {
  Complex v = p[0];
  for (std::size_t i = 1; i < p.size(); ++i) v = v * z + p[i];
  return v;
}

inline void horner2(const Poly& p, Complex z, Complex& value, Complex& deriv) {
  value = p[0];
  deriv = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    deriv = deriv * z + value;
    value = value * z + p[i];
  }
}

/// Sum of |a_k| |z|^k: the scale against which |p(z)| is judged.
inline Real magnitude_bound(const Poly& p, Real az) {
  Real v = std::abs(p[0]);
  for (std::size_t i = 1; i < p.size(); ++i) v = v * az + std::abs(p[i]);
  return v;
}

inline std::array<Complex, 2> quadratic_roots(Complex a, Complex b, Complex c) {
  const Complex disc = std::sqrt(b * b - 4.0 * a * c);
  // Choose the sign that avoids cancellation.
  const Complex q = -0.5 * (std::real(std::conj(b) * disc) >= 0 ? b + disc : b - disc);
  if (q == Complex(0)) return {Complex(0), Complex(0)};
  return {q / a, c / q};
}

/// Roots of the monic cubic z^3 + a z^2 + b z + c (Cardano).
inline std::array<Complex, 3> cubic_roots(Complex a, Complex b, Complex c) {
  const Complex p = b - a * a / 3.0;
  const Complex q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  Complex u3 = -q / 2.0 + disc;
  const Complex alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  std::array<Complex, 3> t;
  if (u3 == Complex(0)) {
    t = {Complex(0), Complex(0), Complex(0)};
  } else {
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex v = -p / (3.0 * u);
    const Real s = std::sqrt(3.0) / 2.0;
    const Complex w1(-0.5, s), w2(-0.5, -s);
    t = {u + v, w1 * u + w2 * v, w2 * u + w1 * v};
  }
  for (auto& r : t) r -= a / 3.0;
  return t;
}

/// Closed-form roots for degree 1..4 (Ferrari for quartics).
inline std::vector<Complex> closed_form_roots(const Poly& p) {
  const int n = static_cast<int>(p.size()) - 1;
  const Complex lead = p[0];
  std::vector<Complex> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = p[i] / lead;
  switch (n) {
    case 1: return {-m[1]};
    case 2: {
      auto r = quadratic_roots(1.0, m[1], m[2]);
      return {r[0], r[1]};
    }
    case 3: {
      auto r = cubic_roots(m[1], m[2], m[3]);
      return {r[0], r[1], r[2]};
    }
    case 4: {
      const Complex b = m[1], c = m[2], d = m[3], e = m[4];
      const Complex b2 = b * b;
      const Complex pp = c - 3.0 * b2 / 8.0;
      const Complex qq = d - b * c / 2.0 + b2 * b / 8.0;
      const Complex rr = e - b * d / 4.0 + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;
      std::vector<Complex> ys;
      const Real scale = 1.0 + std::abs(pp) + std::abs(rr);
      if (std::abs(qq) <= 1e-14 * scale) {
        auto u = quadratic_roots(1.0, pp, rr);
        for (const auto& ui : u) {
          const Complex s = std::sqrt(ui);
          ys.push_back(s);
          ys.push_back(-s);
        }
      } else {
        auto ms = cubic_roots(pp, pp * pp / 4.0 - rr, -qq * qq / 8.0);
        Complex mm = ms[0];
        for (const auto& cand : ms)
          if (std::abs(cand) > std::abs(mm)) mm = cand;
        const Complex s = std::sqrt(2.0 * mm);
        auto r1 = quadratic_roots(1.0, -s, pp / 2.0 + mm + qq / (2.0 * s));
        auto r2 = quadratic_roots(1.0, s, pp / 2.0 + mm - qq / (2.0 * s));
        ys = {r1[0], r1[1], r2[0], r2[1]};
      }
      for (auto& y : ys) y -= b / 4.0;
      return ys;
    }
    default: return {};
  }
}

/// Aberth-Ehrlich iteration. Returns false if the iteration budget ran out.
inline bool aberth(const Poly& p, std::vector<Complex>& z, int max_iter = 120) {
  const int n = static_cast<int>(p.size()) - 1;
  const Real r = std::pow(std::abs(p[n] / p[0]), 1.0 / n);
  z.resize(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(r, 2 * kPi * k / n + 0.4);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool done = true;
    for (int k = 0; k < n; ++k) {
      Complex v, dv;
      horner2(p, z[k], v, dv);
      if (v == Complex(0)) continue;
      Complex sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += Complex(1) / (z[k] - z[j]);
      const Complex ratio = v / dv;
      Complex corr = ratio / (Complex(1) - ratio * sum);
      if (!std::isfinite(std::abs(corr))) corr = Complex(1e-8 * (1 + std::abs(z[k])), 0);
      z[k] -= corr;
      if (std::abs(corr) > 4e-16 * std::abs(z[k])) done = false;
    }
    if (done) return true;
  }
  return false;
}

inline Complex polish_newton(const Poly& p, Complex z, int steps = 3) {
  Complex v, dv;
  horner2(p, z, v, dv);
  for (int i = 0; i < steps && v != Complex(0) && dv != Complex(0); ++i) {
    const Complex cand = z - v / dv;
    Complex cv, cdv;
    horner2(p, cand, cv, cdv);
    if (!(std::abs(cv) < std::abs(v))) break;
    z = cand;
    v = cv;
    dv = cdv;
  }
  return z;
}

/// k-th derivative; coefficients highest degree first, like p.
inline Poly derivative(Poly p, int k) {
  for (int r = 0; r < k && p.size() > 1; ++r) {
    const int n = static_cast<int>(p.size()) - 1;
    Poly d(n);
    for (int i = 0; i < n; ++i) d[i] = p[i] * Real(n - i);
    p = std::move(d);
  }
  return p;
}

/// Taylor coefficients of p at c: p(c + h) = sum_j t_j h^j, t ordered by j.
inline std::vector<Complex> taylor_at(Poly p, Complex c) {
  const int n = static_cast<int>(p.size()) - 1;
  std::vector<Complex> t(n + 1);
  for (int j = 0; j <= n; ++j) {
    // Synthetic division by (z - c); the remainder is the next coefficient.
    Complex acc = p[0];
    Poly q;
    q.reserve(p.size());
    q.push_back(acc);
    for (std::size_t i = 1; i < p.size(); ++i) {
      acc = acc * c + p[i];
      q.push_back(acc);
    }
    t[j] = q.back();
    q.pop_back();
    p = std::move(q);
    if (p.empty()) break;
  }
  return t;
}

inline Real binom(int n, int k) {
  Real r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// True when p behaves like (z - c)^m q(z) near c: the low Taylor
/// coefficients vanish relative to their magnitude bound.
inline bool is_multiple_root(const Poly& p, Complex c, int m, Real tol = 1e-6) {
  const int n = static_cast<int>(p.size()) - 1;
  const auto t = taylor_at(p, c);
  const Real ac = std::abs(c);
  for (int j = 0; j < m; ++j) {
    Real bound = 0;
    for (int k = j; k <= n; ++k) bound += std::abs(p[n - k]) * binom(k, j) * std::pow(ac, k - j);
    if (std::abs(t[j]) > tol * bound) return false;
  }
  return true;
}

inline Real scaled_residual(const Poly& p, Complex z, int degree) {
  const Real s = std::max<Real>(1.0, std::abs(z));
  return std::abs(horner(p, z)) / std::pow(s, degree);
}

/// Groups numerically coincident roots. A cluster is accepted only if the
/// polynomial really has a root of that multiplicity at its centroid and the
/// centroid itself passes the residual test; a split cluster of nearby simple
/// roots stays split.
inline std::vector<PolyRoot> cluster_roots(const Poly& p, const std::vector<Complex>& z, Real tol) {
  const int n = static_cast<int>(z.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Real s = std::max({Real(1), std::abs(z[i]), std::abs(z[j])});
      if (std::abs(z[i] - z[j]) <= 2e-3 * s) parent[find(i)] = find(j);
    }
  std::vector<PolyRoot> out;
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<int> members;
    for (int j = i; j < n; ++j)
      if (!used[j] && find(j) == find(i)) members.push_back(j);
    for (int j : members) used[j] = true;
    if (members.size() == 1) {
      out.push_back({z[i], 1});
      continue;
    }
    Complex c = 0;
    for (int j : members) c += z[j];
    c /= Real(members.size());
    // A root of multiplicity m is a simple root of the (m-1)-th derivative.
    c = polish_newton(derivative(p, static_cast<int>(members.size()) - 1), c, 4);
    if (is_multiple_root(p, c, static_cast<int>(members.size())) &&
        scaled_residual(p, c, static_cast<int>(p.size()) - 1) < tol) {
      out.push_back({c, static_cast<int>(members.size())});
    } else {
      for (int j : members) out.push_back({z[j], 1});
    }
  }
  return out;
}

}  // namespace detail

/// Roots of c4 w^4 + c3 w^3 + c2 w^2 + c1 w + c0.
inline QuarticRoots quartic_roots(Complex c4, Complex c3, Complex c2, Complex c1, Complex c0,
                                  Real tol = 1e-10) {
  using detail::Poly;
  const std::array<Complex, 5> raw{c4, c3, c2, c1, c0};
  Real scale = 0;
  for (const auto& c : raw) scale = std::max(scale, std::abs(c));
  if (!(scale > 0)) throw InvalidArgument("all polynomial coefficients are zero");
  Poly full(5);
  for (int i = 0; i < 5; ++i) full[i] = raw[i] / scale;

  QuarticRoots out;
  int lead = 0;
  while (lead < 5 && full[lead] == Complex(0)) ++lead;
  out.infinite_multiplicity = lead;
  int tail = 4;
  int zero_mult = 0;
  while (tail > lead && full[tail] == Complex(0)) {
    --tail;
    ++zero_mult;
  }
  if (zero_mult > 0) out.roots.push_back({Complex(0), zero_mult});
  const Poly core(full.begin() + lead, full.begin() + tail + 1);
  const int n = static_cast<int>(core.size()) - 1;
  if (n <= 0) return out;

  auto finish = [&](std::vector<Complex> z) {
    for (auto& r : z) r = detail::polish_newton(core, r);
    auto clustered = n >= 2 ? detail::cluster_roots(core, z, tol) : std::vector<PolyRoot>{{z[0], 1}};
    Real res = 0;
    for (const auto& r : clustered) res = std::max(res, detail::scaled_residual(full, r.value, 4));
    return std::make_pair(clustered, res);
  };

  std::vector<Complex> z;
  if (n <= 2) {
    z = detail::closed_form_roots(core);
  } else {
    detail::aberth(core, z);
  }
  auto [roots, res] = finish(z);
  if (!(res < tol) && n >= 3) {
    auto [alt_roots, alt_res] = finish(detail::closed_form_roots(core));
    if (alt_res < res) {
      roots = std::move(alt_roots);
      res = alt_res;
    }
  }
  if (!(res < tol)) throw SolverDiverged();
  for (const auto& r : roots) out.roots.push_back(r);
  out.residual = res;
  return out;
}

}  // namespace desboves
