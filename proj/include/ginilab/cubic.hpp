#pragma once
// Closed-form cubic solver with Newton polish, plus branch utilities.

#include <array>
#include <cmath>
#include <complex>

#include "ginilab/params.hpp"

namespace ginilab {

// Cube root convention: principal real root for nonnegative reals; for other
// arguments, the root with maximal real part.
inline Complex cbrt_branch(Complex v) {
  if (v.imag() == 0.0 && v.real() >= 0.0) return {std::cbrt(v.real()), 0.0};
  double r = std::cbrt(std::abs(v));
  double th = std::arg(v) / 3.0;
  Complex best{0.0, 0.0};
  double best_re = -1e300;
  for (int k = 0; k < 3; ++k) {
    Complex cand = std::polar(r, th + 2.0 * kPi * k / 3.0);
    if (cand.real() > best_re) {
      best_re = cand.real();
      best = cand;
    }
  }
  return best;
}

struct CubicRoots {
  std::array<Complex, 3> roots;
  bool degenerate_discriminant = false;  // near-double root flag
};

// Roots of c3*m^3 + c2*m^2 + c1*m + c0 = 0 with c3 != 0.
// Closed form on the depressed cubic, then two Newton polish steps per root.
inline CubicRoots solve_cubic(Complex c3, Complex c2, Complex c1, Complex c0) {
  if (std::abs(c3) == 0.0) throw DomainError("solve_cubic: leading coefficient is zero");
  Complex b = c2 / c3, c = c1 / c3, d = c0 / c3;
  // m = t - b/3 gives t^3 + p t + q = 0.
  Complex p = c - b * b / 3.0;
  Complex q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  Complex disc = q * q / 4.0 + p * p * p / 27.0;
  Complex sq = std::sqrt(disc);
  // Pick the better-conditioned branch for u^3.
  Complex u3a = -q / 2.0 + sq, u3b = -q / 2.0 - sq;
  Complex u3 = (std::abs(u3a) >= std::abs(u3b)) ? u3a : u3b;
  CubicRoots out;
  double scale = std::max({std::abs(q) * std::abs(q), std::abs(p * p * p)});
  out.degenerate_discriminant = std::abs(disc) < 1e-12 * std::max(scale, 1e-300);
  if (std::abs(u3) == 0.0) {
    // Triple root.
    out.roots = {-b / 3.0, -b / 3.0, -b / 3.0};
    return out;
  }
  Complex u = cbrt_branch(u3);
  const Complex omega{-0.5, 0.5 * std::sqrt(3.0)};
  for (int k = 0; k < 3; ++k) {
    Complex uk = u;
    for (int j = 0; j < k; ++j) uk *= omega;
    Complex t = uk - p / (3.0 * uk);
    Complex m = t - b / 3.0;
    // Newton polish on the original cubic.
    for (int it = 0; it < 3; ++it) {
      Complex f = ((c3 * m + c2) * m + c1) * m + c0;
      Complex fp = (3.0 * c3 * m + 2.0 * c2) * m + c1;
      if (std::abs(fp) == 0.0) break;
      Complex step = f / fp;
      m -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(m))) break;
    }
    out.roots[k] = m;
  }
  return out;
}

inline double cubic_residual(Complex c3, Complex c2, Complex c1, Complex c0, Complex m) {
  return std::abs(((c3 * m + c2) * m + c1) * m + c0);
}

}  // namespace ginilab
