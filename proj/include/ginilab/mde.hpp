#pragma once
// Scalar self-consistent (Dyson) equations for the spectral density of
// Y^z = (X - z)(X - z)^* and of its Hermitization, plus spectral edges,
// square-root edge slopes, saddle points and the critical scale.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ginilab/cubic.hpp"
#include "ginilab/params.hpp"

namespace ginilab {

struct StieltjesValue {
  Complex m{0.0, 0.0};
  double residual = 0.0;
  bool degenerate_discriminant = false;
};

struct EdgeData {
  double e_minus = 0.0;  // valid only when has_minus
  double e_plus = 0.0;
  double gamma_minus = 0.0;  // valid only when has_minus
  double gamma_plus = 0.0;
  bool has_minus = false;
};

enum class SaddleRegime { below_e_minus, bulk, above_e_plus };

struct SaddlePoint {
  Complex x_star{0.0, 0.0};
  Complex second_derivative{0.0, 0.0};
  SaddleRegime regime_tag = SaddleRegime::bulk;
  bool degenerate_discriminant = false;
};

namespace detail {
inline constexpr double kResidualTol = 1e-12;
inline constexpr double kEdgeBand = 1e-12;
}  // namespace detail

// Support edges and square-root slope coefficients as functions of delta.
inline EdgeData edges(double delta) {
  if (delta >= 1.0 - 1e-14) throw DomainError("edges: requires delta < 1");
  double s = std::sqrt(9.0 - 8.0 * delta);
  EdgeData ed;
  ed.e_plus = (8.0 * delta * delta + s * s * s - 36.0 * delta + 27.0) / (8.0 * (1.0 - delta));
  ed.gamma_plus = 2.0 * std::sqrt(2.0) * std::pow(s + 1.0, 1.5) /
                  (std::pow(s + 3.0, 2.5) * std::sqrt(s));
  if (delta < 0.0) {
    ed.has_minus = true;
    ed.e_minus = (8.0 * delta * delta - s * s * s - 36.0 * delta + 27.0) / (8.0 * (1.0 - delta));
    ed.gamma_minus = 2.0 * std::sqrt(2.0) * std::pow(s - 1.0, 1.5) /
                     (std::pow(s - 3.0, 2.5) * std::sqrt(s));
  }
  return ed;
}

// Value of the Stieltjes transform exactly at a spectral edge.
inline double edge_m_value(double delta, bool plus) {
  double s = std::sqrt(9.0 - 8.0 * delta);
  return plus ? -2.0 / (3.0 + s) : -2.0 / (3.0 - s);
}

// Unique root of 1 + r*Psi + Psi^3 = 0 with positive real and imaginary part.
inline Complex psi(double r) {
  if (r < 0.0) throw DomainError("psi: requires r >= 0");
  CubicRoots cr = solve_cubic({1.0, 0.0}, {0.0, 0.0}, {r, 0.0}, {1.0, 0.0});
  for (const Complex& t : cr.roots) {
    if (t.real() > 0.0 && t.imag() > 0.0) return t;
  }
  throw NoConvergence("psi: no root in the open first quadrant");
}

// Critical spectral scale c(N, z) = min(N^{-3/2}, 1/(N^2 |delta|)).
inline double scale_c(const ShiftParams& p) {
  double a = std::pow(static_cast<double>(p.N), -1.5);
  double ad = std::abs(p.delta());
  if (ad == 0.0) return a;
  return std::min(a, 1.0 / (static_cast<double>(p.N) * p.N * ad));
}

namespace detail {

// Newton polish of the cubic w m^3 + 2 w m^2 + (w + delta) m + 1 at fixed w.
inline Complex polish_y(Complex m, Complex w, double delta, int iters = 6) {
  for (int i = 0; i < iters; ++i) {
    Complex f = ((w * m + 2.0 * w) * m + (w + delta)) * m + 1.0;
    Complex fp = (3.0 * w * m + 4.0 * w) * m + (w + delta);
    if (std::abs(fp) == 0.0) break;
    m -= f / fp;
  }
  return m;
}

inline double residual_y(Complex m, Complex w, double delta) {
  return std::abs(((w * m + 2.0 * w) * m + (w + delta)) * m + 1.0);
}

}  // namespace detail

// Boundary value m^z(E + i0) for real E via closed-form roots and branch
// selection; Newton-polished.
inline StieltjesValue solve_mde_y(double E, const ShiftParams& p) {
  double delta = p.delta();
  EdgeData ed = edges(delta);
  double lo = ed.has_minus ? ed.e_minus : 0.0;
  double band = detail::kEdgeBand * std::max(1.0, ed.e_plus);

  StieltjesValue out;
  Complex w{E, 0.0};

  // Exact edge values (double-root points of the cubic).
  if (std::abs(E - ed.e_plus) < band) {
    out.m = {edge_m_value(delta, true), 0.0};
    out.degenerate_discriminant = true;
    out.residual = detail::residual_y(out.m, w, delta);
    return out;
  }
  if (ed.has_minus && std::abs(E - ed.e_minus) < band) {
    out.m = {edge_m_value(delta, false), 0.0};
    out.degenerate_discriminant = true;
    out.residual = detail::residual_y(out.m, w, delta);
    return out;
  }
  if (E == 0.0) {
    // Degenerate leading coefficient: the cubic collapses to delta*m + 1 = 0.
    if (delta == 0.0) throw DomainError("solve_mde_y: E = 0 with delta = 0 is singular");
    out.m = {-1.0 / delta, 0.0};
    out.residual = std::abs(delta * out.m + 1.0);
    return out;
  }

  CubicRoots cr = solve_cubic(w, 2.0 * w, w + delta, {1.0, 0.0});
  out.degenerate_discriminant = cr.degenerate_discriminant;

  auto finish = [&](Complex m) {
    m = detail::polish_y(m, w, delta);
    out.m = m;
    out.residual = detail::residual_y(m, w, delta);
    if (out.residual > 1e-9) throw NoConvergence("solve_mde_y: residual too large");
    return out;
  };

  if (E > lo && E < ed.e_plus) {
    // Inside the support: the unique root in the open upper half-plane.
    Complex best = cr.roots[0];
    for (const Complex& r : cr.roots)
      if (r.imag() > best.imag()) best = r;
    if (best.imag() <= 0.0) {
      // Within numerical resolution of an edge: snap to the closer edge value.
      bool plus = (ed.e_plus - E) < (E - lo) || !ed.has_minus;
      return finish({edge_m_value(delta, plus), 0.0});
    }
    return finish(best);
  }

  // Real branches: collect (numerically) real roots.
  std::vector<double> reals;
  for (const Complex& r : cr.roots)
    if (std::abs(r.imag()) < 1e-8 * std::max(1.0, std::abs(r))) reals.push_back(r.real());

  double tol = 1e-9;
  if (E >= ed.e_plus) {
    // Right of the support: the real root between the edge value and 0.
    double xe = edge_m_value(delta, true);
    for (double r : reals)
      if (r > xe - tol && r < 0.0) return finish({r, 0.0});
    throw NoConvergence("solve_mde_y: no admissible root right of the support");
  }
  if (ed.has_minus && E > 0.0 && E <= ed.e_minus) {
    // Inside the gap: the real root between 0 and the lower edge value.
    double xe = edge_m_value(delta, false);
    for (double r : reals)
      if (r > 0.0 && r < xe + tol) return finish({r, 0.0});
    throw NoConvergence("solve_mde_y: no admissible root in the gap");
  }
  // E < 0: Stieltjes transform at w = E below the support,
  // m = int rho(s)/(s - E) ds in (1/(e_plus - E), 1/(lo - E)).
  {
    double lo_b = 1.0 / (ed.e_plus - E) - 1e-12;
    double hi_b = (lo - E > 0.0) ? 1.0 / (lo - E) + 1e-9
                                 : std::numeric_limits<double>::infinity();
    double cap = ed.has_minus ? edge_m_value(delta, false) + 1e-9
                              : std::numeric_limits<double>::infinity();
    for (double r : reals)
      if (r > lo_b && r < hi_b && r < cap) return finish({r, 0.0});
    throw NoConvergence("solve_mde_y: no admissible root below the support");
  }
}

namespace detail {

// Continuation-Newton solve of a parametric cubic along a vertical path in w,
// starting from the trivial large-|w| branch m ~ -1/w.
template <class Coeffs>
inline Complex continuation_solve(Complex w, Coeffs coeffs) {
  double L = 10.0 * std::max({1.0, std::abs(w)});
  double target = std::max(w.imag(), 0.0);
  double tiny = 1e-9 * std::max(1.0, std::abs(w));
  Complex m = -1.0 / (w + Complex{0.0, L});
  const int steps = 60;
  for (int j = 0; j <= steps; ++j) {
    double s = L * std::pow(tiny / L, static_cast<double>(j) / steps);
    double im_off = std::max(target, s) - w.imag();
    Complex wj = w + Complex{0.0, im_off};
    auto [c3, c2, c1, c0] = coeffs(wj);
    for (int it = 0; it < 3; ++it) {
      Complex f = ((c3 * m + c2) * m + c1) * m + c0;
      Complex fp = (3.0 * c3 * m + 2.0 * c2) * m + c1;
      if (std::abs(fp) == 0.0) break;
      m -= f / fp;
    }
  }
  auto [c3, c2, c1, c0] = coeffs(w);
  for (int it = 0; it < 6; ++it) {
    Complex f = ((c3 * m + c2) * m + c1) * m + c0;
    Complex fp = (3.0 * c3 * m + 2.0 * c2) * m + c1;
    if (std::abs(fp) == 0.0) break;
    m -= f / fp;
  }
  return m;
}

}  // namespace detail

// m^z(w) for complex w in the open upper half-plane.
inline StieltjesValue solve_mde_y_w(Complex w, const ShiftParams& p) {
  if (w.imag() <= 0.0)
    throw DomainError("solve_mde_y_w: requires Im w > 0 (use solve_mde_y for boundary values)");
  double delta = p.delta();
  auto coeffs = [delta](Complex v) {
    return std::tuple<Complex, Complex, Complex, Complex>{v, 2.0 * v, v + delta, Complex{1.0, 0.0}};
  };
  Complex m = detail::continuation_solve(w, coeffs);
  StieltjesValue out;
  out.m = m;
  out.residual = detail::residual_y(m, w, delta);
  if (out.residual > 1e-9 || m.imag() <= 0.0)
    throw NoConvergence("solve_mde_y_w: continuation failed");
  return out;
}

// Stieltjes transform of the Hermitization: root of
// m^3 + 2 w m^2 + (w^2 + delta) m + w = 0 with Im m > 0 for Im w > 0.
inline StieltjesValue solve_mde_h(Complex w, const ShiftParams& p) {
  if (w.imag() <= 0.0) throw DomainError("solve_mde_h: requires Im w > 0");
  double delta = p.delta();
  auto coeffs = [delta](Complex v) {
    return std::tuple<Complex, Complex, Complex, Complex>{
        Complex{1.0, 0.0}, 2.0 * v, v * v + delta, v};
  };
  Complex m = detail::continuation_solve(w, coeffs);
  StieltjesValue out;
  out.m = m;
  out.residual = std::abs(((m + 2.0 * w) * m + (w * w + delta)) * m + w);
  if (out.residual > 1e-9 || m.imag() <= 0.0)
    throw NoConvergence("solve_mde_h: continuation failed");
  return out;
}

// Boundary value m_H(E + i0) on the real line via m_H(v) = v m^z(v^2).
inline StieltjesValue solve_mde_h_boundary(double E, const ShiftParams& p) {
  double a = std::abs(E);
  if (a == 0.0) {
    // Limit of v m^z(v^2 + i0) as v -> 0: i sqrt(delta) for delta > 0, else 0.
    StieltjesValue out;
    out.m = Complex{0.0, std::sqrt(std::max(p.delta(), 0.0))};
    return out;
  }
  StieltjesValue y = solve_mde_y(a * a, p);
  StieltjesValue out;
  out.m = a * y.m;
  if (E < 0.0) out.m = -std::conj(out.m);
  out.residual = y.residual;
  out.degenerate_discriminant = y.degenerate_discriminant;
  return out;
}

// Spectral density of Y^z at real energy E.
inline double density(double E, const ShiftParams& p) {
  double delta = p.delta();
  EdgeData ed = edges(delta);
  double lo = ed.has_minus ? ed.e_minus : 0.0;
  if (E < lo || E > ed.e_plus) return 0.0;
  if (E == 0.0 && delta > 0.0) return std::numeric_limits<double>::infinity();
  StieltjesValue v = solve_mde_y(E, p);
  return std::max(0.0, v.m.imag()) / kPi;
}

// Second derivative of the contour phase f(x) = log((1+x)/x) - |z|^2/(1+x) - w x.
inline Complex phase_fpp(Complex x, double abs_z2) {
  Complex opx = 1.0 + x;
  return -1.0 / (opx * opx) + 1.0 / (x * x) - 2.0 * abs_z2 / (opx * opx * opx);
}

// Saddle point of the contour phase at real energy E: x_* = m^z(E + i0).
inline SaddlePoint saddle_point(double E, const ShiftParams& p) {
  if (E < 0.0) throw DomainError("saddle_point: requires E >= 0");
  double delta = p.delta();
  EdgeData ed = edges(delta);
  double lo = ed.has_minus ? ed.e_minus : 0.0;
  StieltjesValue v = solve_mde_y(E, p);
  SaddlePoint sp;
  sp.x_star = v.m;
  sp.second_derivative = phase_fpp(v.m, p.abs_z2());
  sp.degenerate_discriminant = v.degenerate_discriminant;
  if (ed.has_minus && E < lo)
    sp.regime_tag = SaddleRegime::below_e_minus;
  else if (E > ed.e_plus)
    sp.regime_tag = SaddleRegime::above_e_plus;
  else
    sp.regime_tag = SaddleRegime::bulk;
  return sp;
}

}  // namespace ginilab
