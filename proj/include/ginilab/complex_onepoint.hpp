#pragma once
// Expected resolvent trace of Y^z for the complex ensemble: exact finite-N
// double contour integrals (several regime-adapted contour families), the
// rescaled critical-regime integral, and saddle-point asymptotics.

#include <cmath>
#include <complex>
#include <limits>
#include <tuple>

#include "ginilab/mde.hpp"
#include "ginilab/params.hpp"
#include "ginilab/quadrature.hpp"

namespace ginilab {

// Phase and kernel entering the exact double-integral representation
//   E Tr(Y - w)^{-1} = N^2/(2 pi i) * Ix dx . Iy dy e^{-N f(x) + N f(y)} y G(x, y).
struct ComplexPhase {
  ShiftParams params;
  double E = 0.0;
  Complex w{0.0, 0.0};

  ComplexPhase(const ShiftParams& p, double energy, SpectralSide side) : params(p), E(energy) {
    w = (side == SpectralSide::negative_axis) ? Complex{-energy, 0.0} : Complex{energy, 0.0};
  }

  Complex f(Complex x) const {
    double az2 = params.abs_z2();
    return std::log((1.0 + x) / x) - az2 / (1.0 + x) - w * x;
  }
  Complex fp(Complex x) const {
    double az2 = params.abs_z2();
    Complex opx = 1.0 + x;
    return 1.0 / opx - 1.0 / x + az2 / (opx * opx) - w;
  }
  Complex fpp(Complex x) const { return phase_fpp(x, params.abs_z2()); }

  Complex G(Complex x, Complex y) const {
    double az2 = params.abs_z2();
    Complex opx = 1.0 + x, opy = 1.0 + y;
    return 1.0 / (x * y) - 1.0 / (opx * opy) - az2 / (opx * opx * opy) -
           az2 / (opx * opy * opy);
  }
};

namespace detail {

struct SeparableParts {
  // x-side integrals of e^{-N(f - f0)} against 1/x, 1/(1+x), 1/(1+x)^2 and
  // y-side integrals of e^{+N(f - f0)} against 1, y/(1+y), y/(1+y)^2.
  Complex ix_invx, ix_1, ix_2;
  Complex iy_1, iy_v1, iy_v2;
  double err = 0.0;
  long n_evals = 0;
};

template <class W>
inline std::pair<Complex, QuadResult> path_integral(const W& weight, const ComplexPath& path,
                                                    double abs_tol, double rel_tol) {
  QuadResult q = integrate_path(weight, path, abs_tol, rel_tol);
  return {q.value, q};
}

inline QuadResult assemble_complex_trace(const ComplexPhase& ph, const ComplexPath& xpath,
                                         const ComplexPath& ypath, Complex f0, double abs_tol,
                                         double rel_tol) {
  int N = ph.params.N;
  double az2 = ph.params.abs_z2();
  SeparableParts s;
  double err_terms = 0.0;
  long evals = 0;
  auto run = [&](const ComplexPath& path, auto factor, double sign_n) {
    auto fn = [&](Complex t) { return std::exp(sign_n * static_cast<double>(N) * (ph.f(t) - f0)) * factor(t); };
    QuadResult q = integrate_path(fn, path, abs_tol, rel_tol);
    err_terms += q.abs_err;
    evals += q.n_evals;
    return q.value;
  };
  s.ix_invx = run(xpath, [](Complex x) { return 1.0 / x; }, -1.0);
  s.ix_1 = run(xpath, [](Complex x) { return 1.0 / (1.0 + x); }, -1.0);
  s.ix_2 = run(xpath, [](Complex x) { return 1.0 / ((1.0 + x) * (1.0 + x)); }, -1.0);
  s.iy_1 = run(ypath, [](Complex) { return Complex{1.0, 0.0}; }, +1.0);
  s.iy_v1 = run(ypath, [](Complex y) { return y / (1.0 + y); }, +1.0);
  s.iy_v2 = run(ypath, [](Complex y) { return y / ((1.0 + y) * (1.0 + y)); }, +1.0);

  Complex tot = s.ix_invx * s.iy_1 - s.ix_1 * s.iy_v1 - az2 * (s.ix_2 * s.iy_v1 + s.ix_1 * s.iy_v2);
  Complex pref = static_cast<double>(N) * static_cast<double>(N) / (2.0 * kI * kPi);
  QuadResult out;
  out.value = pref * tot;
  double mag = std::max({std::abs(s.ix_invx), std::abs(s.ix_1), std::abs(s.iy_1),
                         std::abs(s.iy_v1), 1.0});
  out.abs_err = std::abs(pref) * err_terms * mag;
  out.n_evals = evals;
  return out;
}

inline void check_circle(Complex center, double radius) {
  if (std::abs(center) >= radius - 1e-12)
    throw ContourCrossesPole("y-circle does not enclose the origin");
  if (std::abs(center - Complex{-1.0, 0.0}) <= radius + 0.02)
    throw ContourCrossesPole("y-circle passes too close to -1");
}

}  // namespace detail

// Exact evaluation at w = -E (resolvent of Y + E), saddle-adapted real contours.
inline QuadResult trace_complex_negative_axis(const ShiftParams& p, double E, double abs_tol = 1e-12,
                                              double rel_tol = 1e-10) {
  if (E <= 0.0) throw DomainError("trace_complex_negative_axis: requires E > 0");
  ComplexPhase ph(p, E, SpectralSide::negative_axis);
  double xs = solve_mde_y(-E, p).m.real();
  Complex f0 = ph.f({xs, 0.0});

  double N = p.N;
  double X = xs + 60.0 / (N * E) + 10.0;
  ComplexPath xpath;
  double knots[] = {0.0, 0.3 * xs, 0.7 * xs, xs, 1.3 * xs, 2.0 * xs, std::min(4.0 * xs, X), X};
  for (int i = 0; i + 1 < 8; ++i)
    if (knots[i + 1] > knots[i]) xpath.add_line({knots[i], 0.0}, {knots[i + 1], 0.0});

  Complex c{0.0, 0.0};
  double r = xs;
  if (xs >= 0.9) {
    c = {(xs - 0.5) / 2.0, 0.0};
    r = (xs + 0.5) / 2.0;
  }
  detail::check_circle(c, r);
  ComplexPath ypath;
  ypath.add_arc(c, r, 0.0, 2.0 * kPi);

  return detail::assemble_complex_trace(ph, xpath, ypath, f0, abs_tol, rel_tol);
}

// Exact evaluation at E - i0 convention (positive spectral density) for E in
// the critical window, contours through the leading-order stationary point.
inline QuadResult trace_complex_critical(const ShiftParams& p, double E, double abs_tol = 1e-12,
                                         double rel_tol = 1e-9) {
  if (E <= 0.0) throw DomainError("trace_complex_critical: requires E > 0");
  ComplexPhase ph(p, E, SpectralSide::plus_i0);
  double delta = p.delta();
  double ec = std::cbrt(E);
  double r_arg = delta / ec;
  Complex zs;
  {
    CubicRoots cr = solve_cubic({1.0, 0.0}, {0.0, 0.0}, {r_arg, 0.0}, {1.0, 0.0});
    Complex best{0.0, -1.0};
    for (const Complex& t : cr.roots)
      if (t.real() > 1e-12 && t.imag() > best.imag()) best = t;
    if (best.imag() <= 0.0)
      throw ContourCrossesPole("trace_complex_critical: no admissible stationary point");
    zs = best / ec;
  }
  double R = std::abs(zs);
  if (R <= 0.75)
    throw ContourCrossesPole("trace_complex_critical: stationary point too close to -1");
  Complex f0{ph.f(zs).real(), 0.0};
  double N = p.N;

  ComplexPath xpath;
  double xknots[] = {0.0, 0.1 * R, 0.35 * R, 0.7 * R, R};
  for (int i = 0; i + 1 < 5; ++i) xpath.add_line({xknots[i], 0.0}, {xknots[i + 1], 0.0});
  double q = (R - zs.real()) / zs.imag();
  Complex d{-q, 1.0};
  double T = (40.0 / (N * E)) / std::abs(d) + 5.0 * R;
  xpath.add_ray({R, 0.0}, d, T * std::abs(d));

  double b = std::sqrt(R * R - 4.0 / 9.0);
  double th_a = std::arg(Complex{-2.0 / 3.0, b});
  ComplexPath ypath;
  ypath.add_arc({0.0, 0.0}, R, -th_a, th_a);
  ypath.add_line({-2.0 / 3.0, b}, {-2.0 / 3.0, -b});

  return detail::assemble_complex_trace(ph, xpath, ypath, f0, abs_tol, rel_tol);
}

// Exact evaluation in the bulk at E - i0 convention via steepest-descent
// adapted contours through the complex stationary point.
inline QuadResult trace_complex_bulk(const ShiftParams& p, double E, double abs_tol = 1e-12,
                                     double rel_tol = 1e-9) {
  ComplexPhase ph(p, E, SpectralSide::plus_i0);
  StieltjesValue mv = solve_mde_y(E, p);
  Complex xs = mv.m;
  if (xs.imag() <= 1e-12)
    throw RegimeError("trace_complex_bulk: energy not inside the bulk");
  Complex f0 = ph.f(xs);
  Complex fp2 = ph.fpp(xs);
  double N = p.N;

  double phid = (kPi - std::arg(fp2)) / 2.0;
  double phix = std::fmod(-std::arg(fp2) / 2.0 + 2.0 * kPi, kPi);
  if (phix < kPi / 2.0 + 0.1) phix += kPi / 2.0;

  // y-circle with real center, tangent to the descent direction at xs.
  double tgt = std::fmod(phid - kPi / 2.0 + 2.0 * kPi, kPi);
  Complex c{xs.real() - xs.imag() / std::tan(tgt), 0.0};
  double r = std::abs(xs - c);
  if (!(std::abs(c) < r && c.real() - r > -0.98)) {
    c = {0.0, 0.0};
    r = std::abs(xs);
    if (r >= 0.98) throw ContourCrossesPole("trace_complex_bulk: no admissible y-circle");
  }
  ComplexPath ypath;
  double th0 = std::arg(xs - c);
  ypath.add_arc(c, r, th0, th0 + 2.0 * kPi);

  // x-path: along the real axis to the level-crossing point, across to xs, then
  // out along the descent ray.
  double xc = 0.3;
  {
    auto g = [&](double x) { return (ph.f({x, 0.0}) - f0).real() - 0.02; };
    double a = 1e-8, bb = 50.0;
    if (g(a) > 0.0 && g(bb) < 0.0) {
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (a + bb);
        (g(mid) > 0.0 ? a : bb) = mid;
      }
      xc = 0.5 * (a + bb);
    }
  }
  double scale = 1.0 / std::sqrt(N * std::abs(fp2));
  double T = 40.0 / (N * E) + 20.0 * scale + 3.0;
  ComplexPath xpath;
  xpath.add_line({0.0, 0.0}, {0.5 * xc, 0.0});
  xpath.add_line({0.5 * xc, 0.0}, {xc, 0.0});
  xpath.add_line({xc, 0.0}, xs);
  Complex dray{std::cos(phix), std::sin(phix)};
  xpath.add_ray(xs, dray, T);

  return detail::assemble_complex_trace(ph, xpath, ypath, f0, abs_tol, rel_tol);
}

// Regime-dispatching exact evaluator.
inline QuadResult trace_resolvent_complex(const ShiftParams& p, double E, SpectralSide side,
                                          double abs_tol = 1e-12, double rel_tol = 1e-9) {
  if (p.N < 2) throw DomainError("trace_resolvent_complex: requires N >= 2");
  if (E <= 0.0) throw DomainError("trace_resolvent_complex: requires E > 0");
  if (side == SpectralSide::negative_axis)
    return trace_complex_negative_axis(p, E, abs_tol, rel_tol);
  if (E <= 10.0 * scale_c(p)) return trace_complex_critical(p, E, abs_tol, rel_tol);
  return trace_complex_bulk(p, E, abs_tol, rel_tol);
}

// ---------------------------------------------------------------------------
// Rescaled critical-regime integral.
// ---------------------------------------------------------------------------

struct RescaledIntegrand {
  double lambda = 0.0;
  double delta_tilde = 0.0;
  double z_tilde_star = 0.0;
  double cap = 1.0;  // 1 ^ delta_tilde^{-1}

  RescaledIntegrand(double lam, double dt) : lambda(lam), delta_tilde(dt) {
    if (lam <= 0.0) throw DomainError("RescaledIntegrand: requires lambda > 0");
    cap = (dt > 1.0) ? 1.0 / dt : 1.0;
    double vee = (dt > 1.0) ? std::cbrt(dt) : 1.0;
    double r = dt * std::pow(lam, -1.0 / 3.0) * vee;
    Complex ps;
    if (r >= 0.0) {
      ps = psi(r);
    } else {
      // Mild analytic continuation for slightly negative arguments.
      CubicRoots cr = solve_cubic({1.0, 0.0}, {0.0, 0.0}, {r, 0.0}, {1.0, 0.0});
      Complex best{0.0, -1.0};
      for (const Complex& t : cr.roots)
        if (t.imag() > best.imag()) best = t;
      if (best.imag() <= 0.0)
        throw DomainError("RescaledIntegrand: no admissible cubic root for this delta_tilde");
      ps = best;
    }
    z_tilde_star = std::pow(lam, -1.0 / 3.0) * vee * std::abs(ps);
  }

  Complex h(Complex x) const {
    double zt = z_tilde_star;
    return -cap * lambda * zt * x + delta_tilde / (x * zt) + 1.0 / (2.0 * x * x * zt * zt);
  }
  Complex H(Complex x, Complex y) const {
    double s = delta_tilde * z_tilde_star;
    return 1.0 / (x * x * x) + 1.0 / (x * x * y) + 1.0 / (x * y * y) + s / (x * y) +
           s / (x * x);
  }
};

namespace detail {

// The double integral Ix dx Iy dy e^{h(y) - h(x)} H(x, y), evaluated with the
// x-contour 0 -> e^{3 i pi/4} inf and the y-contour realized as the open path
// 0 -> -i -> (unit arc through +1) -> +i -> 0 whose endpoints approach the
// essential singularity at 0 along the imaginary axis, where e^{h} vanishes.
// A closed loop around 0 would pick up a spurious contribution from that
// essential singularity (an artifact of the rescaling) and is not used.
inline QuadResult rescaled_double_integral(const RescaledIntegrand& ri, double abs_tol,
                                           double rel_tol) {
  // Inner cutoff on the imaginary axis where the damping factor is negligible.
  double s0 = 1e-3;
  while (std::abs(std::exp(ri.h(Complex{0.0, s0}))) > 1e-18 && s0 < 0.99) s0 *= 1.3;
  s0 = std::min(s0, 0.3);

  ComplexPath ypath;
  ypath.add_line({0.0, -s0}, {0.0, -0.3});
  ypath.add_line({0.0, -0.3}, {0.0, -1.0});
  ypath.add_arc({0.0, 0.0}, 1.0, -kPi / 2.0, kPi / 2.0);
  ypath.add_line({0.0, 1.0}, {0.0, 0.3});
  ypath.add_line({0.0, 0.3}, {0.0, s0});

  double T = 80.0 / (ri.cap * ri.lambda * ri.z_tilde_star) + 10.0;
  ComplexPath xpath;
  xpath.add_line({0.0, 0.0}, {0.3, 0.0});
  xpath.add_line({0.3, 0.0}, {1.0, 0.0});
  Complex dray = std::polar(1.0, 3.0 * kPi / 4.0);
  xpath.add_ray({1.0, 0.0}, dray, T);

  double err = 0.0;
  long evals = 0;
  auto xpart = [&](int k) {
    auto fn = [&](Complex x) {
      Complex xk = x;
      for (int j = 1; j < k; ++j) xk *= x;
      return std::exp(-ri.h(x)) / xk;
    };
    QuadResult q = integrate_path(fn, xpath, abs_tol, rel_tol);
    err += q.abs_err;
    evals += q.n_evals;
    return q.value;
  };
  auto ypart = [&](int k) {
    auto fn = [&](Complex y) {
      Complex yk{1.0, 0.0};
      for (int j = 0; j < k; ++j) yk *= y;
      return std::exp(ri.h(y)) / yk;
    };
    QuadResult q = integrate_path(fn, ypath, abs_tol, rel_tol);
    err += q.abs_err;
    evals += q.n_evals;
    return q.value;
  };
  Complex ix1 = xpart(1), ix2 = xpart(2), ix3 = xpart(3);
  Complex iy0 = ypart(0), iy1 = ypart(1), iy2 = ypart(2);
  double s = ri.delta_tilde * ri.z_tilde_star;
  QuadResult out;
  out.value = ix3 * iy0 + ix2 * iy1 + ix1 * iy2 + s * (ix1 * iy1 + ix2 * iy0);
  out.abs_err = err * std::max({std::abs(ix1), std::abs(iy0), 1.0});
  out.n_evals = evals;
  return out;
}

}  // namespace detail

// Rescaled one-point value: (N^{3/2} / (2 pi i z~_*)) * double integral.
inline QuadResult rescaled_onepoint(double lambda, double delta_tilde, int N,
                                    double abs_tol = 1e-12, double rel_tol = 1e-10) {
  const double C = 10.0;
  if (!(lambda > 0.0 && lambda <= C + 1e-12))
    throw DomainError("rescaled_onepoint: lambda outside (0, C]");
  if (delta_tilde < -C) throw DomainError("rescaled_onepoint: delta_tilde below -C");
  RescaledIntegrand ri(lambda, delta_tilde);
  QuadResult q = detail::rescaled_double_integral(ri, abs_tol, rel_tol);
  Complex pref =
      std::pow(static_cast<double>(N), 1.5) / (2.0 * kI * kPi * ri.z_tilde_star);
  q.value *= pref;
  q.abs_err *= std::abs(pref);
  return q;
}

// Magnitude appearing in the small-lambda bound:
// |(1 ^ delta_tilde^{-1}) / z~_* * double integral|.
inline double rescaled_bound_lhs(double lambda, double delta_tilde, double abs_tol = 1e-12,
                                 double rel_tol = 1e-10) {
  RescaledIntegrand ri(lambda, delta_tilde);
  QuadResult q = detail::rescaled_double_integral(ri, abs_tol, rel_tol);
  return ri.cap * std::abs(q.value) / ri.z_tilde_star;
}

// ---------------------------------------------------------------------------
// Saddle-point asymptotics.
// ---------------------------------------------------------------------------

struct SaddleAsymptotics {
  Complex value{0.0, 0.0};  // N * m^z(E + i0)
  double error_bound = 0.0; // structured relative error estimate
};

inline SaddleAsymptotics saddle_asymptotics(const ShiftParams& p, double E,
                                            bool enforce_regime = true) {
  double delta = p.delta();
  EdgeData ed = edges(delta);
  double N = p.N;
  double e_plus_gap = std::abs(E - ed.e_plus);
  if (enforce_regime) {
    if (E < 3.0 * scale_c(p))
      throw RegimeError("saddle_asymptotics: energy inside the critical window");
    if (e_plus_gap < 3.0 * std::pow(N, -2.0 / 3.0))
      throw RegimeError("saddle_asymptotics: energy too close to the upper edge");
    if (ed.has_minus) {
      double gap_m = std::abs(E - ed.e_minus);
      if (gap_m < 3.0 * std::pow(N, -2.0 / 3.0) * std::pow(std::abs(delta), 5.0 / 3.0))
        throw RegimeError("saddle_asymptotics: energy too close to the lower edge");
    }
  }
  SaddleAsymptotics out;
  out.value = static_cast<double>(p.N) * solve_mde_y(E, p).m;
  double t1 = 1.0 / (N * std::pow(e_plus_gap, 1.5));
  double t2a = 1.0 / (N * std::pow(E, 2.0 / 3.0));
  double t2b;
  if (delta >= 0.0) {
    t2b = (delta > 0.0) ? 1.0 / (N * std::sqrt(E) * std::sqrt(delta))
                        : std::numeric_limits<double>::infinity();
  } else {
    double gap_m = std::abs(E - ed.e_minus);
    t2b = 1.0 / (N * std::pow(gap_m, 1.5) * std::pow(std::abs(delta), 2.5));
  }
  out.error_bound = t1 + std::min(t2a, t2b);
  return out;
}

}  // namespace ginilab
