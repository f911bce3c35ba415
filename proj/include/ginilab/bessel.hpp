#pragma once
// Modified Bessel functions I0, I1 for complex argument, the Bessel kernel
// K_B, the limiting hard-edge kernel K(lambda, mu), and the one-point
// function q0 whose imaginary part reproduces the kernel diagonal.

#include <cmath>
#include <complex>
#include <vector>

#include "ginilab/complex_onepoint.hpp"
#include "ginilab/params.hpp"

namespace ginilab {

namespace detail {

// Power series; accurate to ~1e-15 relative for |z| <= 8 (mild cancellation
// near the imaginary axis stays below 1e-12).
inline Complex bessel_i_series(int order, Complex z) {
  Complex q = 0.25 * z * z;
  Complex term = (order == 0) ? Complex{1.0, 0.0} : 0.5 * z;
  Complex sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Miller backward recurrence with the normalization
// e^z = I0(z) + 2 sum_{k>=1} I_k(z), valid and stable for Re z >= 0.
// Returns {I0, I1} scaled by e^{-Re z}.
inline void bessel_i_miller_scaled(Complex z, Complex& i0s, Complex& i1s) {
  double az = std::abs(z);
  int m = static_cast<int>(az + 12.0 * std::sqrt(az) + 30.0);
  Complex bip{0.0, 0.0};      // ~ I_{k+1}
  Complex bi{1e-30, 0.0};     // ~ I_k, arbitrary seed scale
  Complex b1{0.0, 0.0}, sum{0.0, 0.0};
  for (int k = m; k >= 1; --k) {
    Complex bim = bip + (2.0 * static_cast<double>(k) / z) * bi;  // I_{k-1}
    bip = bi;
    bi = bim;
    int j = k - 1;  // bi now holds I_j (up to overall scale)
    sum += (j >= 1 ? 2.0 : 1.0) * bi;
    if (j == 1) b1 = bi;
    if (std::abs(bi) > 1e250) {
      bi *= 1e-250;
      bip *= 1e-250;
      sum *= 1e-250;
      b1 *= 1e-250;
    }
  }
  // sum ~ I0 + 2 sum_{k>=1} I_k = e^z; divide out and remove e^{Re z}.
  Complex norm = std::exp(Complex{0.0, z.imag()}) / sum;
  i0s = bi * norm;
  i1s = b1 * norm;
}

}  // namespace detail

// Scaled modified Bessel function e^{-|Re x|} I_order(x).
inline Complex bessel_i_scaled(int order, Complex x) {
  if (order != 0 && order != 1) throw UnknownIndex("bessel_i_scaled: order must be 0 or 1");
  double sign = 1.0;
  if (x.real() < 0.0) {  // I0 even, I1 odd
    x = -x;
    if (order == 1) sign = -1.0;
  }
  if (std::abs(x) <= 8.0)
    return sign * detail::bessel_i_series(order, x) * std::exp(-x.real());
  Complex i0s, i1s;
  detail::bessel_i_miller_scaled(x, i0s, i1s);
  return sign * (order == 0 ? i0s : i1s);
}

inline Complex bessel_i(int order, Complex x) {
  double ax_re = std::abs(x.real());
  if (ax_re > 700.0)
    throw DomainError("bessel_i: argument would overflow; use bessel_i_scaled");
  return bessel_i_scaled(order, x) * std::exp(ax_re);
}

// K_B(x,y) = (x I1(x) I0(y) - y I0(x) I1(y)) / (x^2 - y^2), with the analytic
// diagonal limit (I0(m)^2 - I1(m)^2)/2 at m=(x+y)/2 near x^2 = y^2.
inline Complex kernel_kb(Complex x, Complex y) {
  Complex d = x * x - y * y;
  if (std::abs(d) < 1e-4 * (std::norm(x) + std::norm(y) + 1.0)) {
    Complex m = 0.5 * (x + y);
    Complex i0 = bessel_i(0, m), i1 = bessel_i(1, m);
    return 0.5 * (i0 * i0 - i1 * i1);
  }
  return (x * bessel_i(1, x) * bessel_i(0, y) - y * bessel_i(0, x) * bessel_i(1, y)) / d;
}

struct KernelPoint {
  double lambda = 0.0;
  double mu = 0.0;
  double value = 0.0;
};

// K(lambda, mu) = (i/pi) int_{Gamma'} dx int_{gamma} dy
//   K_B(2 x sqrt(lambda), 2 y sqrt(mu)) e^{x^4/2 - y^4/2} x y (x^2 + y^2),
// Gamma' the four diagonal half-lines (inward on e^{i pi/4}, e^{i 5pi/4};
// outward on e^{i 3pi/4}, e^{i 7pi/4}), gamma the two outward imaginary rays.
// x_ray_mask selects a subset of the four x half-lines (bit i = ray i); the
// default integrates all of them.  Restricting to the two upper-half rays and
// doubling the real part reproduces the full value (conjugation symmetry).
inline Complex limiting_kernel_value(double lambda, double mu, int n_gl = 48,
                                     int x_ray_mask = 0xF) {
  if (lambda <= 0.0 || mu <= 0.0)
    throw DomainError("limiting_kernel: requires lambda, mu > 0");
  std::vector<double> glx, glw;
  detail::gauss_legendre(n_gl, glx, glw);
  // Radial nodes shared by every ray; envelope e^{-t^4/2} < 1e-16 past t=3.6.
  const double edges[6] = {0.0, 0.3, 0.8, 1.5, 2.3, 3.6};
  std::vector<double> tn, tw;
  for (int p = 0; p < 5; ++p) {
    double h = 0.5 * (edges[p + 1] - edges[p]), c = 0.5 * (edges[p + 1] + edges[p]);
    for (int j = 0; j < n_gl; ++j) {
      tn.push_back(c + h * glx[j]);
      tw.push_back(h * glw[j]);
    }
  }
  size_t nt = tn.size();
  double sl = 2.0 * std::sqrt(lambda), sm = 2.0 * std::sqrt(mu);

  struct Ray {
    Complex dir;
    double sign;
  };
  const Ray xrays[4] = {{std::polar(1.0, kPi / 4.0), -1.0},
                        {std::polar(1.0, 3.0 * kPi / 4.0), +1.0},
                        {std::polar(1.0, 5.0 * kPi / 4.0), -1.0},
                        {std::polar(1.0, 7.0 * kPi / 4.0), +1.0}};
  const Complex ydirs[2] = {{0.0, 1.0}, {0.0, -1.0}};

  Complex tot{0.0, 0.0};
  for (int ridx = 0; ridx < 4; ++ridx) {
    if (!(x_ray_mask & (1 << ridx))) continue;
    const Ray& rx = xrays[ridx];
    std::vector<Complex> xp(nt), xI0(nt), xI1(nt), xph(nt);
    for (size_t i = 0; i < nt; ++i) {
      xp[i] = tn[i] * rx.dir;
      xI0[i] = bessel_i(0, sl * xp[i]);
      xI1[i] = bessel_i(1, sl * xp[i]);
      Complex x4 = xp[i] * xp[i] * xp[i] * xp[i];
      xph[i] = std::exp(0.5 * x4) * xp[i];
    }
    for (const Complex& yd : ydirs) {
      for (size_t j = 0; j < nt; ++j) {
        Complex y = tn[j] * yd;
        Complex sy = sm * y;
        Complex yI0 = bessel_i(0, sy), yI1 = bessel_i(1, sy);
        Complex y4 = y * y * y * y;
        Complex yph = std::exp(-0.5 * y4) * y * tw[j] * yd;
        for (size_t i = 0; i < nt; ++i) {
          Complex sx = sl * xp[i];
          Complex d = sx * sx - sy * sy;
          Complex kb;
          if (std::abs(d) < 1e-4 * (std::norm(sx) + std::norm(sy) + 1.0)) {
            kb = kernel_kb(sx, sy);
          } else {
            kb = (sx * xI1[i] * yI0 - sy * xI0[i] * yI1) / d;
          }
          Complex w = tw[i] * rx.sign * rx.dir;
          tot += kb * xph[i] * yph * (xp[i] * xp[i] + y * y) * w;
        }
      }
    }
  }
  return (kI / kPi) * tot;
}

inline KernelPoint limiting_kernel(double lambda, double mu, int n_gl = 48) {
  KernelPoint out;
  out.lambda = lambda;
  out.mu = mu;
  out.value = limiting_kernel_value(lambda, mu, n_gl).real();
  return out;
}

// q0(lambda): the delta = 0 limit of the rescaled one-point function at unit
// depth; pi^{-1} Im q0(lambda) is the hard-edge density and equals the kernel
// diagonal K(lambda, lambda).
inline Complex q0(double lambda) {
  if (lambda <= 0.0) throw DomainError("q0: requires lambda > 0");
  RescaledIntegrand ri(lambda, 0.0);
  QuadResult q = detail::rescaled_double_integral(ri, 1e-12, 1e-10);
  return q.value / (2.0 * kI * kPi * ri.z_tilde_star);
}

}  // namespace ginilab
