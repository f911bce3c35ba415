#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <random>

#include "ginilab/ginilab.hpp"

using namespace ginilab;
using doctest::Approx;

// ---------------------------------------------------------------------------
// Independent oracle for the polynomial kernel: the 2x2 supermatrix
// determinant/trace expression evaluated in a 4-generator Grassmann algebra.
// Everything below is built only from that defining expression, no polynomial
// tables, so agreement with GFunction::assemble is a genuine cross-check.
// ---------------------------------------------------------------------------

namespace oracle {

struct GE {  // Grassmann element over generators 0..3, coefficients by bitmask
  std::array<Complex, 16> c{};

  static GE scalar(Complex v) {
    GE g;
    g.c[0] = v;
    return g;
  }
  static GE gen(int i) {
    GE g;
    g.c[1u << i] = 1.0;
    return g;
  }
  GE operator+(const GE& o) const {
    GE r = *this;
    for (int k = 0; k < 16; ++k) r.c[k] += o.c[k];
    return r;
  }
  GE operator-(const GE& o) const {
    GE r = *this;
    for (int k = 0; k < 16; ++k) r.c[k] -= o.c[k];
    return r;
  }
  GE operator-() const {
    GE r;
    for (int k = 0; k < 16; ++k) r.c[k] = -c[k];
    return r;
  }
  GE operator*(const GE& o) const {
    GE r;
    for (int k1 = 0; k1 < 16; ++k1) {
      if (c[k1] == Complex{0.0, 0.0}) continue;
      for (int k2 = 0; k2 < 16; ++k2) {
        if (o.c[k2] == Complex{0.0, 0.0}) continue;
        if (k1 & k2) continue;
        // reorder sign: count inversions when interleaving the generators
        int sign = 0;
        for (int g = 0; g < 4; ++g)
          if (k2 & (1 << g)) sign += std::popcount(static_cast<unsigned>(k1) >> (g + 1));
        Complex term = c[k1] * o.c[k2];
        r.c[k1 | k2] += (sign % 2) ? -term : term;
      }
    }
    return r;
  }
  GE operator*(Complex s) const {
    GE r;
    for (int k = 0; k < 16; ++k) r.c[k] = c[k] * s;
    return r;
  }
  Complex scalar_part() const { return c[0]; }
  GE nilpotent() const {
    GE r = *this;
    r.c[0] = 0.0;
    return r;
  }
};

using GMat = std::array<std::array<GE, 2>, 2>;

GMat matmul(const GMat& X, const GMat& Y) {
  GMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = X[i][0] * Y[0][j] + X[i][1] * Y[1][j];
  return r;
}
GMat madd(const GMat& X, const GMat& Y) {
  GMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = X[i][j] + Y[i][j];
  return r;
}
GMat msub(const GMat& X, const GMat& Y) {
  GMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = X[i][j] - Y[i][j];
  return r;
}
GMat mscale(const GMat& X, Complex s) {
  GMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = X[i][j] * s;
  return r;
}
GE trace(const GMat& X) { return X[0][0] + X[1][1]; }
GE det2(const GMat& X) { return X[0][0] * X[1][1] - X[0][1] * X[1][0]; }
GMat smat(Complex a, Complex b, Complex c, Complex d) {
  return {{{GE::scalar(a), GE::scalar(b)}, {GE::scalar(c), GE::scalar(d)}}};
}

GE inv_even(const GE& e) {
  Complex s = e.scalar_part();
  GE r = e.nilpotent() * (1.0 / s);
  GE r2 = r * r;
  GE acc = GE::scalar(1.0) - r + r2 - r2 * r + r2 * r2;
  return acc * (1.0 / s);
}
GMat inv_even2(const GMat& M) {
  GE dinv = inv_even(det2(M));
  return {{{M[1][1] * dinv, (-M[0][1]) * dinv}, {(-M[1][0]) * dinv, M[0][0] * dinv}}};
}
GE lognil_even(const GE& e) {
  Complex s = e.scalar_part();
  GE r = e.nilpotent() * (1.0 / s);
  GE r2 = r * r;
  return r - r2 * 0.5 + (r2 * r) * (1.0 / 3.0) - (r2 * r2) * 0.25;
}
GE exp_nil(const GE& n) {
  GE acc = GE::scalar(1.0);
  GE term = acc;
  for (int k = 1; k <= 4; ++k) {
    term = term * n * (1.0 / k);
    acc = acc + term;
  }
  return acc;
}
GE powm_half_neg_unit(const GE& e) {  // e^{-1/2} for scalar part 1
  GE r = e.nilpotent();
  GE r2 = r * r;
  return GE::scalar(1.0) - r * 0.5 + r2 * (3.0 / 8.0) - (r2 * r) * (5.0 / 16.0) +
         (r2 * r2) * (35.0 / 128.0);
}

// The defining determinant/trace supermatrix expression for the kernel at a
// bosonic point with diagonal a, off-diagonal b (tau = 1 - b^2/a^2).
Complex G_supermatrix(Complex a, Complex b, Complex xi, Complex z, int N) {
  Complex zc = std::conj(z);
  Complex az2 = z * zc;

  GE s0 = GE::gen(0), s1 = GE::gen(1), s2 = GE::gen(2), s3 = GE::gen(3);
  GMat sig = {{{s0, s1}, {s2, s3}}};
  GMat tmat = {{{s3, s1}, {-s2, -s0}}};

  GMat x = smat(a, b, b, a);
  Complex detx = a * a - b * b;
  GMat xinv = smat(a / detx, -b / detx, -b / detx, a / detx);
  Complex det1px = (1.0 + a) * (1.0 + a) - b * b;
  GMat onepx_inv =
      smat((1.0 + a) / det1px, -b / det1px, -b / det1px, (1.0 + a) / det1px);
  GMat Z = smat(z, 0.0, 0.0, zc);
  GMat Zs = smat(zc, 0.0, 0.0, z);
  GMat Id = smat(1.0, 0.0, 0.0, 1.0);
  GMat onepx = smat(1.0 + a, b, b, 1.0 + a);

  GMat M0 = msub(Id, matmul(matmul(xinv, sig), mscale(tmat, 1.0 / xi)));
  GE pref = powm_half_neg_unit(det2(M0));

  GE n_log1pQ =
      lognil_even(det2(msub(onepx, mscale(matmul(sig, tmat), 1.0 / (1.0 + xi)))));
  GE n_logQ = lognil_even(det2(msub(x, mscale(matmul(sig, tmat), 1.0 / xi))));

  GMat W = inv_even2(
      msub(smat(1.0 + xi, 0.0, 0.0, 1.0 + xi), matmul(matmul(tmat, onepx_inv), sig)));
  GMat TL = madd(onepx_inv, matmul(matmul(matmul(onepx_inv, sig), W),
                                   matmul(tmat, onepx_inv)));
  GMat TR = mscale(matmul(matmul(onepx_inv, sig), W), -1.0);
  GMat BL = mscale(matmul(matmul(W, tmat), onepx_inv), -1.0);
  GMat BR = W;

  GMat QTL = matmul(matmul(Z, x), Zs);
  GMat QTR = matmul(matmul(Z, sig), Zs);
  GMat QBL = matmul(matmul(Z, tmat), Zs);
  GMat QBR = smat(az2 * xi, 0.0, 0.0, az2 * xi);

  GE str_term = trace(madd(matmul(TL, QTL), matmul(TR, QBL))) -
                trace(madd(matmul(BL, QTR), matmul(BR, QBR)));

  GE expo_nil =
      ((-n_log1pQ) + n_logQ - str_term.nilpotent()) * (static_cast<double>(N) / 2.0);
  GE F = pref * exp_nil(expo_nil);

  // Berezin integration: derivatives in the order 1, 2, 3, 0.
  for (int g : {1, 2, 3, 0}) {
    GE out;
    for (int k = 0; k < 16; ++k) {
      if (!(k & (1 << g))) continue;
      int pos = std::popcount(static_cast<unsigned>(k) & ((1u << g) - 1u));
      Complex term = (pos % 2) ? -F.c[k] : F.c[k];
      out.c[k & ~(1 << g)] += term;
    }
    F = out;
  }
  return F.scalar_part();
}

}  // namespace oracle

// ---------------------------------------------------------------------------

TEST_CASE("g(a, 1, eta) = f(a) identity") {
  for (double eta : {0.0, 0.3, 1.0}) {
    ShiftParams p{4, {0.8, eta}};
    RealPhase ph(p, 0.37);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      Complex a{1.5 + u(rng), 0.8 * u(rng)};
      Complex diff = ph.g(a, 1.0) - ph.f(a);
      CHECK(std::abs(diff) < 1e-12 * (1.0 + std::abs(ph.f(a))));
    }
  }
}

TEST_CASE("eval_poly frozen examples") {
  CHECK(std::abs(eval_poly(2, 2, 1, {1.0, 0.0}, 0.37, {1.0, 0.0}) - Complex{32.0, 0.0}) <
        1e-14);
  CHECK(std::abs(eval_poly(2, 0, 2, {0.0, 0.0}, 0.5, {0.0, 0.0}) - Complex{4.0, 0.0}) <
        1e-14);
  CHECK_THROWS_AS(eval_poly(3, 1, 4, {1.0, 0.0}, 0.5, {1.0, 0.0}), UnknownIndex);
}

TEST_CASE("eta = 0 removes the second kernel block") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < 20; ++i) {
    Complex a{u(rng), 0.0};
    double tau = 0.1 + 0.4 * u(rng);
    Complex xi{0.3 * u(rng), 0.2 * u(rng)};
    double N = 4.0, delta = 0.3;
    Complex with = GFunction::assemble(a, tau, xi, N, delta, 0.0);
    Complex printed = GFunction::assemble_published(a, tau, xi, N, delta, 0.0);
    CHECK(std::abs(with - printed) < 1e-13 * (1.0 + std::abs(with)));
    CHECK(std::abs(GFunction::correction(a, tau, xi, N, 0.0)) == 0.0);
  }
}

TEST_CASE("assembled kernel matches the supermatrix oracle") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    double a = 0.2 + 2.0 * u(rng);
    double b = (0.9 * a) * (2.0 * u(rng) - 1.0);
    double tau = 1.0 - (b * b) / (a * a);
    Complex xi{0.2 + u(rng), (2.0 * u(rng) - 1.0)};
    Complex z{0.5 + u(rng), 0.8 * u(rng)};
    int N = 2 + 2 * (i % 3);
    double delta = 1.0 - std::norm(z);
    double eta2 = z.imag() * z.imag();

    Complex lib = GFunction::assemble({a, 0.0}, tau, xi, N, delta, eta2);
    Complex orc = oracle::G_supermatrix(a, b, xi, z, N);
    CHECK(std::abs(lib - orc) < 1e-10 * (1.0 + std::abs(orc)));

    Complex pub = GFunction::assemble_published({a, 0.0}, tau, xi, N, delta, eta2);
    Complex corr = GFunction::correction({a, 0.0}, tau, xi, N, eta2);
    CHECK(std::abs((lib - pub) - corr) < 1e-10 * (1.0 + std::abs(corr)));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("real trace basic properties") {
  ShiftParams p{4, {0.9, 0.0}};
  RealQuadOptions fast;
  fast.n_xi = 48;
  fast.n_gl = 24;
  fast.error_estimate = false;
  double prev = std::numeric_limits<double>::infinity();
  for (double E : {1e-2, 1e-1, 1.0}) {
    QuadResult q = trace_resolvent_real(p, E, fast);
    CHECK(std::abs(q.value.imag()) < 1e-6 * std::abs(q.value.real()));
    CHECK(q.value.real() > 0.0);
    CHECK(q.value.real() < prev);
    prev = q.value.real();
  }
}

TEST_CASE("real trace rejects odd N and nonpositive E") {
  ShiftParams p{5, {0.9, 0.0}};
  CHECK_THROWS_AS(trace_resolvent_real(p, 0.1), DomainError);
  ShiftParams q{4, {0.9, 0.0}};
  CHECK_THROWS_AS(trace_resolvent_real(q, -0.1), DomainError);
}

TEST_CASE("real trace matches Monte Carlo at N = 4") {
  ShiftParams p{4, {0.9, 0.0}};
  double E = 1e-2;
  QuadResult q = trace_resolvent_real(p, E);
  EnsembleSpec spec{p, SymmetryClass::real_entries};
  MonteCarloTrace mc = empirical_resolvent(spec, E, 20000, 777);
  CHECK(std::abs(q.value.real() - mc.mean) < 3.0 * mc.std_error);
}

TEST_CASE("real trace is independent of the xi ring radius") {
  ShiftParams p{4, {0.8, 0.1}};
  double E = 0.05;
  RealQuadOptions a;
  a.error_estimate = false;
  RealQuadOptions b = a;
  b.xi_radius = 0.5;
  QuadResult qa = trace_resolvent_real(p, E, a);
  QuadResult qb = trace_resolvent_real(p, E, b);
  CHECK(std::abs(qa.value - qb.value) / std::abs(qa.value) < 1e-6);
}

TEST_CASE("real tail bound right-hand side") {
  // z real: no exponential suppression on the first term
  ShiftParams pr{16, {1.0, 0.0}};
  double v = real_tail_bound_rhs(pr, 1e-2);
  double t1 = std::pow(16.0, 0.75) / std::sqrt(1e-2);
  CHECK(v >= t1);
  // N E^{2/3} = 1 makes the log factor vanish in the second term
  int N = 10000;
  ShiftParams p1{N, {1.0, 0.0}};
  double E = std::pow(static_cast<double>(N), -1.5);
  double rhs = real_tail_bound_rhs(p1, E);
  CHECK(rhs == Approx(std::pow(static_cast<double>(N), 1.5) +
                      std::pow(static_cast<double>(N), 0.75) / std::sqrt(E))
                   .epsilon(1e-12));
  // N eta^2 = 8 suppresses the first term by e^{-4}
  double eta = std::sqrt(8.0 / N);
  ShiftParams p2{N, {std::sqrt(1.0 - eta * eta), eta}};
  double rhs2 = real_tail_bound_rhs(p2, E);
  double first1 = std::pow(static_cast<double>(N), 0.75) / std::sqrt(E);
  double delta2 = p2.delta();
  double first2 = std::exp(-4.0) *
                  std::max(std::pow(static_cast<double>(N), 0.75),
                           N * std::sqrt(std::abs(delta2))) /
                  std::sqrt(E);
  CHECK(rhs - std::pow(static_cast<double>(N), 1.5) == Approx(first1).epsilon(1e-10));
  double second2 = std::max(std::pow(static_cast<double>(N), 1.5), 1.0 * N * N * std::abs(delta2)) *
                   (1.0 + std::abs(std::log(N * std::pow(E, 2.0 / 3.0))));
  CHECK(rhs2 - second2 == Approx(first2).epsilon(1e-8));
  // domain restriction on delta
  ShiftParams bad{16, {2.0, 0.0}};
  CHECK_THROWS_AS(real_tail_bound_rhs(bad, 0.1), DomainError);
}
