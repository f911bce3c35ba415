#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>

#include "ginilab/ginilab.hpp"

using namespace ginilab;
using doctest::Approx;

TEST_CASE("residue of 1/y on the unit circle") {
  ComplexPath path;
  path.add_arc({0.0, 0.0}, 1.0, 0.0, 2.0 * kPi);
  QuadResult q = integrate_path([](Complex y) { return 1.0 / y; }, path);
  CHECK(std::abs(q.value - 2.0 * kPi * kI) < 1e-12);
  CHECK(q.n_evals >= 1);
  CHECK(q.abs_err >= 0.0);
}

TEST_CASE("exponential decay on the positive real ray") {
  ComplexPath path;
  path.add_ray({0.0, 0.0}, {1.0, 0.0}, truncate_ray(1.0, 1e-16));
  QuadResult q = integrate_path([](Complex x) { return std::exp(-x); }, path);
  CHECK(std::abs(q.value - 1.0) < 1e-12);
}

TEST_CASE("quartic-decay ray toward e^{3 i pi/4} matches a dense oracle") {
  Complex dir = std::polar(1.0, 3.0 * kPi / 4.0);
  double T = 6.0;
  auto f = [](Complex x) { return std::exp(-x * x * x * x / 2.0) * x; };
  ComplexPath path;
  path.add_ray({0.0, 0.0}, dir, T);
  QuadResult q = integrate_path(f, path);
  // composite Simpson oracle on a fine fixed grid
  int n = 200000;  // even
  Complex acc{0.0, 0.0};
  for (int i = 0; i <= n; ++i) {
    double t = T * i / n;
    double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += wgt * f(t * dir);
  }
  acc *= dir * (T / n) / 3.0;
  CHECK(std::abs(q.value - acc) < 1e-9);
}

TEST_CASE("truncate_ray cutoffs") {
  CHECK(truncate_ray(1.0, std::exp(-40.0)) == Approx(40.0).epsilon(1e-12));
  double N = 1e4, E = 1e-3;
  CHECK(truncate_ray(1.0 / (N * E), std::exp(-40.0)) == Approx(4000.0).epsilon(1e-12));
  // Gaussian tail: with T = sqrt(2 * truncate_ray(1, tol)) the envelope
  // e^{-T^2/2} falls below tol; cross-check against the erfc integral tail.
  double tol = 1e-16;
  double T = std::sqrt(2.0 * truncate_ray(1.0, tol));
  CHECK(T == Approx(8.58).epsilon(0.01));
  CHECK(std::exp(-T * T / 2.0) <= tol * (1.0 + 1e-12));
  double tail = std::sqrt(kPi / 2.0) * std::erfc(T / std::sqrt(2.0));
  CHECK(tail < tol);
  CHECK_THROWS_AS(truncate_ray(-1.0, 1e-6), DomainError);
  CHECK_THROWS_AS(truncate_ray(1.0, 0.0), DomainError);
}

TEST_CASE("orientation antisymmetry") {
  auto f = [](Complex x) { return std::exp(Complex{0.0, 3.0} * x) / (x + 2.0); };
  ComplexPath fwd;
  fwd.add_line({0.0, 0.0}, {1.0, 1.0});
  fwd.add_line({1.0, 1.0}, {2.0, 0.5});
  ComplexPath rev;
  rev.add_line({2.0, 0.5}, {1.0, 1.0});
  rev.add_line({1.0, 1.0}, {0.0, 0.0});
  QuadResult a = integrate_path(f, fwd);
  QuadResult b = integrate_path(f, rev);
  CHECK(std::abs(a.value + b.value) < 1e-12);
  ComplexPath flipped = fwd;
  flipped.orientation = -1;
  QuadResult c = integrate_path(f, flipped);
  CHECK(std::abs(a.value + c.value) < 1e-12);
}

TEST_CASE("additivity under segment splitting") {
  auto f = [](Complex x) { return std::sin(x) * std::exp(-x / 3.0); };
  ComplexPath whole;
  whole.add_line({0.0, 0.0}, {4.0, 1.0});
  ComplexPath split;
  split.add_line({0.0, 0.0}, {1.3, 0.325});
  split.add_line({1.3, 0.325}, {4.0, 1.0});
  QuadResult a = integrate_path(f, whole, 1e-13, 1e-13);
  QuadResult b = integrate_path(f, split, 1e-13, 1e-13);
  CHECK(std::abs(a.value - b.value) < 2e-13);
}

TEST_CASE("deterministic across repeated runs and thread settings") {
  auto f = [](Complex x) { return std::exp(-x * x) / (1.0 + x); };
  ComplexPath path;
  path.add_line({0.0, 0.0}, {3.0, 2.0});
  QuadResult a = integrate_path(f, path);
  setenv("GINIBRE_LAB_THREADS", "3", 1);
  QuadResult b = integrate_path(f, path);
  unsetenv("GINIBRE_LAB_THREADS");
  CHECK(a.value.real() == b.value.real());
  CHECK(a.value.imag() == b.value.imag());
  CHECK(a.n_evals == b.n_evals);
}

TEST_CASE("subdivision cap raises MaxSubdivisions") {
  // A pole just off the contour needs unbounded refinement at tight tolerance.
  auto f = [](Complex x) { return 1.0 / (x - Complex{0.5, 1e-9}); };
  ComplexPath path;
  path.add_line({0.0, 0.0}, {1.0, 0.0});
  CHECK_THROWS_AS(integrate_path(f, path, 1e-300, 1e-300, 8), MaxSubdivisions);
}

TEST_CASE("path segment geometry invariants") {
  ComplexPath p;
  p.add_line({0.0, 0.0}, {1.0, 1.0});
  p.add_arc({0.0, 0.0}, 2.0, 0.0, kPi / 2.0);
  p.add_ray({1.0, 0.0}, {3.0, 4.0}, 5.0);
  CHECK(std::abs(p.segments[0].point(1.0) - Complex{1.0, 1.0}) < 1e-15);
  CHECK(std::abs(p.segments[1].point(0.0) - Complex{2.0, 0.0}) < 1e-15);
  CHECK(std::abs(p.segments[1].point(1.0) - Complex{0.0, 2.0}) < 1e-14);
  // ray direction is normalized; endpoint = start + length * unit direction
  CHECK(std::abs(p.segments[2].point(1.0) - (Complex{1.0, 0.0} + 5.0 * Complex{0.6, 0.8})) <
        1e-14);
  CHECK_THROWS_AS(p.add_arc({0.0, 0.0}, -1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("worker_count respects the environment cap") {
  setenv("GINIBRE_LAB_THREADS", "2", 1);
  CHECK(worker_count() == 2);
  setenv("GINIBRE_LAB_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  unsetenv("GINIBRE_LAB_THREADS");
  CHECK(worker_count() >= 1);
}
