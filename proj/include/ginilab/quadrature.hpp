#pragma once
// Adaptive Gauss-Kronrod integration of complex integrands along piecewise
// paths in the complex plane (lines, circular arcs, truncated rays).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <vector>

#include "ginilab/params.hpp"

namespace ginilab {

struct QuadResult {
  Complex value{0.0, 0.0};
  double abs_err = 0.0;
  long n_evals = 0;
  bool truncation_warning = false;
};

// One piece of a contour.  All segments are parameterized over t in [0, 1].
struct PathSegment {
  enum class Kind { line, arc, ray };
  Kind kind = Kind::line;
  Complex a{0.0, 0.0};      // line: start; ray: start
  Complex b{0.0, 0.0};      // line: end; ray: unit direction
  Complex center{0.0, 0.0}; // arc
  double radius = 0.0;      // arc
  double th0 = 0.0, th1 = 0.0;  // arc angles (signed sweep th0 -> th1)
  double length = 0.0;      // ray truncation length

  Complex point(double t) const {
    switch (kind) {
      case Kind::line: return a + t * (b - a);
      case Kind::ray: return a + (t * length) * b;
      case Kind::arc: {
        double th = th0 + t * (th1 - th0);
        return center + radius * Complex{std::cos(th), std::sin(th)};
      }
    }
    return {};
  }
  Complex derivative(double t) const {
    switch (kind) {
      case Kind::line: return b - a;
      case Kind::ray: return length * b;
      case Kind::arc: {
        double th = th0 + t * (th1 - th0);
        return radius * (th1 - th0) * Complex{-std::sin(th), std::cos(th)};
      }
    }
    return {};
  }
  Complex endpoint() const { return point(1.0); }
};

struct ComplexPath {
  std::vector<PathSegment> segments;
  int orientation = +1;  // -1 integrates the reversed path

  void add_line(Complex a, Complex b) {
    PathSegment s;
    s.kind = PathSegment::Kind::line;
    s.a = a;
    s.b = b;
    segments.push_back(s);
  }
  // Full or partial circle; positive sweep is counter-clockwise.
  void add_arc(Complex center, double radius, double th0, double th1) {
    if (radius <= 0.0) throw DomainError("ComplexPath: arc radius must be positive");
    PathSegment s;
    s.kind = PathSegment::Kind::arc;
    s.center = center;
    s.radius = radius;
    s.th0 = th0;
    s.th1 = th1;
    segments.push_back(s);
  }
  void add_ray(Complex start, Complex direction, double length) {
    PathSegment s;
    s.kind = PathSegment::Kind::ray;
    s.a = start;
    s.b = direction / std::abs(direction);
    s.length = length;
    segments.push_back(s);
  }
};

// Truncation point for an exponentially decaying tail |f(t)| <= C e^{-t/s}.
inline double truncate_ray(double decay_scale, double abs_tol, double C = 1.0) {
  if (decay_scale <= 0.0) throw DomainError("truncate_ray: decay scale must be positive");
  if (abs_tol <= 0.0) throw DomainError("truncate_ray: tolerance must be positive");
  double ratio = std::max(C / abs_tol, 1.0);
  return decay_scale * std::log(ratio);
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  Complex integral{0.0, 0.0};
  double err = 0.0;
};

template <class F>
inline GkEstimate gk15(const F& f, const PathSegment& seg, double t0, double t1) {
  double hl = 0.5 * (t1 - t0), c = 0.5 * (t0 + t1);
  Complex resk{0.0, 0.0}, resg{0.0, 0.0};
  auto eval = [&](double t) {
    return f(seg.point(t)) * seg.derivative(t);
  };
  Complex fc = eval(c);
  resk += kWgk[7] * fc;
  resg += kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    double dx = hl * kXgk[j];
    Complex sum = eval(c - dx) + eval(c + dx);
    resk += kWgk[j] * sum;
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  GkEstimate out;
  out.integral = resk * hl;
  out.err = std::abs((resk - resg) * hl);
  return out;
}

}  // namespace detail

// Adaptive integration of f along the path; nested-rule error estimate.
template <class F>
inline QuadResult integrate_path(const F& f, const ComplexPath& path, double abs_tol = 1e-12,
                                 double rel_tol = 1e-12, int max_subdivisions = 4000) {
  struct Interval {
    int seg;
    double t0, t1;
    Complex val;
    double err;
  };
  auto cmp = [](const Interval& a, const Interval& b) { return a.err < b.err; };
  std::priority_queue<Interval, std::vector<Interval>, decltype(cmp)> heap(cmp);

  QuadResult res;
  Complex total{0.0, 0.0};
  double total_err = 0.0;
  for (size_t i = 0; i < path.segments.size(); ++i) {
    auto est = detail::gk15(f, path.segments[i], 0.0, 1.0);
    res.n_evals += 15;
    heap.push({static_cast<int>(i), 0.0, 1.0, est.integral, est.err});
    total += est.integral;
    total_err += est.err;
  }
  int subdivisions = 0;
  while (!heap.empty() && total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (++subdivisions > max_subdivisions)
      throw MaxSubdivisions("integrate_path: subdivision cap exceeded");
    Interval top = heap.top();
    heap.pop();
    double tm = 0.5 * (top.t0 + top.t1);
    if (tm <= top.t0 || tm >= top.t1) continue;  // interval at machine resolution
    auto left = detail::gk15(f, path.segments[top.seg], top.t0, tm);
    auto right = detail::gk15(f, path.segments[top.seg], tm, top.t1);
    res.n_evals += 30;
    total += left.integral + right.integral - top.val;
    total_err += left.err + right.err - top.err;
    heap.push({top.seg, top.t0, tm, left.integral, left.err});
    heap.push({top.seg, tm, top.t1, right.integral, right.err});
  }
  res.value = total * static_cast<double>(path.orientation);
  res.abs_err = std::max(total_err, 0.0);
  if (res.n_evals < 1) res.n_evals = 1;
  return res;
}

}  // namespace ginilab
