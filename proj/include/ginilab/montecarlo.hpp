#pragma once
// Monte Carlo reference layer: sampling of the smallest eigenvalue of
// Y^z = (X - z)(X - z)^*, empirical resolvent traces, limiting small-ball
// laws, and Kolmogorov-Smirnov comparison helpers.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ginilab/mde.hpp"
#include "ginilab/params.hpp"
#include "ginilab/threads.hpp"

namespace ginilab {

enum class SymmetryClass { real_entries, complex_entries };

struct EnsembleSpec {
  ShiftParams params;
  SymmetryClass symmetry = SymmetryClass::complex_entries;

  EnsembleSpec(const ShiftParams& p, SymmetryClass s) : params(p), symmetry(s) {}
};

struct TailSample {
  std::uint64_t index = 0;
  double lambda1 = 0.0;   // smallest eigenvalue of Y^z
  double rescaled = 0.0;  // lambda1 / c(N, z)
};

// ---------------------------------------------------------------------------
// Counter-based RNG: each sample derives its entire entry stream from
// (master_seed, sample_index), so results are independent of thread count
// and sample order.
// ---------------------------------------------------------------------------

namespace detail {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() {  // in (0, 1]
    return (next() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
};

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 s(master ^ (0x517cc1b727220a95ULL * (index + 1)));
  s.next();
  return s.next();
}

struct GaussianStream {
  SplitMix64 rng;
  bool have_spare = false;
  double spare = 0.0;
  explicit GaussianStream(std::uint64_t seed) : rng(seed) {}
  double next() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u1 = rng.uniform01(), u2 = rng.uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * kPi * u2;
    spare = r * std::sin(th);
    have_spare = true;
    return r * std::cos(th);
  }
};

inline std::vector<double> singular_values(const EnsembleSpec& spec, std::uint64_t master,
                                           std::uint64_t index) {
  int n = spec.params.N;
  GaussianStream g(stream_seed(master, index));
  if (spec.symmetry == SymmetryClass::complex_entries) {
    Eigen::MatrixXcd A(n, n);
    double s = 1.0 / std::sqrt(2.0 * n);  // E|x_ij|^2 = 1/N, E x_ij^2 = 0
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = Complex{s * g.next(), s * g.next()};
    A.diagonal().array() -= spec.params.z;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    std::vector<double> sv(svd.singularValues().data(),
                           svd.singularValues().data() + n);
    return sv;
  }
  // Real entries; a complex shift still yields a complex matrix X - z.
  Eigen::MatrixXd X(n, n);
  double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = s * g.next();
  if (std::abs(spec.params.z.imag()) > 0.0) {
    Eigen::MatrixXcd A = X.cast<Complex>();
    A.diagonal().array() -= spec.params.z;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
    return std::vector<double>(svd.singularValues().data(),
                               svd.singularValues().data() + n);
  }
  X.diagonal().array() -= spec.params.z.real();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(X);
  return std::vector<double>(svd.singularValues().data(), svd.singularValues().data() + n);
}

}  // namespace detail

// Smallest eigenvalue of Y^z for sample `index` of the stream `master_seed`.
inline TailSample sample_lambda1(const EnsembleSpec& spec, std::uint64_t master_seed,
                                 std::uint64_t index) {
  std::vector<double> sv = detail::singular_values(spec, master_seed, index);
  double smin = sv.empty() ? 0.0 : sv.back();  // Eigen sorts descending
  for (double v : sv) smin = std::min(smin, v);
  TailSample out;
  out.index = index;
  out.lambda1 = smin * smin;
  out.rescaled = out.lambda1 / scale_c(spec.params);
  return out;
}

inline std::vector<TailSample> sample_lambda1_batch(const EnsembleSpec& spec,
                                                    std::uint64_t master_seed,
                                                    std::uint64_t n_samples) {
  std::vector<TailSample> out(n_samples);
  parallel_for(static_cast<long>(n_samples), [&](long i) {
    out[i] = sample_lambda1(spec, master_seed, static_cast<std::uint64_t>(i));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Limit laws and tail bounds.
// ---------------------------------------------------------------------------

// Limiting distribution of N^2 * lambda1 for the unshifted ensemble (z = 0).
inline double edelman_cdf(double x, SymmetryClass symmetry) {
  if (x <= 0.0) return 0.0;
  if (symmetry == SymmetryClass::complex_entries) return 1.0 - std::exp(-x);
  return 1.0 - std::exp(-0.5 * x - std::sqrt(x));
}

// Non-asymptotic bound on P(lambda1 <= x * c(N, z)).
inline double corollary_bound(double x, const ShiftParams& p, SymmetryClass symmetry) {
  if (x <= 0.0) return 0.0;
  double base = (1.0 + std::abs(std::log(x))) * x;
  if (symmetry == SymmetryClass::complex_entries) return base;
  double eta = p.eta();
  return std::exp(-0.5 * p.N * eta * eta) * std::sqrt(x) + base;
}

// ---------------------------------------------------------------------------
// Empirical resolvent trace.
// ---------------------------------------------------------------------------

struct MonteCarloTrace {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
};

// Monte Carlo estimate of E Tr (Y^z + E)^{-1}.
inline MonteCarloTrace empirical_resolvent(const EnsembleSpec& spec, double E,
                                           std::uint64_t n_samples,
                                           std::uint64_t master_seed) {
  if (n_samples == 0) throw EmptySample("empirical_resolvent: no samples requested");
  if (E <= 0.0) throw DomainError("empirical_resolvent: requires E > 0");
  std::vector<double> traces(n_samples);
  parallel_for(static_cast<long>(n_samples), [&](long i) {
    std::vector<double> sv =
        detail::singular_values(spec, master_seed, static_cast<std::uint64_t>(i));
    double t = 0.0;
    for (double s : sv) t += 1.0 / (s * s + E);
    traces[i] = t;
  });
  double mean = 0.0;
  for (double t : traces) mean += t;
  mean /= static_cast<double>(n_samples);
  double var = 0.0;
  for (double t : traces) var += (t - mean) * (t - mean);
  var /= std::max<double>(1.0, static_cast<double>(n_samples - 1));
  MonteCarloTrace out;
  out.mean = mean;
  out.std_error = std::sqrt(var / static_cast<double>(n_samples));
  out.n_samples = n_samples;
  return out;
}

// ---------------------------------------------------------------------------
// Empirical CDF and KS distance.
// ---------------------------------------------------------------------------

struct EmpiricalCdf {
  std::vector<double> sorted;

  explicit EmpiricalCdf(std::vector<double> values) : sorted(std::move(values)) {
    if (sorted.empty()) throw EmptySample("EmpiricalCdf: empty sample");
    std::sort(sorted.begin(), sorted.end());
  }
  double operator()(double x) const {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  }
};

// sup_x |F_n(x) - F(x)| against a reference CDF.
inline double ks_distance(const EmpiricalCdf& cdf,
                          const std::function<double(double)>& reference) {
  double d = 0.0;
  size_t n = cdf.sorted.size();
  for (size_t i = 0; i < n; ++i) {
    double f = reference(cdf.sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

}  // namespace ginilab
