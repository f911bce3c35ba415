#pragma once
// Core parameter bundle and error taxonomy shared by all modules.

#include <complex>
#include <stdexcept>
#include <string>

namespace ginilab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : NumericError {
  using NumericError::NumericError;
};

struct NoConvergence : NumericError {
  using NumericError::NumericError;
};

struct ContourCrossesPole : NumericError {
  using NumericError::NumericError;
};

struct RegimeError : NumericError {
  using NumericError::NumericError;
};

struct MaxSubdivisions : NumericError {
  using NumericError::NumericError;
};

struct UnknownIndex : DomainError {
  using DomainError::DomainError;
};

struct EmptySample : DomainError {
  using DomainError::DomainError;
};

// ---------------------------------------------------------------------------
// ShiftParams: (N, z) with delta and eta always derived from z, never stored.
// ---------------------------------------------------------------------------

struct ShiftParams {
  int N = 1;
  Complex z{0.0, 0.0};

  ShiftParams() = default;
  ShiftParams(int n, Complex shift) : N(n), z(shift) {
    if (n < 1) throw DomainError("ShiftParams: N must be >= 1");
  }

  double delta() const { return 1.0 - std::norm(z); }
  double eta() const { return z.imag(); }
  double abs_z2() const { return std::norm(z); }
};

// Energy plus side-of-axis convention for resolvent evaluation.
enum class SpectralSide {
  plus_i0,        // boundary value at real E with nonnegative spectral density
  negative_axis,  // resolvent of Y + E at real E > 0 (w = -E)
};

}  // namespace ginilab
