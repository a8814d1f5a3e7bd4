#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <doctest.h>

#include "fqsl/error.hpp"

namespace fqsl::test {

inline double rel_err(std::complex<double> got, std::complex<double> want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Runs fn and returns the ErrorCode it throws; fails the test if it doesn't.
template <class F>
ErrorCode error_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected fqsl::Error");
  return ErrorCode::InvalidArgument;
}

// Integral of g|sin(2 g t)| over [0, tau], summed over whole half periods.
inline double abs_sin_integral(double g, double tau) {
  const double half = M_PI / (2.0 * g);
  const double k = std::floor(tau / half);
  const double rest = tau - k * half;
  return k + 0.5 * (1.0 - std::cos(2.0 * g * rest));
}

}  // namespace fqsl::test
