#include "fqsl/matrix2.hpp"

#include <algorithm>
#include <cmath>

#include "fqsl/error.hpp"

namespace fqsl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BranchDomain: return "BranchDomain";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::DetuningUnsupported: return "DetuningUnsupported";
    case ErrorCode::DegenerateState: return "DegenerateState";
    case ErrorCode::StepTooSmall: return "StepTooSmall";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::UnknownFigure: return "UnknownFigure";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
  }
  return "Unknown";
}

double Mat2::max_abs() const {
  double r = 0.0;
  for (const auto& x : m) r = std::max(r, std::abs(x));
  return r;
}

bool Mat2::is_finite() const {
  return std::all_of(m.begin(), m.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
          a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] + b.m[i];
  return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}

Mat2 operator*(cplx s, const Mat2& a) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = s * a.m[i];
  return r;
}

Vec2 operator*(const Mat2& a, const Vec2& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
}

double hermitian_defect(const Mat2& a) { return (a - a.adjoint()).max_abs(); }

std::array<double, 2> singular_values(const Mat2& a) {
  // G = A^H A is Hermitian PSD: [[p, q], [conj(q), r]].
  const double p = std::norm(a(0, 0)) + std::norm(a(1, 0));
  const double r = std::norm(a(0, 1)) + std::norm(a(1, 1));
  const cplx q = std::conj(a(0, 0)) * a(0, 1) + std::conj(a(1, 0)) * a(1, 1);
  const double mean = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), std::abs(q));
  const double big = mean + rad;
  // det(G) = |det A|^2 gives the small eigenvalue without cancellation.
  const double det = std::norm(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  const double small = big > 0.0 ? det / big : 0.0;
  return {std::sqrt(std::max(big, 0.0)), std::sqrt(std::max(small, 0.0))};
}

}  // namespace fqsl
