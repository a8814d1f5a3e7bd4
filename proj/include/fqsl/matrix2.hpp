#pragma once

#include <array>
#include <complex>

namespace fqsl {

using cplx = std::complex<double>;

/// Dense 2x2 complex matrix, row-major.
struct Mat2 {
  std::array<cplx, 4> m{};

  constexpr Mat2() = default;
  constexpr Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : m{a00, a01, a10, a11} {}

  static constexpr Mat2 diag(cplx d0, cplx d1) { return {d0, 0.0, 0.0, d1}; }
  static constexpr Mat2 zero() { return {}; }

  constexpr cplx& operator()(int r, int c) { return m[2 * r + c]; }
  constexpr const cplx& operator()(int r, int c) const { return m[2 * r + c]; }

  cplx trace() const { return m[0] + m[3]; }
  Mat2 adjoint() const { return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}; }
  double max_abs() const;
  bool is_finite() const;
};

Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(cplx s, const Mat2& a);

using Vec2 = std::array<cplx, 2>;
Vec2 operator*(const Mat2& a, const Vec2& v);

// Largest absolute deviation from Hermiticity.
double hermitian_defect(const Mat2& a);

// Singular values in descending order, from the closed-form eigenvalues of
// the Gram matrix A^H A.
std::array<double, 2> singular_values(const Mat2& a);

}  // namespace fqsl
