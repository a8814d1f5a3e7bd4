#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace fqsl::quad {

/// Nodes and weights of an interpolatory rule.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n; cached per n.
const QuadRule& gauss_legendre(int n);

/// n-point Gauss-Laguerre rule for integrals of e^{-x} f(x) over [0, inf).
/// Cached per n.
const QuadRule& gauss_laguerre(int n);

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kXGK = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWGK = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWG = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Abscissae of the 15-point rule on [a, b], ascending.
inline std::array<double, 15> kronrod_nodes(double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> x{};
  for (int i = 0; i < 7; ++i) {
    x[i] = c - h * kXGK[i];
    x[14 - i] = c + h * kXGK[i];
  }
  x[7] = c;
  return x;
}

template <class V>
struct KronrodEstimate {
  V kronrod;
  V gauss;
};

/// Combines integrand values at kronrod_nodes(a, b) into the K15 and G7 sums.
template <class V>
KronrodEstimate<V> kronrod_combine(const std::array<V, 15>& f, double a, double b) {
  const double h = 0.5 * (b - a);
  V k = f[7] * kWGK[7];
  V g = f[7] * kWG[3];
  for (int i = 0; i < 7; ++i) {
    const V pair = f[i] + f[14 - i];
    k = k + pair * kWGK[i];
    if (i % 2 == 1) g = g + pair * kWG[i / 2];
  }
  return {k * h, g * h};
}

/// Globally adaptive Gauss-Kronrod integration of a scalar (real or complex)
/// integrand. Returns false if the error target is not met within max_intervals.
template <class V, class F>
bool integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol, int max_intervals,
                        V& result, double& error) {
  struct Piece {
    double a, b;
    V value;
    double err;
  };
  auto eval = [&](double lo, double hi) {
    const auto x = kronrod_nodes(lo, hi);
    std::array<V, 15> fx{};
    for (int i = 0; i < 15; ++i) fx[i] = f(x[i]);
    const auto est = kronrod_combine(fx, lo, hi);
    return Piece{lo, hi, est.kronrod, std::abs(est.kronrod - est.gauss)};
  };
  std::vector<Piece> pieces{eval(a, b)};
  for (;;) {
    V total{};
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total = total + pieces[i].value;
      err += pieces[i].err;
      if (pieces[i].err > pieces[worst].err) worst = i;
    }
    result = total;
    error = err;
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) return true;
    if (static_cast<int>(pieces.size()) >= max_intervals) return false;
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    pieces[worst] = eval(p.a, mid);
    pieces.push_back(eval(mid, p.b));
  }
}

}  // namespace fqsl::quad
