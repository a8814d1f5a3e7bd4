#pragma once

#include <complex>
#include <string_view>

namespace fqsl {

using cplx = std::complex<double>;

/// Tolerance and budget shared by every numerical routine in the toolkit.
struct EvalConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int max_terms = 4000;
  // Gauss-Legendre nodes per panel for the graded split-representation rule.
  int quad_points = 16;
  // Upper truncation of improper integrals, in the original variable.
  double quad_cutoff = 1e12;

  void validate() const;
};

/// Order (beta, gamma) of the two-parameter Mittag-Leffler function E_{beta,gamma}.
struct MLOrder {
  double beta = 1.0;
  double gamma = 1.0;

  void validate() const;
};

namespace ml {

enum class Regime { Exponential, Series, Contour, Asymptotic };

std::string_view to_string(Regime r) noexcept;

/// Evaluator ml_global() dispatches to for (order, z). The choice depends on
/// |z| and on r = |z|^(1/beta), the modulus of the dominant pole of the
/// Laplace-domain kernel:
///   - Exponential  beta = gamma = 1
///   - Series       |z| <= 5 and r <= 10 (max Taylor term bounded by ~e^10)
///   - Asymptotic   r >= 40 (truncation error ~e^-r)
///   - Contour      everything else
Regime select_regime(const MLOrder& order, cplx z);

/// Truncated Taylor series sum_j z^j / Gamma(beta j + gamma).
cplx ml_series(const MLOrder& order, cplx z, const EvalConfig& cfg = {});

/// Oscillation/decay split of E_beta((-i t)^beta alpha) for a real eigenvalue
/// alpha > 0: e^{-i alpha^{1/beta} t}/beta minus a weakly singular Laplace
/// integral. beta = 1 returns e^{-i alpha t} exactly. alpha < 0 throws
/// BranchDomain; use ml_global instead.
cplx ml_split(double beta, double alpha, double t, const EvalConfig& cfg = {});

/// Hankel-contour representation: residues of the poles right of the contour
/// plus adaptive Gauss-Kronrod along two rays and a unit arc.
cplx ml_contour(const MLOrder& order, cplx z, const EvalConfig& cfg = {});

/// Pole residues plus the algebraic asymptotic series -sum z^-k / Gamma(gamma - beta k).
cplx ml_asymptotic(const MLOrder& order, cplx z, const EvalConfig& cfg = {});

/// Uniformly valid E_{beta,gamma}(z); see select_regime().
cplx ml_global(const MLOrder& order, cplx z, const EvalConfig& cfg = {});

/// d/dt E_beta(c t^beta) = c t^{beta-1} E_{beta,beta}(c t^beta), t > 0.
cplx ml_time_derivative(double beta, cplx c, double t, const EvalConfig& cfg = {});

/// 1/Gamma(x) for real x, zero at the poles of Gamma and on overflow.
double rgamma(double x);

}  // namespace ml
}  // namespace fqsl
