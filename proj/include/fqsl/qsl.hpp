#pragma once

#include <vector>

#include "fqsl/jcmodel.hpp"

namespace fqsl {

enum class NormKind { Trace, HilbertSchmidt, Operator };

/// Schatten norm from the closed-form singular values.
double schatten_norm(const Mat2& m, NormKind p);

/// sin^2 of the Bures angle, |tr(rho0 rho_tau) - 1|, for a pure rho0.
double bures_overlap_term(const DensityMatrix2& rho0, const DensityMatrix2& rho_tau);

struct QslPoint {
  double tau = 0.0;
  double sin2_bures = 0.0;
  double lambda_tr = 0.0;
  double lambda_hs = 0.0;
  double lambda_op = 0.0;
  double ratio_op = 0.0;
  double ratio_max = 0.0;
};

enum class BoundRule { OpOnly, MaxOfThree };

/// Integral of |d rho_ee/dt| over [0, tau]: cells of the trajectory grid,
/// Gauss-Kronrod pieces split at the sign changes of the integrand, and a
/// closed-form small-time piece plus the substitution v = (t/t_1)^beta on
/// the first cell. prefix[k] is the integral up to trajectory.times[k].
struct AbsDerivativeIntegral {
  std::vector<double> prefix;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};
AbsDerivativeIntegral integrate_abs_derivative(const Trajectory& traj, const EvalConfig& cfg = {});

/// ML-type bound on a trajectory over (0, tau].
QslPoint qsl_ml(const Trajectory& traj, BoundRule rule = BoundRule::MaxOfThree, const EvalConfig& cfg = {});

/// The same bound at every requested driving time; each tau must be one of
/// the trajectory's grid nodes. One quadrature pass serves all of them.
std::vector<QslPoint> qsl_ml_prefix(const Trajectory& traj, const std::vector<double>& taus,
                                    BoundRule rule = BoundRule::MaxOfThree, const EvalConfig& cfg = {});

struct MLMTResult {
  double tau_qsl = 0.0;
  double relative_purity = 1.0;
  double avg_sv = 0.0;
  double avg_hs = 0.0;
};

/// ML-MT-type bound over the window [tau, tau + tau_d]. The trajectory
/// must contain samples at both ends; window averages use the trapezoid
/// rule on the samples. Singular values of the derivative and of the
/// initial state are paired in descending order.
MLMTResult qsl_mlmt(const Trajectory& chi, double tau, double tau_d);

/// tau_QSL / tau evaluated from the Mittag-Leffler products directly,
/// without building density matrices. Cross-check for qsl_ml.
double qsl_ratio_formula(const JCParams& p, double tau, const EvalConfig& cfg = {}, const GridSpec& grid = {});

}  // namespace fqsl
