#include "fqsl/qsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fqsl/error.hpp"
#include "fqsl/quadrature.hpp"

namespace fqsl {

namespace {

constexpr int kMaxDepth = 40;
constexpr std::size_t kMaxEvaluations = 50'000'000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Integrates |g| over [a, b] where g(v) = f(t(v)) t'(v) for a signed
// integrand f. Pieces are split at sign changes (located by the Illinois
// variant of regula falsi) so every Gauss-Kronrod piece sees a smooth,
// sign-definite integrand. A piece is accepted when its error estimate is
// below rel_tol times its own value, below rel_tol * density * length
// (density: a typical magnitude of |g|, so the budget is shared along the
// interval), or at the roundoff level of the integrand values. Halving a
// piece whose error is noise barely lowers the estimate; such pieces are
// accepted once the error is within 100 rel_tol.
template <class G>
class AbsPieces {
 public:
  AbsPieces(const G& g, const EvalConfig& cfg, double density) : g_(g), cfg_(cfg), density_(density) {}

  double run(double a, double b) { return piece(a, b, 0, 0.0); }
  double error() const { return err_; }
  std::size_t evaluations() const { return evals_; }

 private:
  double eval(double v) {
    if (++evals_ > kMaxEvaluations) throw Error(ErrorCode::QuadratureFailure, "evaluation budget exhausted");
    return g_(v);
  }

  double root(double lo, double hi, double flo, double fhi) {
    int side = 0;
    for (int it = 0; it < 200; ++it) {
      if (hi - lo <= 4.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
      double x = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double fx = eval(x);
      if (fx == 0.0) return x;
      if ((fx > 0.0) == (flo > 0.0)) {
        lo = x;
        flo = fx;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = x;
        fhi = fx;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    return 0.5 * (lo + hi);
  }

  double piece(double a, double b, int depth, double parent_err) {
    if (!(b > a)) return 0.0;
    const auto x = quad::kronrod_nodes(a, b);
    std::array<double, 15> fx{};
    double scale = 0.0;
    for (int i = 0; i < 15; ++i) {
      fx[i] = eval(x[i]);
      if (!std::isfinite(fx[i])) throw Error(ErrorCode::NonFinite, "QSL integrand is not finite");
      scale = std::max(scale, std::abs(fx[i]));
    }
    // Values this close to zero carry no reliable sign.
    const double floor = 64.0 * kEps * scale;
    std::vector<double> cuts{a};
    int last = -1;
    for (int i = 0; i < 15; ++i) {
      if (std::abs(fx[i]) <= floor) continue;
      if (last >= 0 && (fx[i] > 0.0) != (fx[last] > 0.0)) cuts.push_back(root(x[last], x[i], fx[last], fx[i]));
      last = i;
    }
    if (cuts.size() > 1) {
      if (depth >= kMaxDepth) throw Error(ErrorCode::QuadratureFailure, "sign changes did not resolve");
      cuts.push_back(b);
      double sum = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) sum += piece(cuts[k], cuts[k + 1], depth + 1, 0.0);
      return sum;
    }
    const auto est = quad::kronrod_combine(fx, a, b);
    const double e = std::abs(est.kronrod - est.gauss);
    const double len = b - a;
    const double target = std::max({cfg_.abs_tol, cfg_.rel_tol * std::abs(est.kronrod),
                                    cfg_.rel_tol * density_ * len, 1e3 * kEps * scale * len});
    const bool stalled = parent_err > 0.0 && e > 0.1 * parent_err &&
                         e <= 100.0 * cfg_.rel_tol * std::max(std::abs(est.kronrod), density_ * len);
    if (e <= target || stalled) {
      err_ += e;
      return std::abs(est.kronrod);
    }
    if (depth >= kMaxDepth) throw Error(ErrorCode::QuadratureFailure, "|d rho/dt| quadrature did not converge");
    const double mid = 0.5 * (a + b);
    return piece(a, mid, depth + 1, e) + piece(mid, b, depth + 1, e);
  }

  const G& g_;
  const EvalConfig& cfg_;
  double density_;
  double err_ = 0.0;
  std::size_t evals_ = 0;
};

// Prefix integrals of |f| on the nodes 0 < t_1 < ... < t_N. On [0, t_1]
// the integrand behaves like t^{2 beta - 1}: the stretch [0, t0] with
// rho_gg(t0) ~ 1e-3 rel_tol rho_gg(t_1) is taken in closed form (rho_ee is
// monotone there, so the integral is rho_gg(t0)) and the rest of the cell
// in the variable v = (t / t_1)^beta, where the integrand is smooth.
template <class F, class R>
AbsDerivativeIntegral prefix_integral(const std::vector<double>& t, double beta, const F& f, const R& rho_gg,
                                      double density, const EvalConfig& cfg) {
  AbsDerivativeIntegral out;
  out.prefix.resize(t.size());
  if (t.empty()) return out;
  const double t1 = t.front();
  const double q = 1.0 / beta;
  auto first = [&](double v) { return f(t1 * std::pow(v, q)) * t1 * q * std::pow(v, q - 1.0); };
  AbsPieces<decltype(first)> head(first, cfg, density * t1);
  const double v0 = std::sqrt(1e-3 * cfg.rel_tol);
  const double t0 = t1 * std::pow(v0, q);
  double total = rho_gg(t0) + head.run(v0, 1.0);
  out.prefix[0] = total;
  out.error_estimate += head.error();
  out.evaluations += head.evaluations() + 1;

  AbsPieces<F> body(f, cfg, density);
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += body.run(t[k - 1], t[k]);
    out.prefix[k] = total;
  }
  out.error_estimate += body.error();
  out.evaluations += body.evaluations();
  return out;
}

const DensityMatrix2& excited() {
  static const DensityMatrix2 rho{Mat2::diag(0.0, 1.0)};
  return rho;
}

// Builds the point and checks the norm relations the diagonal model implies.
QslPoint make_point(double tau, double sin2b, double integral, const Mat2& sample_derivative, BoundRule rule) {
  const double op = schatten_norm(sample_derivative, NormKind::Operator);
  const double hs = schatten_norm(sample_derivative, NormKind::HilbertSchmidt);
  const double tr = schatten_norm(sample_derivative, NormKind::Trace);
  const double x = std::abs(sample_derivative(1, 1).real());
  if (std::abs(op - x) > 4.0 * kEps * x || std::abs(hs - std::sqrt(2.0) * x) > 8.0 * kEps * x ||
      std::abs(tr - 2.0 * x) > 8.0 * kEps * x)
    throw Error(ErrorCode::InvariantViolation, "derivative norms differ from |d rho_ee/dt| multiples");

  QslPoint pt;
  pt.tau = tau;
  pt.sin2_bures = sin2b;
  pt.lambda_op = integral / tau;
  pt.lambda_hs = std::sqrt(2.0) * integral / tau;
  pt.lambda_tr = 2.0 * integral / tau;
  if (!(pt.lambda_op <= pt.lambda_hs && pt.lambda_hs <= pt.lambda_tr))
    throw Error(ErrorCode::InvariantViolation, "averaged Schatten norms are out of order");
  if (sin2b == 0.0 || integral == 0.0) return pt;
  pt.ratio_op = sin2b / integral;
  if (rule == BoundRule::OpOnly) {
    pt.ratio_max = pt.ratio_op;
  } else {
    const double candidates[3] = {sin2b / (tau * pt.lambda_tr), sin2b / (tau * pt.lambda_hs), pt.ratio_op};
    pt.ratio_max = *std::max_element(std::begin(candidates), std::end(candidates));
    if (pt.ratio_max != pt.ratio_op)
      throw Error(ErrorCode::InvariantViolation, "max-of-three bound is not attained by the operator norm");
  }
  return pt;
}

}  // namespace

double schatten_norm(const Mat2& m, NormKind p) {
  const auto s = singular_values(m);
  switch (p) {
    case NormKind::Trace: return s[0] + s[1];
    case NormKind::HilbertSchmidt: return std::hypot(s[0], s[1]);
    case NormKind::Operator: return s[0];
  }
  return 0.0;
}

double bures_overlap_term(const DensityMatrix2& rho0, const DensityMatrix2& rho_tau) {
  const double purity = (rho0.m * rho0.m).trace().real();
  if (std::abs(purity - 1.0) > 1e-10) throw Error(ErrorCode::NotPure, "initial state is not pure");
  return std::abs((rho0.m * rho_tau.m).trace().real() - 1.0);
}

AbsDerivativeIntegral integrate_abs_derivative(const Trajectory& traj, const EvalConfig& cfg) {
  const JCParams& p = traj.params;
  auto f = [&](double t) { return diagonal_sample(p, t, cfg).drho_ee; };
  auto gg = [&](double t) { return reduced_density(evolve(p, t, cfg), p).rho_gg(); };
  double density = 0.0;
  for (const Mat2& d : traj.derivatives) density += std::abs(d(1, 1).real());
  if (!traj.derivatives.empty()) density /= static_cast<double>(traj.derivatives.size());
  return prefix_integral(traj.times, p.beta, f, gg, density, cfg);
}

std::vector<QslPoint> qsl_ml_prefix(const Trajectory& traj, const std::vector<double>& taus, BoundRule rule,
                                    const EvalConfig& cfg) {
  if (traj.times.empty()) throw Error(ErrorCode::GridTooCoarse, "empty trajectory");
  std::vector<std::size_t> index;
  for (double tau : taus) {
    const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), tau);
    if (it == traj.times.end() || *it != tau)
      throw Error(ErrorCode::InvalidArgument, "driving time is not a trajectory node");
    index.push_back(static_cast<std::size_t>(it - traj.times.begin()));
  }
  std::vector<QslPoint> out;
  out.reserve(taus.size());
  if (traj.params.coupling() == 0.0) {
    for (std::size_t k = 0; k < taus.size(); ++k) out.push_back(make_point(taus[k], 0.0, 0.0, Mat2::zero(), rule));
    return out;
  }
  const auto integral = integrate_abs_derivative(traj, cfg);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const std::size_t i = index[k];
    const double sin2b = bures_overlap_term(excited(), traj.states[i]);
    out.push_back(make_point(taus[k], sin2b, integral.prefix[i], traj.derivatives[i], rule));
  }
  return out;
}

QslPoint qsl_ml(const Trajectory& traj, BoundRule rule, const EvalConfig& cfg) {
  if (traj.times.empty() || traj.times.back() != traj.tau)
    throw Error(ErrorCode::GridTooCoarse, "trajectory must end at its driving time");
  return qsl_ml_prefix(traj, {traj.tau}, rule, cfg).front();
}

MLMTResult qsl_mlmt(const Trajectory& chi, double tau, double tau_d) {
  if (!(tau_d > 0.0)) throw Error(ErrorCode::InvalidArgument, "window length must be > 0");
  const auto& t = chi.times;
  auto find = [&](double x) {
    const auto it = std::lower_bound(t.begin(), t.end(), x - 1e-12 * std::max(1.0, std::abs(x)));
    if (it == t.end() || std::abs(*it - x) > 1e-12 * std::max(1.0, std::abs(x)))
      throw Error(ErrorCode::InvalidArgument, "trajectory has no sample at a window end");
    return static_cast<std::size_t>(it - t.begin());
  };
  const std::size_t i0 = find(tau), i1 = find(tau + tau_d);
  if (i1 <= i0) throw Error(ErrorCode::GridTooCoarse, "window holds fewer than 2 samples");

  const Mat2& x0 = chi.states[i0].m;
  const double purity0 = (x0 * x0).trace().real();
  const auto v = singular_values(x0);
  auto sv_term = [&](std::size_t i) {
    const auto s = singular_values(chi.derivatives[i]);
    return s[0] * v[0] + s[1] * v[1];
  };
  auto hs_term = [&](std::size_t i) { return schatten_norm(chi.derivatives[i], NormKind::HilbertSchmidt); };
  double sv = 0.0, hs = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const double h = t[i + 1] - t[i];
    sv += 0.5 * h * (sv_term(i) + sv_term(i + 1));
    hs += 0.5 * h * (hs_term(i) + hs_term(i + 1));
  }
  MLMTResult r;
  r.avg_sv = sv / tau_d;
  r.avg_hs = hs / tau_d;
  r.relative_purity = (chi.states[i1].m * x0).trace().real() / purity0;
  const double gap = std::abs(r.relative_purity - 1.0);
  if (gap == 0.0) return r;
  const double slow = std::min(r.avg_sv, r.avg_hs);
  if (!(slow > 0.0)) throw Error(ErrorCode::InvariantViolation, "state moved while the averaged speed is zero");
  r.tau_qsl = gap * purity0 / slow;
  return r;
}

double qsl_ratio_formula(const JCParams& p, double tau, const EvalConfig& cfg, const GridSpec& grid) {
  p.validate();
  if (p.delta != 0.0) throw Error(ErrorCode::DetuningUnsupported, "formula requires zero detuning");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be > 0");
  const double g = p.coupling();
  if (g == 0.0) return 0.0;
  const double a2 = p.a * p.a, b2 = p.b * p.b;
  const cplx c = g * std::polar(1.0, -0.5 * p.beta * std::numbers::pi);
  const MLOrder order{p.beta, 1.0};
  auto products = [&](double t) {
    const double tb = std::pow(t, p.beta);
    const cplx e2 = ml::ml_global(order, c * tb, cfg), e1 = ml::ml_global(order, -c * tb, cfg);
    struct {
      cplx e1, e2;
    } r{e1, e2};
    return r;
  };
  // 1 - rho_ee = a^2 |E2 - E1|^2 / [(a^2 + b^2)(|E1|^2 + |E2|^2) + (b^2 - a^2) 2 Re(E1 E2*)]
  auto gap = [&](double t) {
    const auto e = products(t);
    const double sq = std::norm(e.e1) + std::norm(e.e2);
    const double cross = 2.0 * (e.e1 * std::conj(e.e2)).real();
    return a2 * (sq - cross) / ((a2 + b2) * sq + (b2 - a2) * cross);
  };
  auto slope = [&](double t) {
    const auto e = products(t);
    const cplx d1 = ml::ml_time_derivative(p.beta, -c, t, cfg), d2 = ml::ml_time_derivative(p.beta, c, t, cfg);
    const double sq = std::norm(e.e1) + std::norm(e.e2);
    const double cross = 2.0 * (e.e1 * std::conj(e.e2)).real();
    const double dsq = 2.0 * (std::conj(e.e1) * d1 + std::conj(e.e2) * d2).real();
    const double dcross = 2.0 * (d1 * std::conj(e.e2) + e.e1 * std::conj(d2)).real();
    const double num = a2 * (sq - cross), den = (a2 + b2) * sq + (b2 - a2) * cross;
    const double dnum = a2 * (dsq - dcross), dden = (a2 + b2) * dsq + (b2 - a2) * dcross;
    return (dnum * den - num * dden) / (den * den);
  };
  const auto nodes = grid.resolve(p, tau);
  double density = 0.0;
  for (double t : nodes) density += std::abs(slope(t));
  density /= static_cast<double>(nodes.size());
  const auto integral = prefix_integral(nodes, p.beta, slope, gap, density, cfg);
  const double total = integral.prefix.back();
  if (total == 0.0) return 0.0;
  return std::abs(gap(tau)) / total;
}

}  // namespace fqsl
