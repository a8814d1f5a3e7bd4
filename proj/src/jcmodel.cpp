#include "fqsl/jcmodel.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "fqsl/error.hpp"

namespace fqsl {

namespace {

constexpr double kMaxCells = 4.0e6;

// Both Mittag-Leffler factors E_beta((-i t)^beta (+-g)) and, on request,
// their time derivatives.
struct Factors {
  cplx e1, e2;
  cplx d1, d2;
};

Factors factors(const JCParams& p, double t, bool with_derivative, const EvalConfig& cfg) {
  const double g = p.coupling();
  Factors f{1.0, 1.0, 0.0, 0.0};
  if (t == 0.0 || g == 0.0) return f;
  const cplx c2 = g * std::polar(1.0, -0.5 * p.beta * std::numbers::pi);
  const double tb = std::pow(t, p.beta);
  const MLOrder order{p.beta, 1.0};
  f.e2 = ml::ml_global(order, c2 * tb, cfg);
  f.e1 = ml::ml_global(order, -c2 * tb, cfg);
  if (with_derivative) {
    f.d2 = ml::ml_time_derivative(p.beta, c2, t, cfg);
    f.d1 = ml::ml_time_derivative(p.beta, -c2, t, cfg);
  }
  return f;
}

}  // namespace

void JCParams::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidOrder, "beta must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "photon number must be >= 0");
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0) || std::abs(a * a + b * b - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "weights need a, b in [0, 1] with a^2 + b^2 = 1");
  if (!std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "detuning must be finite");
}

bool JCParams::default_weights() const {
  return std::abs(a - std::sqrt(0.5)) < 1e-12 && std::abs(b - std::sqrt(0.5)) < 1e-12;
}

void DensityMatrix2::validate() const {
  if (!m.is_finite()) throw Error(ErrorCode::InvariantViolation, "density matrix has non-finite entries");
  if (hermitian_defect(m) > 1e-12) throw Error(ErrorCode::InvariantViolation, "density matrix is not Hermitian");
  const cplx tr = m.trace();
  if (std::abs(tr - 1.0) > 1e-12) throw Error(ErrorCode::InvariantViolation, "density matrix trace differs from 1");
  const double p = m(0, 0).real(), r = m(1, 1).real();
  const double low = 0.5 * (p + r) - std::hypot(0.5 * (p - r), std::abs(m(0, 1)));
  if (low < -1e-12) throw Error(ErrorCode::InvariantViolation, "density matrix has a negative eigenvalue");
}

void Trajectory::validate() const {
  if (times.size() != states.size() || times.size() != derivatives.size())
    throw Error(ErrorCode::InvariantViolation, "trajectory arrays differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1]))
      throw Error(ErrorCode::InvariantViolation, "trajectory times are not increasing");
    states[i].validate();
    if (!derivatives[i].is_finite() || std::abs(derivatives[i].trace()) > 1e-10)
      throw Error(ErrorCode::InvariantViolation, "derivative sample is not finite and traceless");
  }
}

Mat2 interaction_hamiltonian(double lambda, int n, double delta, double t) {
  const double g = lambda * std::sqrt(n + 1.0);
  return {0.0, g * std::polar(1.0, -delta * t), g * std::polar(1.0, delta * t), 0.0};
}

std::array<Eigenpair, 2> spectral_decomposition(const Mat2& h) {
  const double scale = std::max(1.0, h.max_abs());
  if (!h.is_finite() || hermitian_defect(h) > 1e-12 * scale)
    throw Error(ErrorCode::NotHermitian, "spectral_decomposition needs a Hermitian matrix");
  const double p = h(0, 0).real(), r = h(1, 1).real();
  const cplx q = h(0, 1);
  if (q == 0.0) {
    Eigenpair e0{p, {1.0, 0.0}}, e1{r, {0.0, 1.0}};
    if (r < p) std::swap(e0, e1);
    return {e0, e1};
  }
  const double mean = 0.5 * (p + r);
  const double rad = std::hypot(0.5 * (p - r), std::abs(q));
  std::array<Eigenpair, 2> out;
  const double values[2] = {mean - rad, mean + rad};
  for (int k = 0; k < 2; ++k) {
    const double lam = values[k];
    // (H - lam) v = 0: either row gives a null vector; take the longer one.
    Vec2 v1{q, lam - p};
    Vec2 v2{lam - r, std::conj(q)};
    const double n1 = std::hypot(std::abs(v1[0]), std::abs(v1[1]));
    const double n2 = std::hypot(std::abs(v2[0]), std::abs(v2[1]));
    Vec2 v = n1 >= n2 ? v1 : v2;
    const double nv = std::max(n1, n2);
    const int lead = std::abs(v[0]) > 1e-14 * nv ? 0 : 1;
    const cplx phase = std::conj(v[lead]) / std::abs(v[lead]);
    for (auto& c : v) c *= phase / nv;
    v[lead] = v[lead].real();
    out[k] = {lam, v};
  }
  return out;
}

CompositeAmplitudes evolve(const JCParams& p, double tau, const EvalConfig& cfg) {
  p.validate();
  if (p.delta != 0.0) throw Error(ErrorCode::DetuningUnsupported, "evolution requires zero detuning");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");
  const Factors f = factors(p, tau, false, cfg);
  return {p.a * p.b * (f.e2 - f.e1), p.b * p.b * (f.e2 + f.e1)};
}

DensityMatrix2 reduced_density(const CompositeAmplitudes& amps, const JCParams& p) {
  (void)p;
  const double pg = std::norm(amps.c_g), pe = std::norm(amps.c_e);
  const double total = pg + pe;
  if (!(total >= 1e-300)) throw Error(ErrorCode::DegenerateState, "composite state has vanishing norm");
  if (!std::isfinite(total)) throw Error(ErrorCode::NonFinite, "composite amplitudes are not finite");
  return {Mat2::diag(pg / total, pe / total)};
}

DiagonalSample diagonal_sample(const JCParams& p, double t, const EvalConfig& cfg) {
  p.validate();
  if (p.delta != 0.0) throw Error(ErrorCode::DetuningUnsupported, "evolution requires zero detuning");
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "derivative needs t > 0");
  const Factors f = factors(p, t, true, cfg);
  const double a2b2 = p.a * p.a * p.b * p.b, b4 = p.b * p.b * p.b * p.b;
  const cplx s = f.e2 + f.e1, d = f.e2 - f.e1;
  const cplx ds = f.d2 + f.d1, dd = f.d2 - f.d1;
  const double u = b4 * std::norm(s), v = a2b2 * std::norm(d);
  const double du = 2.0 * b4 * (std::conj(s) * ds).real();
  const double dv = 2.0 * a2b2 * (std::conj(d) * dd).real();
  const double total = u + v;
  if (!(total >= 1e-300)) throw Error(ErrorCode::DegenerateState, "composite state has vanishing norm");
  const DiagonalSample out{u / total, v / total, (du * v - u * dv) / (total * total)};
  if (!std::isfinite(out.drho_ee) || !std::isfinite(out.rho_ee))
    throw Error(ErrorCode::NonFinite, "density derivative is not finite");
  return out;
}

Mat2 density_derivative(const JCParams& p, double t, DerivativeMethod method, const EvalConfig& cfg, double step) {
  double x;
  if (method == DerivativeMethod::Analytic) {
    x = diagonal_sample(p, t, cfg).drho_ee;
  } else {
    if (!(step > 0.0) || t + step == t || t - step == t)
      throw Error(ErrorCode::StepTooSmall, "finite-difference step is degenerate at this t");
    if (t < step) throw Error(ErrorCode::StepTooSmall, "finite differences need t >= step");
    const double up = reduced_density(evolve(p, t + step, cfg), p).rho_ee();
    const double down = reduced_density(evolve(p, t - step, cfg), p).rho_ee();
    x = (up - down) / (2.0 * step);
  }
  return Mat2::diag(-x, x);
}

double oscillation_frequency(const JCParams& p) {
  const double g = p.coupling();
  if (p.beta == 1.0 || g == 0.0) return g;
  return std::max(g, std::pow(g, 1.0 / p.beta));
}

std::vector<double> GridSpec::resolve(const JCParams& p, double tau) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be > 0");
  if (!(grading >= 1.0)) throw Error(ErrorCode::InvalidArgument, "grading exponent must be >= 1");
  double cells = points;
  if (points <= 0) {
    cells = std::ceil(cells_per_half_period * tau * oscillation_frequency(p) / std::numbers::pi);
    cells = std::max<double>(cells, min_points);
  }
  if (cells > kMaxCells) throw Error(ErrorCode::InvalidArgument, "trajectory grid would exceed the cell budget");
  const int n = static_cast<int>(cells);
  std::vector<double> t;
  t.reserve(n + required.size());
  for (int k = 1; k <= n; ++k) t.push_back(k == n ? tau : tau * std::pow(static_cast<double>(k) / n, grading));
  for (double r : required) {
    if (!(r > 0.0 && r <= tau)) throw Error(ErrorCode::InvalidArgument, "required grid node outside (0, tau]");
    t.push_back(r);
  }
  std::sort(t.begin(), t.end());
  // Merge nodes closer than a relative 1e-12; exact required values win.
  std::vector<double> out;
  for (double x : t) {
    if (!out.empty() && x - out.back() <= 1e-12 * tau) {
      if (std::find(required.begin(), required.end(), x) != required.end()) out.back() = x;
      continue;
    }
    out.push_back(x);
  }
  if (out.size() < 16) throw Error(ErrorCode::GridTooCoarse, "trajectory grid needs at least 16 points");
  return out;
}

Trajectory make_trajectory(const JCParams& p, double tau, const GridSpec& grid, const EvalConfig& cfg) {
  p.validate();
  Trajectory tr;
  tr.params = p;
  tr.tau = tau;
  tr.times = grid.resolve(p, tau);
  tr.states.reserve(tr.times.size());
  tr.derivatives.reserve(tr.times.size());
  for (double t : tr.times) {
    const DiagonalSample s = diagonal_sample(p, t, cfg);
    tr.states.push_back({Mat2::diag(s.rho_gg, s.rho_ee)});
    tr.derivatives.push_back(Mat2::diag(-s.drho_ee, s.drho_ee));
  }
  tr.validate();
  return tr;
}

}  // namespace fqsl
