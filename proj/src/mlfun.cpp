#include "fqsl/mlfun.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <memory>
#include <string>
#include <cmath>
#include <numbers>
#include <vector>

#include "fqsl/error.hpp"
#include "fqsl/quadrature.hpp"

namespace fqsl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

constexpr double kSeriesMaxAbs = 5.0;
constexpr double kSeriesMaxPole = 10.0;
constexpr double kAsymptoticMinPole = 40.0;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx checked(cplx v, const char* where) {
  if (!finite(v)) throw Error(ErrorCode::NonFinite, std::string(where) + " produced a non-finite value");
  return v;
}

// Poles s_k = z^{1/beta} e^{2 pi i k / beta} of s^{beta-gamma} / (s^beta - z)
// on the principal sheet, arg s_k in (-pi, pi].
std::vector<cplx> principal_poles(double beta, cplx z) {
  std::vector<cplx> poles;
  const double mod = std::pow(std::abs(z), 1.0 / beta);
  const double arg = std::arg(z);
  const int kmin = static_cast<int>(std::ceil((-beta * kPi - arg) / (2.0 * kPi))) - 1;
  const int kmax = static_cast<int>(std::floor((beta * kPi - arg) / (2.0 * kPi))) + 1;
  for (int k = kmin; k <= kmax; ++k) {
    const double phi = (arg + 2.0 * kPi * k) / beta;
    if (phi > -kPi && phi <= kPi) poles.push_back(std::polar(mod, phi));
  }
  return poles;
}

// Residue of e^s s^{beta-gamma} / (s^beta - z) at a simple pole s.
cplx pole_residue(const MLOrder& o, cplx s) { return std::exp(s + (1.0 - o.gamma) * std::log(s)) / o.beta; }

// Quadrature nodes of the Hankel contour (rays at +-theta from radius 1, unit
// arc) with everything except the 1/(s^beta - z) factor folded into coef.
// Gauss-Legendre on the arc and on the stretch [1, 5] of the rays, close to
// the branch point at 0; Gauss-Laguerre beyond, where the integrand is e^{-x}
// times a smooth factor for x = |cos theta| (r - 5). Each piece carries a
// sequence of increasing orders.
struct ContourNode {
  cplx coef;
  cplx sb;
};

struct ContourTable {
  double beta, gamma, theta;
  std::array<std::vector<std::vector<ContourNode>>, 3> pieces;
};

ContourTable build_table(const MLOrder& o, double theta) {
  ContourTable t{o.beta, o.gamma, theta, {}};
  const cplx up = std::polar(1.0, theta);
  const cplx down = std::conj(up);
  const double split = 5.0;
  const double decay = std::abs(std::cos(theta));
  auto push = [&](std::vector<ContourNode>& out, cplx s, cplx weight) {
    const cplx ls = std::log(s);
    out.push_back({weight * std::exp(s + (o.beta - o.gamma) * ls), std::exp(o.beta * ls)});
  };
  auto ray_pair = [&](std::vector<ContourNode>& out, double r, double w) {
    push(out, r * up, w * up);
    push(out, r * down, -w * down);
  };
  for (int n : {12, 18, 27, 40}) {
    const auto& rule = quad::gauss_legendre(n);
    std::vector<ContourNode> level;
    for (int i = 0; i < n; ++i) ray_pair(level, 3.0 + 2.0 * rule.nodes[i], 2.0 * rule.weights[i]);
    t.pieces[0].push_back(std::move(level));
  }
  for (int n : {16, 24, 32, 48}) {
    const auto& rule = quad::gauss_laguerre(n);
    std::vector<ContourNode> level;
    for (int i = 0; i < n; ++i)
      ray_pair(level, split + rule.nodes[i] / decay, rule.weights[i] * std::exp(rule.nodes[i]) / decay);
    t.pieces[1].push_back(std::move(level));
  }
  for (int n : {16, 24, 32, 48}) {
    const auto& rule = quad::gauss_legendre(n);
    std::vector<ContourNode> level;
    for (int i = 0; i < n; ++i) {
      const cplx s = std::polar(1.0, theta * rule.nodes[i]);
      push(level, s, theta * rule.weights[i] * kI * s);
    }
    t.pieces[2].push_back(std::move(level));
  }
  return t;
}

// 1/Gamma(beta j + gamma) for beta j + gamma < 170, per thread and order.
const std::vector<double>& series_coefficients(const MLOrder& o) {
  struct Entry {
    double beta, gamma;
    std::vector<double> coef;
  };
  thread_local std::vector<Entry> cache;
  for (const auto& e : cache)
    if (e.beta == o.beta && e.gamma == o.gamma) return e.coef;
  if (cache.size() >= 16) cache.erase(cache.begin());
  Entry e{o.beta, o.gamma, {}};
  for (int j = 0; o.beta * j + o.gamma < 170.0; ++j) e.coef.push_back(1.0 / std::tgamma(o.beta * j + o.gamma));
  cache.push_back(std::move(e));
  return cache.back().coef;
}

// 1/Gamma(gamma - beta k) and lgamma(1 - gamma + beta k), k >= 1, extended
// on demand; per thread and order.
struct AsymptoticCoefficients {
  double beta, gamma;
  std::vector<double> rg, lg;

  void extend(std::size_t k) {
    while (rg.size() <= k) {
      const double x = gamma - beta * static_cast<double>(rg.size());
      rg.push_back(rg.empty() ? 0.0 : ml::rgamma(x));
      lg.push_back(std::lgamma(1.0 - x));
    }
  }
};

AsymptoticCoefficients& asymptotic_coefficients(const MLOrder& o) {
  thread_local std::vector<std::unique_ptr<AsymptoticCoefficients>> cache;
  for (auto& e : cache)
    if (e->beta == o.beta && e->gamma == o.gamma) return *e;
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.push_back(std::make_unique<AsymptoticCoefficients>(AsymptoticCoefficients{o.beta, o.gamma, {}, {}}));
  return *cache.back();
}

// Per-thread memo of recent tables; entries are pure functions of the key.
const ContourTable& contour_table(const MLOrder& o, double theta) {
  thread_local std::vector<std::unique_ptr<ContourTable>> cache;
  for (const auto& e : cache)
    if (e->beta == o.beta && e->gamma == o.gamma && e->theta == theta) return *e;
  if (cache.size() >= 16) cache.erase(cache.begin());
  cache.push_back(std::make_unique<ContourTable>(build_table(o, theta)));
  return *cache.back();
}

}  // namespace

void EvalConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_terms < 1 || quad_points < 2 || !(quad_cutoff > 0.0))
    throw Error(ErrorCode::InvalidArgument, "EvalConfig requires positive tolerances, max_terms >= 1, "
                                            "quad_points >= 2 and quad_cutoff > 0");
}

void MLOrder::validate() const {
  if (!(beta > 0.0 && beta <= 1.0) || !(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidOrder, "need 0 < beta <= 1 and gamma > 0, got beta=" + std::to_string(beta) +
                                             " gamma=" + std::to_string(gamma));
}

namespace ml {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Exponential: return "exponential";
    case Regime::Series: return "series";
    case Regime::Contour: return "contour";
    case Regime::Asymptotic: return "asymptotic";
  }
  return "unknown";
}

double rgamma(double x) {
  if (x > 0.0) return x < 171.0 ? 1.0 / std::tgamma(x) : 0.0;
  if (x == std::floor(x)) return 0.0;
  // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
  return std::sin(kPi * x) * std::exp(std::lgamma(1.0 - x)) / kPi;
}

Regime select_regime(const MLOrder& o, cplx z) {
  if (o.beta == 1.0 && o.gamma == 1.0) return Regime::Exponential;
  const double az = std::abs(z);
  if (az == 0.0) return Regime::Series;
  const double pole = std::pow(az, 1.0 / o.beta);
  if (az <= kSeriesMaxAbs && pole <= kSeriesMaxPole) return Regime::Series;
  if (pole >= kAsymptoticMinPole) return Regime::Asymptotic;
  return Regime::Contour;
}

namespace {

// Taylor sum; `magnitude` receives sum |term|, the scale of its rounding error.
cplx series_sum(const MLOrder& o, cplx z, const EvalConfig& cfg, double& magnitude) {
  cplx sum = rgamma(o.gamma);
  magnitude = std::abs(sum);
  const double az = std::abs(z);
  if (az == 0.0) return sum;
  const double log_az = std::log(az);
  const double arg_z = std::arg(z);
  const std::vector<double>& coef = series_coefficients(o);
  cplx power = 1.0;
  bool direct = true;
  double prev_log = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= cfg.max_terms; ++j) {
    const double x = o.beta * j + o.gamma;
    const double log_mag = j * log_az - std::lgamma(x);
    cplx term;
    if (direct) {
      power *= z;
      if (static_cast<std::size_t>(j) < coef.size() && std::abs(power) < 1e300) {
        term = power * coef[j];
      } else {
        direct = false;
      }
    }
    if (!direct) term = std::polar(std::exp(log_mag), j * arg_z);
    sum += term;
    magnitude += std::abs(term);
    const bool decreasing = log_mag < prev_log;
    prev_log = log_mag;
    if (decreasing && std::abs(term) <= 1e-3 * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(sum)))
      return checked(sum, "ml_series");
  }
  throw Error(ErrorCode::NonConvergence,
              "Taylor series did not converge within " + std::to_string(cfg.max_terms) + " terms");
}

}  // namespace

cplx ml_series(const MLOrder& o, cplx z, const EvalConfig& cfg) {
  o.validate();
  double magnitude = 0.0;
  return series_sum(o, z, cfg, magnitude);
}

cplx ml_split(double beta, double alpha, double t, const EvalConfig& cfg) {
  cfg.validate();
  MLOrder{beta, 1.0}.validate();
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "ml_split requires t > 0");
  if (alpha == 0.0 || !std::isfinite(alpha))
    throw Error(ErrorCode::InvalidArgument, "ml_split requires a finite nonzero eigenvalue");
  if (beta == 1.0) return std::exp(-kI * alpha * t);
  if (alpha < 0.0)
    throw Error(ErrorCode::BranchDomain, "principal alpha^(1/beta) leaves the first sheet for alpha < 0; "
                                         "use ml_global");

  // E_beta(w t^beta) with w = (-i)^beta alpha; the pole w^{1/beta} = -i alpha^{1/beta}.
  const cplx w = alpha * std::polar(1.0, -0.5 * beta * kPi);
  const cplx oscillation = std::exp(-kI * std::pow(alpha, 1.0 / beta) * t) / beta;
  const cplx scale = w * std::sin(beta * kPi) / kPi;
  const double c2 = 2.0 * std::cos(beta * kPi);

  auto kernel = [&](double r) -> cplx {
    if (r <= 0.0) return 0.0;
    const double rb = std::pow(r, beta);
    return std::exp(-r * t) * std::pow(r, beta - 1.0) / (rb * rb - c2 * w * rb + w * w);
  };

  const double R = cfg.quad_cutoff;
  const double umax = R / (1.0 + R);
  const double umid = 0.5 * umax;
  const double q = 1.0 / beta;
  const auto& gl = quad::gauss_legendre(cfg.quad_points);

  // Graded composite rule on v in [0,1] for both halves of [0, umax]:
  // u = umid v^q near 0 and u = umax - (umax - umid) v^q near umax.
  auto composite = [&](int panels) {
    cplx total = 0.0;
    for (int side = 0; side < 2; ++side) {
      for (int p = 0; p < panels; ++p) {
        const double v0 = static_cast<double>(p) / panels;
        const double v1 = static_cast<double>(p + 1) / panels;
        const double c = 0.5 * (v0 + v1);
        const double h = 0.5 * (v1 - v0);
        for (int k = 0; k < cfg.quad_points; ++k) {
          const double v = c + h * gl.nodes[k];
          const double dv = q * std::pow(v, q - 1.0);
          double u, du;
          if (side == 0) {
            u = umid * std::pow(v, q);
            du = umid * dv;
          } else {
            u = umax - (umax - umid) * std::pow(v, q);
            du = (umax - umid) * dv;
          }
          const double one_minus_u = 1.0 - u;
          const double r = u / one_minus_u;
          total += h * gl.weights[k] * kernel(r) * du / (one_minus_u * one_minus_u);
        }
      }
    }
    return total;
  };

  cplx prev = composite(4);
  for (int panels = 8; panels <= 4096; panels *= 2) {
    const cplx cur = composite(panels);
    const cplx value = oscillation - scale * cur;
    if (std::abs(scale * (cur - prev)) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
      const double rb = std::pow(R, beta);
      if (rb <= 2.0 * std::abs(w))
        throw Error(ErrorCode::QuadratureFailure, "quad_cutoff too small for the eigenvalue");
      const double tail = std::abs(scale) * std::exp(-R * t) / (beta * (rb - std::abs(w)));
      if (tail > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)))
        throw Error(ErrorCode::QuadratureFailure, "truncated tail beyond quad_cutoff is not negligible");
      return checked(value, "ml_split");
    }
    prev = cur;
  }

  // Small t pushes the e^{-rt} cutoff into the corner u -> 1; integrate in
  // s = log r instead, where both the r^{beta-1} end and the cutoff decay fast.
  const double s_lo = std::log(std::pow(std::abs(w), q)) - 40.0 / beta;
  const double s_hi = std::min(std::log(R), std::log(40.0 / t));
  cplx integral = 0.0;
  double err = 0.0;
  const bool ok = quad::integrate_adaptive<cplx>(
      [&](double s) {
        const double r = std::exp(s);
        return kernel(r) * r;
      },
      s_lo, s_hi, cfg.abs_tol / std::abs(scale), cfg.rel_tol, 2000, integral, err);
  if (!ok) throw Error(ErrorCode::QuadratureFailure, "split-representation integral did not stabilize");
  return checked(oscillation - scale * integral, "ml_split");
}

cplx ml_contour(const MLOrder& o, cplx z, const EvalConfig& cfg) {
  o.validate();
  cfg.validate();
  const double rho = 1.0;
  const auto poles = principal_poles(o.beta, z);

  // Ray angle in (pi/2, pi). Angles near pi give short, weakly oscillating
  // rays, so take the largest candidate that keeps clear of every pole
  // direction, falling back to the one farthest from them.
  double theta = 0.9 * kPi;
  double best = -1.0;
  for (double frac : {0.9, 0.8, 0.7, 0.6}) {
    double dist = kPi;
    for (const cplx& s : poles) dist = std::min(dist, std::abs(std::abs(std::arg(s)) - frac * kPi));
    if (dist >= 0.08 * kPi) {
      theta = frac * kPi;
      break;
    }
    if (dist > best) {
      best = dist;
      theta = frac * kPi;
    }
  }

  cplx residues = 0.0;
  for (const cplx& s : poles) {
    if (std::abs(s) <= rho)
      throw Error(ErrorCode::QuadratureFailure, "pole inside the contour arc; use the series");
    if (std::abs(std::arg(s)) < theta) residues += pole_residue(o, s);
  }

  auto f = [&](cplx s) { return std::exp(s + (o.beta - o.gamma) * std::log(s)) / (std::exp(o.beta * std::log(s)) - z); };
  const cplx up = std::polar(1.0, theta);
  const cplx down = std::conj(up);
  const double rmax = rho + 45.0 / std::abs(std::cos(theta));
  auto rays = [&](double r) { return f(r * up) * up - f(r * down) * down; };
  auto arc = [&](double phi) {
    const cplx s = std::polar(rho, phi);
    return f(s) * kI * s;
  };

  // Fast path: fixed rules whose nodes depend only on (beta, gamma, theta).
  {
    const ContourTable& table = contour_table(o, theta);
    const double target = 2.0 * kPi * std::max(cfg.abs_tol, cfg.rel_tol * std::abs(residues)) / 3.0;
    cplx sum = 0.0;
    bool ok = true;
    for (const auto& levels : table.pieces) {
      cplx prev = 0.0;
      bool done = false;
      for (std::size_t l = 0; l < levels.size() && !done; ++l) {
        cplx cur = 0.0;
        for (const auto& node : levels[l]) cur += node.coef / (node.sb - z);
        if (l > 0 && std::abs(cur - prev) <= std::max(target, 2.0 * kPi * cfg.rel_tol * std::abs(cur) / 3.0)) {
          sum += cur;
          done = true;
        }
        prev = cur;
      }
      if (!done) {
        ok = false;
        break;
      }
    }
    if (ok) return checked(residues + sum / (2.0 * kPi * kI), "ml_contour");
  }

  const double tol_abs = 2.0 * kPi * cfg.abs_tol;
  cplx ray_val, arc_val;
  double ray_err = 0.0, arc_err = 0.0;
  const bool ok_arc = quad::integrate_adaptive<cplx>(arc, -theta, theta, tol_abs, cfg.rel_tol, 400, arc_val, arc_err);
  const bool ok_ray = quad::integrate_adaptive<cplx>(rays, rho, rmax, tol_abs, cfg.rel_tol, 400, ray_val, ray_err);
  const cplx integral = (ray_val + arc_val) / (2.0 * kPi * kI);
  const cplx value = residues + integral;
  // The per-segment targets can be unreachable when the segments cancel; accept
  // if the combined error meets the target relative to the final value.
  if (!(ok_arc && ok_ray)) {
    const double err = (ray_err + arc_err) / (2.0 * kPi);
    if (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)) * 10.0)
      throw Error(ErrorCode::QuadratureFailure, "Hankel contour integral did not converge");
  }
  return checked(value, "ml_contour");
}

cplx ml_asymptotic(const MLOrder& o, cplx z, const EvalConfig& cfg) {
  o.validate();
  const double az = std::abs(z);
  if (az == 0.0) throw Error(ErrorCode::InvalidArgument, "asymptotic expansion needs z != 0");
  cplx exponential = 0.0;
  for (const cplx& s : principal_poles(o.beta, z))
    if (std::abs(std::arg(s)) < kPi) exponential += pole_residue(o, s);

  const double log_az = std::log(az);
  const cplx inv_z = 1.0 / z;
  cplx power = 1.0;
  cplx algebraic = 0.0;
  double min_env = std::numeric_limits<double>::infinity();
  AsymptoticCoefficients& coef = asymptotic_coefficients(o);
  for (int k = 1; k <= cfg.max_terms; ++k) {
    power *= inv_z;
    coef.extend(k);
    const double x = o.gamma - o.beta * k;
    algebraic -= power * coef.rg[k];
    if (x > 0.0) continue;
    // Envelope |z|^-k |1/Gamma(x)| without the oscillating sin(pi x) factor;
    // it decreases until beta k ~ |z|^{1/beta} and grows afterwards.
    const double env = std::exp(coef.lg[k] - k * log_az) / kPi;
    const double scale = std::abs(exponential + algebraic);
    if (env <= 1e-3 * std::max(cfg.abs_tol, cfg.rel_tol * scale)) return checked(exponential + algebraic, "ml_asymptotic");
    if (env > 1e3 * min_env)
      throw Error(ErrorCode::NonConvergence, "asymptotic series diverged before reaching tolerance");
    min_env = std::min(min_env, env);
  }
  throw Error(ErrorCode::NonConvergence, "asymptotic series exceeded max_terms");
}

cplx ml_global(const MLOrder& o, cplx z, const EvalConfig& cfg) {
  o.validate();
  if (!finite(z)) throw Error(ErrorCode::NonFinite, "Mittag-Leffler argument is not finite");
  switch (select_regime(o, z)) {
    case Regime::Exponential: return checked(std::exp(z), "ml_global");
    case Regime::Series: {
      double magnitude = 0.0;
      const cplx sum = series_sum(o, z, cfg, magnitude);
      // Heavy cancellation near the regime boundary: the contour is sharper.
      if (magnitude * 4.0 * std::numeric_limits<double>::epsilon() <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(sum)))
        return sum;
      try {
        return ml_contour(o, z, cfg);
      } catch (const Error&) {
        return sum;
      }
    }
    case Regime::Contour: return ml_contour(o, z, cfg);
    case Regime::Asymptotic: return ml_asymptotic(o, z, cfg);
  }
  return 0.0;
}

cplx ml_time_derivative(double beta, cplx c, double t, const EvalConfig& cfg) {
  MLOrder{beta, beta}.validate();
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "ml_time_derivative requires t > 0");
  if (c == 0.0) return 0.0;
  const double tb = std::pow(t, beta);
  return checked(c * (tb / t) * ml_global({beta, beta}, c * tb, cfg), "ml_time_derivative");
}

}  // namespace ml
}  // namespace fqsl
