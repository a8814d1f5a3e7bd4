#include "fqsl/caputo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fqsl/error.hpp"

namespace fqsl {

namespace {

void check_order(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw Error(ErrorCode::InvalidOrder, "Caputo L1 scheme needs 0 < beta < 1, got " + std::to_string(beta));
}

// Kernel weights of the L1 rule: D f(t_n) = sum_{k<n} (f_{k+1} - f_k) K(n, k).
class L1Kernel {
 public:
  L1Kernel(const std::vector<double>& t, double beta, bool uniform) : t_(t), beta_(beta), uniform_(uniform) {
    norm_ = 1.0 / std::tgamma(2.0 - beta);
    if (uniform_) {
      h_ = t.size() > 1 ? (t.back() - t.front()) / static_cast<double>(t.size() - 1) : 1.0;
      const double e = 1.0 - beta;
      table_.resize(t.size());
      double prev = 0.0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        const double cur = std::pow(static_cast<double>(j + 1), e);
        table_[j] = (cur - prev) * std::pow(h_, -beta) * norm_;
        prev = cur;
      }
    }
  }

  double operator()(std::size_t n, std::size_t k) const {
    if (uniform_) return table_[n - k - 1];
    const double e = 1.0 - beta_;
    const double hk = t_[k + 1] - t_[k];
    return (std::pow(t_[n] - t_[k], e) - std::pow(t_[n] - t_[k + 1], e)) / hk * norm_;
  }

  template <class V>
  V apply(const std::vector<V>& f, std::size_t n) const {
    V sum{};
    for (std::size_t k = 0; k < n; ++k) sum += (f[k + 1] - f[k]) * (*this)(n, k);
    return sum;
  }

 private:
  const std::vector<double>& t_;
  double beta_;
  bool uniform_;
  double h_ = 1.0;
  double norm_ = 1.0;
  std::vector<double> table_;
};

// Solves A x = r for small dense systems by partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> r) {
  const std::size_t m = r.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < m; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    if (a[piv][c] == 0.0) throw Error(ErrorCode::GridTooCoarse, "singular correction-weight system");
    std::swap(a[c], a[piv]);
    std::swap(r[c], r[piv]);
    for (std::size_t i = c + 1; i < m; ++i) {
      const double f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < m; ++j) a[i][j] -= f * a[c][j];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> x(m);
  for (std::size_t i = m; i-- > 0;) {
    double s = r[i];
    for (std::size_t j = i + 1; j < m; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Correction weights w[n][j] (j = 1..m, applied to f_j - f_0) making the
// corrected rule exact on t^sigma at every node n.
class Correction {
 public:
  Correction(const std::vector<double>& t, double beta, const L1Kernel& kernel, const std::vector<double>& orders)
      : m_(orders.size()) {
    if (m_ == 0) return;
    if (t.size() <= m_) throw Error(ErrorCode::GridTooCoarse, "too few samples for the correction weights");
    for (double s : orders)
      if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "correction exponents must be positive");
    const std::size_t n = t.size();
    // Scale by t_1 so the matrix entries are O(1).
    const double scale = t[1];
    std::vector<std::vector<double>> powers(m_, std::vector<double>(n));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = 0; k < n; ++k) powers[i][k] = std::pow(t[k] / scale, orders[i]);
    std::vector<std::vector<double>> a(m_, std::vector<double>(m_));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < m_; ++j) a[i][j] = powers[i][j + 1];
    weights_.assign(n, std::vector<double>(m_, 0.0));
    for (std::size_t node = 1; node < n; ++node) {
      std::vector<double> r(m_);
      for (std::size_t i = 0; i < m_; ++i) {
        const double s = orders[i];
        const double exact =
            std::exp(std::lgamma(s + 1.0) - std::lgamma(s + 1.0 - beta)) * std::pow(t[node] / scale, s - beta) *
            std::pow(scale, -beta);
        r[i] = exact - kernel.apply(powers[i], node);
      }
      weights_[node] = solve_dense(a, r);
    }
  }

  template <class V>
  V apply(const std::vector<V>& f, std::size_t node) const {
    V sum{};
    for (std::size_t j = 0; j < m_; ++j) sum += (f[j + 1] - f[0]) * weights_[node][j];
    return sum;
  }

 private:
  std::size_t m_;
  std::vector<std::vector<double>> weights_;
};

}  // namespace

template <class V>
void Sampled<V>::validate() const {
  if (times.size() != values.size())
    throw Error(ErrorCode::InvalidArgument, "times and values differ in length");
  if (times.size() < 2) throw Error(ErrorCode::GridTooCoarse, "need at least 2 samples");
  if (times.front() != 0.0) throw Error(ErrorCode::InvalidArgument, "sampled signal must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error(ErrorCode::InvalidArgument, "times must be strictly increasing");
}

template <class V>
bool Sampled<V>::uniform() const {
  if (times.size() < 3) return true;
  const double h = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * h) return false;
  return true;
}

template struct Sampled<cplx>;
template struct Sampled<Vec2>;

cplx caputo_derivative(const SampledSignal& signal, double beta, int t_index, const CaputoOptions& opt) {
  check_order(beta);
  signal.validate();
  if (t_index < 1 || static_cast<std::size_t>(t_index) >= signal.times.size())
    throw Error(ErrorCode::GridTooCoarse, "t_index must have at least one preceding sample");
  const L1Kernel kernel(signal.times, beta, signal.uniform());
  cplx d = kernel.apply(signal.values, t_index);
  if (!opt.correction_orders.empty()) {
    const Correction corr(signal.times, beta, kernel, opt.correction_orders);
    d += corr.apply(signal.values, t_index);
  }
  return d;
}

std::vector<cplx> caputo_derivative_all(const SampledSignal& signal, double beta, const CaputoOptions& opt) {
  check_order(beta);
  signal.validate();
  const L1Kernel kernel(signal.times, beta, signal.uniform());
  const Correction corr(signal.times, beta, kernel, opt.correction_orders);
  std::vector<cplx> out(signal.times.size());
  for (std::size_t n = 1; n < out.size(); ++n) out[n] = kernel.apply(signal.values, n) + corr.apply(signal.values, n);
  return out;
}

double tfse_residual(double beta, const Mat2& h, const SampledState& traj) {
  traj.validate();
  if (hermitian_defect(h) > 1e-12 * std::max(1.0, h.max_abs()))
    throw Error(ErrorCode::NotHermitian, "TFSE Hamiltonian must be Hermitian");
  const auto& t = traj.times;
  const auto& psi = traj.values;
  const std::size_t n = t.size();
  if (n < 3) throw Error(ErrorCode::GridTooCoarse, "TFSE residual needs an interior node");
  double worst = 0.0;

  if (beta == 1.0) {
    const cplx i{0.0, 1.0};
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double hm = t[k] - t[k - 1], hp = t[k + 1] - t[k];
      Vec2 r = h * psi[k];
      for (int c = 0; c < 2; ++c) {
        // Three-point derivative, second order on non-uniform grids.
        const cplx d = (psi[k + 1][c] - psi[k][c]) * (hm / (hp * (hm + hp))) +
                       (psi[k][c] - psi[k - 1][c]) * (hp / (hm * (hm + hp)));
        r[c] = i * d - r[c];
      }
      worst = std::max(worst, std::hypot(std::abs(r[0]), std::abs(r[1])));
    }
    return worst;
  }

  check_order(beta);
  const CaputoOptions opt{{beta, 2.0 * beta, 3.0 * beta}};
  std::array<std::vector<cplx>, 2> deriv;
  for (int c = 0; c < 2; ++c) {
    SampledSignal comp{t, std::vector<cplx>(n)};
    for (std::size_t k = 0; k < n; ++k) comp.values[k] = psi[k][c];
    deriv[c] = caputo_derivative_all(comp, beta, opt);
  }
  const cplx ib = std::polar(1.0, 0.5 * beta * std::numbers::pi);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const Vec2 hp = h * psi[k];
    const cplx r0 = ib * deriv[0][k] - hp[0];
    const cplx r1 = ib * deriv[1][k] - hp[1];
    worst = std::max(worst, std::hypot(std::abs(r0), std::abs(r1)));
  }
  return worst;
}

}  // namespace fqsl
