#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "fqsl/matrix2.hpp"
#include "fqsl/mlfun.hpp"

namespace fqsl {

/// Resonant dissipative Jaynes-Cummings qubit. The cavity starts in the Fock
/// state |n>, the atom in |e>; (a, b) weight the interaction eigenvectors.
/// The bare frequencies enter only through delta = omega_0 - omega_j.
struct JCParams {
  double beta = 1.0;
  double lambda = 0.5;
  int n = 20;
  double a = std::sqrt(0.5);
  double b = std::sqrt(0.5);
  double delta = 0.0;

  void validate() const;
  // g = lambda sqrt(n + 1)
  double coupling() const { return lambda * std::sqrt(n + 1.0); }
  // false when (a, b) differ from the symmetric 1/sqrt(2) weights
  bool default_weights() const;
};

/// Unnormalized amplitudes on |g, n+1> and |e, n>.
struct CompositeAmplitudes {
  cplx c_g;
  cplx c_e;
};

/// Qubit density matrix in the basis {|g>, |e>}.
struct DensityMatrix2 {
  Mat2 m;

  double rho_gg() const { return m(0, 0).real(); }
  double rho_ee() const { return m(1, 1).real(); }
  // Hermitian, unit trace, positive semidefinite (to 1e-12).
  void validate() const;
};

struct Trajectory {
  JCParams params;
  double tau = 0.0;
  // Samples on (0, tau]; the state at t = 0 is |e><e|.
  std::vector<double> times;
  std::vector<DensityMatrix2> states;
  std::vector<Mat2> derivatives;

  // Checks every sample; throws InvariantViolation.
  void validate() const;
};

/// Off-diagonals lambda sqrt(n+1) e^{-+ i delta t} in the basis {|g,n+1>, |e,n>}.
Mat2 interaction_hamiltonian(double lambda, int n, double delta, double t);

struct Eigenpair {
  double value;
  Vec2 vector;
};

/// Eigenpairs of a Hermitian 2x2 matrix, ascending, unit vectors whose first
/// nonzero component is real and positive.
std::array<Eigenpair, 2> spectral_decomposition(const Mat2& h);

CompositeAmplitudes evolve(const JCParams& p, double tau, const EvalConfig& cfg = {});

DensityMatrix2 reduced_density(const CompositeAmplitudes& amps, const JCParams& p);

enum class DerivativeMethod { Analytic, FiniteDifference };

/// d rho_S / dt at t. The analytic route differentiates rho_ee = u / (u + v)
/// through ml_time_derivative; the finite-difference route uses a central
/// difference of rho_ee with the given step.
Mat2 density_derivative(const JCParams& p, double t, DerivativeMethod method, const EvalConfig& cfg = {},
                        double step = 1e-5);

/// rho_ee and its analytic derivative from one pair of evaluations.
struct DiagonalSample {
  double rho_ee;
  double rho_gg;
  double drho_ee;
};
DiagonalSample diagonal_sample(const JCParams& p, double t, const EvalConfig& cfg = {});

/// Characteristic angular frequency of rho_ee: g for beta = 1, and the
/// pole frequency g^{1/beta} of the Mittag-Leffler factors otherwise.
double oscillation_frequency(const JCParams& p);

struct GridSpec {
  // Number of cells on (0, tau]; 0 picks a count from oscillation_frequency.
  int points = 0;
  int min_points = 32;
  // Cells per half period of the characteristic oscillation.
  double cells_per_half_period = 2.0;
  // Nodes t_k = tau (k/N)^grading.
  double grading = 1.0;
  // Extra nodes to include (used by tau sweeps); must lie in (0, tau].
  std::vector<double> required;

  std::vector<double> resolve(const JCParams& p, double tau) const;
};

Trajectory make_trajectory(const JCParams& p, double tau, const GridSpec& grid = {}, const EvalConfig& cfg = {});

}  // namespace fqsl
