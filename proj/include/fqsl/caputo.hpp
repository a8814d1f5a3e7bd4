#pragma once

#include <vector>

#include "fqsl/matrix2.hpp"

namespace fqsl {

/// Samples of a function on a grid starting at t = 0.
template <class V>
struct Sampled {
  std::vector<double> times;
  std::vector<V> values;

  // Throws GridTooCoarse / InvalidArgument on malformed grids.
  void validate() const;
  // True when the spacing is uniform to 1e-9 relative.
  bool uniform() const;
};

using SampledSignal = Sampled<cplx>;
using SampledState = Sampled<Vec2>;

struct CaputoOptions {
  // Exponents sigma (> 0) for which the scheme is made exact on t^sigma by
  // correction weights on the first samples. Empty means the plain L1 rule.
  std::vector<double> correction_orders;
};

/// L1 product-integration estimate of the Caputo derivative D^beta f at
/// times[t_index], 0 < beta < 1.
cplx caputo_derivative(const SampledSignal& signal, double beta, int t_index, const CaputoOptions& opt = {});

/// The same estimate at every node 1..N-1 (index 0 is left as 0); shares the
/// weight tables, so it costs one O(N^2) pass instead of N.
std::vector<cplx> caputo_derivative_all(const SampledSignal& signal, double beta, const CaputoOptions& opt = {});

/// max over interior nodes of |i^beta D^beta psi - H psi|. beta = 1 uses
/// central differences; beta < 1 uses the L1 rule corrected for the
/// t^beta, t^{2 beta}, t^{3 beta} behaviour of the evolution at t = 0.
double tfse_residual(double beta, const Mat2& hamiltonian, const SampledState& trajectory);

}  // namespace fqsl
