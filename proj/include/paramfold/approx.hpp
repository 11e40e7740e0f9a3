#pragma once

// Order-by-order polynomial solutions (K_n, R_n) of the invariance equation
// F o K = K o R for a reduced map, with
//
//   R(t) = t + R_N t^N + R_{2N-1} t^{2N-1}
//
// and residual E_n = F o K_n - K_n o R of order (n + N, n + 2N - 1).

#include <span>
#include <utility>
#include <vector>

#include "paramfold/jets.hpp"
#include "paramfold/model.hpp"

namespace paramfold {

// Primary: the curve tangent to the x axis with K^y of order k+1 (case 1)
// or l (cases 2, 3). Secondary: the extra case-3 curve with K^y of order
// k-l+1, which exists when p is nonzero.
enum class Family { Primary, Secondary };

struct Parameterization {
  CaseTag tag = CaseTag::Case1;
  Branch branch = Branch::Stable;
  Family family = Family::Primary;
  int n = 0;  // approximation order
  int N = 0;  // exponent of the leading nonlinear term of R
  // Full coefficient arrays starting at t^0; K^x's lowest nonzero
  // coefficient is 1 at kx_base.
  Jet1 Kx;
  Jet1 Ky;
  int kx_base = 0;
  int ky_base = 0;
  Jet1 R;
  // E_n^x = O(t^(n + x_offset)), E_n^y = O(t^(n + y_offset)).
  int x_offset = 0;
  int y_offset = 0;

  double R_N() const { return R[N]; }
  double R_2Nm1() const { return R[2 * N - 1]; }
  Point eval(double t) const { return {Kx.eval(t), Ky.eval(t)}; }
  // Index of the R coefficient adjusted by the step from order n.
  int step_r_index(int order) const { return order + x_offset + 1 - kx_base; }
};

struct ResidualSample {
  double t;
  double ex;
  double ey;
};

struct ResidualReport {
  int n = 0;
  Jet1 Gx;  // jets of E_n through the degree cap
  Jet1 Gy;
  int first_nonzero_x = 0;
  int first_nonzero_y = 0;
  std::vector<ResidualSample> pointwise;
};

struct LeadingPair {
  double ky_lead;
  double R_N;
};

// Closed-form leading coefficients. Throws Hypothesis when no real curve
// exists on the requested branch.
LeadingPair leading_pair(const ReducedMap& rm, Branch branch, Family family = Family::Primary);

// Pair at the minimal order (2 in case 1, 1 otherwise).
Parameterization initial_pair(const ReducedMap& rm, Branch branch, Family family = Family::Primary);

struct ExtendOptions {
  // Value given to the new K^x coefficient at the singular step, where the
  // linear system leaves a one-parameter family of solutions.
  double tie_break_x = 0.0;
};

// One induction step n -> n+1. The two new K coefficients (and the R
// coefficient at the singular step) are obtained from the 2x2 affine system
// that zeroes [E^x]_{n+x_offset} and [E^y]_{n+y_offset}; the system is
// assembled by evaluating the residual jet at unit values of each unknown.
Parameterization extend_order(const ReducedMap& rm, const Parameterization& par,
                              const ExtendOptions& opts = {});

// Residual jets through degree n + y_offset + 3, with leading-order
// detection at relative tolerance 1e-11 and optional pointwise samples.
ResidualReport residual_report(const ReducedMap& rm, const Parameterization& par,
                               std::span<const double> sample_t = {});

// E_n as exact polynomials (no truncation), with the coefficients below the
// certified orders set to zero. Throws Numeric if those coefficients are not
// negligible.
std::pair<Jet1, Jet1> residual_polynomials(const ReducedMap& rm, const Parameterization& par);

struct ApproxOptions {
  Family family = Family::Primary;
  double tie_break_x = 0.0;
};

struct Approximation {
  Parameterization par;
  ResidualReport residual;
};

Approximation approximate(const ReducedMap& rm, Branch branch, int n, const ApproxOptions& opts = {});

// Relative tolerance of the order certificate.
inline constexpr double kOrderTolerance = 1e-11;

// Largest order allowed for maps known only through degree r.
int order_cap(const ReducedMap& rm, Family family);

}  // namespace paramfold
