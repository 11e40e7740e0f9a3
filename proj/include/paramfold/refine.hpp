#pragma once

// Numeric solution of the correction equation for K = K_n + Delta,
//
//   Delta o R - Delta = N(Delta),
//   N^x = c Delta^y + E^x,   N^y = f(K_n + Delta) - f(K_n) + E^y,
//
// by Picard iteration of T = S^-1 o N, with S^-1 eta = -sum_j eta o R^j.
// Delta is stored as Delta^x = t^n delta^x, Delta^y = t^(n+N-1) delta^y with
// delta sampled at Chebyshev nodes of [0, rho].

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "paramfold/approx.hpp"
#include "paramfold/dynamics.hpp"
#include "paramfold/jets.hpp"
#include "paramfold/model.hpp"

namespace paramfold {

struct RefineConfig {
  double rho = 0.05;
  int m = 32;                 // Chebyshev nodes
  double tol = 1e-13;         // on the sup node change of delta
  int max_sweeps = 50;
  double orbit_tol = 1e-15;   // truncated orbit tails, per unit of delta
  double gamma = 1.0;         // conditioning rescale (1: none)
  // Ball radius for delta. Unset: min(1/2, d/2) for maps with a finite
  // validity radius d, no limit for polynomial maps.
  std::optional<double> alpha;
  double nu = 0.0;            // 0: 0.9 (N-1)|R_N|
  double delta_apriori = 4.0; // delta bound sizing the nonlinear orbit prefixes
  int residual_oversample = 10;
};

struct SweepRecord {
  int sweep = 0;
  double sup_change = 0.0;
  double residual_sup = 0.0;
};

struct RefineState {
  int n = 0;
  int N = 0;
  double rho = 0.0;
  double alpha = std::numeric_limits<double>::infinity();
  std::vector<double> nodes;
  std::vector<double> delta_x;
  std::vector<double> delta_y;
  int sweep = 0;
  double sup_change = 0.0;
  double residual_sup = 0.0;
  double delta_norm = 0.0;  // max node magnitude of (delta^x, delta^y)
  bool noise_floor = false; // stopped at rounding level rather than tol
  std::vector<SweepRecord> history;
  // One-step Lipschitz estimate of T at the fixed point, and the bound
  // ||S^-1|| Lip N assembled from the operator-norm and Lipschitz bounds.
  double measured_contraction = 0.0;
  double contraction_bound = 0.0;
  long orbit_points = 0;

  // Barycentric interpolant of delta at t in [0, rho].
  std::pair<double, double> delta_at(double t) const;
};

// N(Delta) with E_n precomputed as exact polynomials.
class NOperator {
 public:
  NOperator(const ReducedMap& rm, const Parameterization& par);

  // N at t for the correction values (Delta^x(t), Delta^y(t)).
  std::pair<double, double> operator()(double t, double dx, double dy) const;
  // f(X + dX, Y + dY) - f(X, Y) without cancellation.
  double f_difference(double X, double Y, double dX, double dY) const;

  const Jet1& Ex() const { return ex_; }
  const Jet1& Ey() const { return ey_; }
  const Parameterization& par() const { return par_; }
  double c() const { return c_; }

 private:
  struct Monomial {
    int i, j;
    double a;
  };
  Parameterization par_;
  double c_;
  Jet1 ex_, ey_;
  std::vector<Monomial> mono_;
  int max_i_ = 0, max_j_ = 0;
};

// N at t for a correction given as an evaluator of (Delta^x, Delta^y).
std::pair<double, double> apply_N(const ReducedMap& rm, const Parameterization& par,
                                  const std::function<Point(double)>& delta, double t);

// Picard iteration from Delta = 0. Stable curves only (R_N < 0); unstable
// curves are refined as stable curves of unstable_setup(rm).
RefineState picard_solve(const ReducedMap& rm, const Parameterization& par, const RefineConfig& cfg,
                         const std::function<void(const SweepRecord&)>& on_sweep = {});

struct AposterioriOptions {
  // Extend the input by formal steps up to this order before refining
  // (0: only as far as needed to fix R_{2N-1}).
  int extend_to = 0;
};

struct AposterioriResult {
  int measured_order = 0;  // order n-hat read off the residual of the input
  Parameterization par;    // input, possibly extended; R may gain R_{2N-1}
  RefineState state;
};

AposterioriResult aposteriori_refine(const ReducedMap& rm, const Jet1& Kx, const Jet1& Ky,
                                     const Jet1& R, const RefineConfig& cfg,
                                     const AposterioriOptions& opts = {},
                                     const std::function<void(const SweepRecord&)>& on_sweep = {});

// Order n-hat such that F o K - K o R = (O(t^(n+N)), O(t^(n+2N-1))), or
// a value below the minimal order when the leading terms already fail.
int measured_order(const ReducedMap& rm, const Parameterization& par);

// Conditioning factor for the rescaling (x, y) -> (x, gamma y). Throws
// Hypothesis on a nonpositive radicand.
double rescale_gamma(const ReducedMap& rm, Branch branch = Branch::Stable);

// T_gamma^-1 o F o T_gamma with T_gamma(x, y) = (x, gamma y): c -> gamma c,
// a_i -> a_i / gamma, b_j unchanged. The scale step is added to conj.
ReducedMap rescale(const ReducedMap& rm, double gamma);

// A refined local curve together with what is needed to evaluate it beyond
// rho and in the input coordinates.
class RefinedCurve {
 public:
  // `working` is the map the stable curve was solved for: rm itself for a
  // stable curve, unstable_setup(rm) (possibly rescaled) for an unstable one.
  RefinedCurve(ReducedMap working, Parameterization par, RefineState state,
               PolynomialMap original, Branch branch);

  Branch branch() const { return branch_; }
  double rho() const { return state_.rho; }
  const Parameterization& par() const { return par_; }
  const RefineState& state() const { return state_; }
  const ReducedMap& working() const { return working_; }
  const PolynomialMap& original() const { return original_; }

  // Delta and K_n + Delta in working coordinates, t in (0, rho].
  Point delta(double t) const;
  Point local_working(double t) const;
  // Input coordinates, t in (0, rho].
  Point local(double t) const;

  // Dynamics of the curve: F(K(t)) = K(R(t)). For an unstable curve this is
  // the inverse of the stored polynomial.
  double R(double t) const;
  // Moves t toward 0 (R for stable curves, R^-1 for unstable ones).
  double toward_origin(double t) const;

  // Input coordinates for any t > 0, globalized beyond rho.
  GlobalPoint eval(double t, int extra_depth = 0) const;
  // F(K(t)) - K(R(t)) in input coordinates.
  Point residual(double t) const;

 private:
  ReducedMap working_;
  Parameterization par_;
  RefineState state_;
  PolynomialMap original_;
  Branch branch_;
  InverseMap inverse_;
};

}  // namespace paramfold
