#pragma once

// Iteration of the inner dynamics R and of the planar map, runtime checks of
// the R^j sandwich and DR^j bounds, orbit sums realizing the right inverse of
// phi -> phi o R - phi, Newton inversion of F, and globalization of local
// parameterizations.

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "paramfold/jets.hpp"
#include "paramfold/model.hpp"

namespace paramfold {

// R on its own, oriented so that step() moves toward 0. For a stable curve
// step() is R; for a directly computed unstable curve (R_N > 0) step() is
// R^-1, evaluated by Newton on the polynomial.
class InnerDynamics {
 public:
  InnerDynamics(Jet1 R, int N);

  const Jet1& R() const { return R_; }
  int N() const { return N_; }
  double R_N() const { return R_[N_]; }
  bool contracting() const { return R_N() < 0.0; }

  double forward(double t) const { return R_.eval(t); }
  double backward(double t) const;  // Newton inverse of R
  double step(double t) const { return contracting() ? forward(t) : backward(t); }
  // Derivative of step() at t.
  double step_derivative(double t) const;

 private:
  Jet1 R_;
  Jet1 dR_;
  int N_;
};

// R^j(t) for the stable branch, (R^-1)^j(t) for the unstable one. Throws
// Numeric when an iterate leaves (0, rho).
double iterate_R(const Jet1& R, int N, Branch branch, double t, int j, double rho);

struct OrbitBoundParams {
  int N = 2;
  double R_N = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double rho = 0.1;

  // nu = 0.9 (N-1)|R_N|, mu = 1.1 (N-1)|R_N|, kappa = nu / mu.
  static OrbitBoundParams defaults(int N, double R_N, double rho);
  // Throws Argument unless 0 < nu < (N-1)|R_N| < mu and 1/N < kappa <= 1.
  void validate() const;
};

// phi_lambda(t) after j steps: t / (1 + j lambda t^(N-1))^(1/(N-1)).
double sandwich(double t, int j, double lambda, int N);

struct BoundViolation {
  double t;
  int j;
  bool derivative;  // false: sandwich, true: DR^j bound
  double value;
  double bound;
};

struct BoundReport {
  std::vector<BoundViolation> violations;
  int samples = 0;
  int j_max = 0;
  // rho if nothing failed, else the smallest sample at which a check failed.
  double largest_passing_rho = 0.0;
  bool ok() const { return violations.empty(); }
};

// Violations are capped at 100 entries; the count keeps going.
BoundReport check_orbit_bounds(const InnerDynamics& dyn, const OrbitBoundParams& params,
                               std::span<const double> t_samples, int j_max);

// rho * 10^(-decades * i / n) for i = n..1: n log-spaced points of the open
// interval (0, rho), increasing.
std::vector<double> log_samples(double rho, int n, double decades = 4.0);

// Starting from 0.1, halves rho until the bound checks pass on 50 samples
// with j <= j_max and |R_N| rho^(N-1) < 0.1.
double select_rho(const InnerDynamics& dyn, int j_max = 10000, double start = 0.1,
                  int max_halvings = 30);

// Tail of sum_{j >= 0} |eta(R^j(s))| bounded through the sandwich majorant,
// for |eta(s)| <= C s^p with p > N - 1.
double orbit_tail_bound(double C, double s, int p, int N, double nu);

struct OrbitSumOptions {
  double tol = 1e-14;    // absolute bound on the truncated tail
  long j_cap = 50000000;
  int order_x = 2;       // vanishing orders of the two slots of eta
  int order_y = 2;
  double nu = 0.0;       // 0: 0.9 (N-1)|R_N|
};

struct OrbitSumResult {
  double x = 0.0;
  double y = 0.0;
  double tail = 0.0;
  long terms = 0;
};

// -sum_{j >= 0} eta(R^j(t)) with Neumaier summation. The tail constant is
// estimated from the visited points. Throws Numeric at j_cap.
OrbitSumResult orbit_sum(const std::function<std::pair<double, double>(double)>& eta,
                         const InnerDynamics& dyn, double t, const OrbitSumOptions& opts);

struct InverseMap {
  PolynomialMap forward;
  double tol = 1e-14;  // on ||F(w) - z||, scaled by max(1, ||z||)
  int max_steps = 60;
};

// Newton from the linear-inverse seed (x - c y, y). Throws Numeric on
// divergence.
Point invert_F(const InverseMap& inv, Point z);

struct GlobalizeOptions {
  int j_cap = 100000;
};

struct GlobalPoint {
  Point p;
  int depth = 0;  // number of map applications used
};

// Extends a local parameterization (valid on (0, rho_local]) to t > rho_local
// using the invariance equation: for a stable curve
// K(t) = F^-j(K(R^j(t))), for an unstable one K(t) = F^j(K(R^-j(t))).
// `step` moves the parameter toward 0 and `away_from_origin` is F^-1
// (stable) or F (unstable). `extra_depth` adds iterations beyond the
// minimal admissible depth.
GlobalPoint globalize(const std::function<Point(double)>& local,
                      const std::function<double(double)>& step,
                      const std::function<Point(Point)>& away_from_origin, double rho_local,
                      double t, int extra_depth = 0, const GlobalizeOptions& opts = {});

// Reduced form of F^-1 through degree max(rm.r, min_degree), conjugated by
// (x, y) -> (x, -y) so that its c is positive. The stable curve of the
// result is the unstable curve of rm, mapped back through result.conj.
ReducedMap unstable_setup(const ReducedMap& rm, int min_degree = 16);

// Jet of the inverse of (x + c y + f1, y + f2) at the given degree.
Jet2Pair inverse_jet(double c, const Jet2& f1, const Jet2& f2, int degree);

}  // namespace paramfold
