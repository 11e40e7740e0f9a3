#include "paramfold/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"
#include "paramfold/error.hpp"

namespace paramfold {

using detail::fmt;

InnerDynamics::InnerDynamics(Jet1 R, int N) : R_(std::move(R)), dR_(R_.derivative()), N_(N) {
  if (N < 2) fail(ErrorKind::Argument, "R needs N >= 2");
  if (R_[1] != 1.0 || R_[0] != 0.0) fail(ErrorKind::Argument, "R must be tangent to the identity");
  if (R_N() == 0.0) fail(ErrorKind::Argument, "R_N must be nonzero");
}

double InnerDynamics::backward(double t) const {
  double s = t;
  for (int iter = 0; iter < 100; ++iter) {
    const double g = R_.eval(s) - t;
    const double dg = dR_.eval(s);
    if (dg <= 0.0) break;
    const double ds = g / dg;
    s -= ds;
    if (std::abs(ds) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(s)) return s;
  }
  const double g = R_.eval(s) - t;
  if (std::isfinite(s) && std::abs(g) <= 1e-15 * std::abs(t)) return s;
  fail(ErrorKind::Numeric, "Newton inverse of R failed at t = " + fmt(t));
}

double InnerDynamics::step_derivative(double t) const {
  if (contracting()) return dR_.eval(t);
  return 1.0 / dR_.eval(backward(t));
}

double iterate_R(const Jet1& R, int N, Branch branch, double t, int j, double rho) {
  const InnerDynamics dyn(R, N);
  if ((branch == Branch::Stable) != dyn.contracting()) {
    fail(ErrorKind::Argument, std::string("R_N sign does not match the ") + to_string(branch) +
                                  " branch");
  }
  if (!(t > 0.0 && t < rho)) fail(ErrorKind::Argument, "t must lie in (0, rho)");
  double s = t;
  for (int i = 0; i < j; ++i) {
    s = dyn.step(s);
    if (!(s > 0.0 && s < rho)) {
      fail(ErrorKind::Numeric, "iterate " + std::to_string(i + 1) + " of R left (0, rho) at " +
                                   fmt(s) + "; reduce rho");
    }
  }
  return s;
}

OrbitBoundParams OrbitBoundParams::defaults(int N, double R_N, double rho) {
  OrbitBoundParams p;
  p.N = N;
  p.R_N = R_N;
  const double base = (N - 1) * std::abs(R_N);
  p.nu = 0.9 * base;
  p.mu = 1.1 * base;
  p.kappa = p.nu / p.mu;
  p.rho = rho;
  return p;
}

void OrbitBoundParams::validate() const {
  const double base = (N - 1) * std::abs(R_N);
  if (!(nu > 0.0 && nu < base && base < mu)) {
    fail(ErrorKind::Argument, "need 0 < nu < (N-1)|R_N| < mu (nu = " + fmt(nu) +
                                  ", (N-1)|R_N| = " + fmt(base) + ", mu = " + fmt(mu) + ")");
  }
  if (!(kappa > 1.0 / N && kappa <= 1.0)) {
    fail(ErrorKind::Argument, "kappa = " + fmt(kappa) + " must lie in (1/N, 1]");
  }
  if (!(rho > 0.0)) fail(ErrorKind::Argument, "rho must be positive");
}

double sandwich(double t, int j, double lambda, int N) {
  const double e = 1.0 / (N - 1);
  return t / std::pow(1.0 + j * lambda * std::pow(t, N - 1), e);
}

BoundReport check_orbit_bounds(const InnerDynamics& dyn, const OrbitBoundParams& params,
                               std::span<const double> t_samples, int j_max) {
  params.validate();
  const int N = params.N;
  BoundReport rep;
  rep.samples = static_cast<int>(t_samples.size());
  rep.j_max = j_max;
  rep.largest_passing_rho = params.rho;
  const double dexp = -params.kappa * N / (N - 1.0);
  auto record = [&](const BoundViolation& v) {
    if (rep.violations.size() < 100) rep.violations.push_back(v);
    rep.largest_passing_rho = std::min(rep.largest_passing_rho, v.t);
  };
  for (double t : t_samples) {
    double s = t;
    double d = 1.0;
    for (int j = 1; j <= j_max; ++j) {
      d *= dyn.step_derivative(s);
      s = dyn.step(s);
      const double lo = sandwich(t, j, params.mu, N);
      const double hi = sandwich(t, j, params.nu, N);
      if (!(s > lo && s < hi && s < params.rho)) {
        record({t, j, false, s, s <= lo ? lo : hi});
        break;
      }
      const double dbound = std::pow(1.0 + j * params.mu * std::pow(t, N - 1), dexp);
      if (!(d <= dbound)) {
        record({t, j, true, d, dbound});
        break;
      }
    }
  }
  return rep;
}

std::vector<double> log_samples(double rho, int n, double decades) {
  std::vector<double> out;
  for (int i = n; i >= 1; --i) out.push_back(rho * std::pow(10.0, -decades * i / n));
  return out;
}

double select_rho(const InnerDynamics& dyn, int j_max, double start, int max_halvings) {
  double rho = start;
  const int N = dyn.N();
  for (int h = 0; h <= max_halvings; ++h, rho *= 0.5) {
    if (std::abs(dyn.R_N()) * std::pow(rho, N - 1) >= 0.1) continue;
    const auto params = OrbitBoundParams::defaults(N, dyn.R_N(), rho);
    const auto samples = log_samples(rho, 50);
    if (check_orbit_bounds(dyn, params, samples, j_max).ok()) return rho;
  }
  fail(ErrorKind::Numeric, "no rho down to " + fmt(rho) + " passes the iterate bounds");
}

double orbit_tail_bound(double C, double s, int p, int N, double nu) {
  if (p <= N - 1) return std::numeric_limits<double>::infinity();
  const double sn = std::pow(s, N - 1);
  return C * std::pow(s, p) * (1.0 + (N - 1) / (nu * sn * (p - N + 1)));
}

OrbitSumResult orbit_sum(const std::function<std::pair<double, double>(double)>& eta,
                         const InnerDynamics& dyn, double t, const OrbitSumOptions& opts) {
  if (!dyn.contracting()) {
    fail(ErrorKind::Argument, "orbit sums need a contracting R (R_N < 0)");
  }
  const int N = dyn.N();
  const double nu = opts.nu > 0.0 ? opts.nu : 0.9 * (N - 1) * std::abs(dyn.R_N());
  detail::CompensatedSum sx, sy;
  double cx = 0.0, cy = 0.0;
  double s = t;
  OrbitSumResult out;
  for (long j = 0;; ++j) {
    if (j >= opts.j_cap) {
      fail(ErrorKind::Numeric, "orbit sum reached " + std::to_string(opts.j_cap) +
                                   " terms with tail bound " + fmt(out.tail));
    }
    if (s == 0.0) break;
    const auto [ex, ey] = eta(s);
    sx.add(ex);
    sy.add(ey);
    cx = std::max(cx, std::abs(ex) / std::pow(s, opts.order_x));
    cy = std::max(cy, std::abs(ey) / std::pow(s, opts.order_y));
    s = dyn.step(s);
    out.terms = j + 1;
    out.tail = std::max(orbit_tail_bound(cx, s, opts.order_x, N, nu),
                        orbit_tail_bound(cy, s, opts.order_y, N, nu));
    if (out.tail <= opts.tol) break;
  }
  out.x = -sx.value();
  out.y = -sy.value();
  return out;
}

Point invert_F(const InverseMap& inv, Point z) {
  const double c = inv.forward.c();
  Point w{z.x - c * z.y, z.y};
  const double scale = std::max(1.0, std::hypot(z.x, z.y));
  for (int iter = 0; iter <= inv.max_steps; ++iter) {
    const Point fw = inv.forward(w);
    const double rx = fw.x - z.x, ry = fw.y - z.y;
    if (!std::isfinite(rx) || !std::isfinite(ry)) break;
    if (std::hypot(rx, ry) <= inv.tol * scale) return w;
    if (iter == inv.max_steps) break;
    const auto J = inv.forward.jacobian(w);
    const double det = J[0] * J[3] - J[1] * J[2];
    if (det == 0.0 || !std::isfinite(det)) break;
    w.x -= (J[3] * rx - J[1] * ry) / det;
    w.y -= (-J[2] * rx + J[0] * ry) / det;
  }
  fail(ErrorKind::Numeric, "Newton inversion of F failed at (" + fmt(z.x) + ", " + fmt(z.y) + ")");
}

GlobalPoint globalize(const std::function<Point(double)>& local,
                      const std::function<double(double)>& step,
                      const std::function<Point(Point)>& away_from_origin, double rho_local,
                      double t, int extra_depth, const GlobalizeOptions& opts) {
  double s = t;
  int depth = 0;
  while (s > rho_local) {
    s = step(s);
    if (++depth > opts.j_cap) {
      fail(ErrorKind::Numeric, "globalization at t = " + fmt(t) + " needs more than " +
                                   std::to_string(opts.j_cap) + " iterates");
    }
  }
  for (int i = 0; i < extra_depth; ++i) s = step(s);
  depth += extra_depth;
  Point p = local(s);
  for (int i = 0; i < depth; ++i) p = away_from_origin(p);
  return {p, depth};
}

Jet2Pair inverse_jet(double c, const Jet2& f1, const Jet2& f2, int degree) {
  const Jet2 x = Jet2::x(degree), y = Jet2::y(degree);
  const Jet2 g1 = f1.with_degree(degree), g2 = f2.with_degree(degree);
  // X = x - c Y - f1(X, Y), Y = y - f2(X, Y); each pass gains one order.
  Jet2 X = x - c * y, Y = y;
  for (int it = 0; it <= degree; ++it) {
    const Jet2 nY = y - compose(g2, X, Y);
    const Jet2 nX = x - c * nY - compose(g1, X, Y);
    if (nX == X && nY == Y) break;
    X = nX;
    Y = nY;
  }
  return {X, Y};
}

namespace {

Jet2 abs_jet(const Jet2& h) {
  Jet2 out(h.degree());
  for (int d = 0; d <= h.degree(); ++d) {
    for (int j = 0; j <= d; ++j) out.at(d - j, j) = std::abs(h(d - j, j));
  }
  return out;
}

// Zeroes coefficients of h not exceeding the rounding level of a computation
// whose terms have magnitudes bounded by `mag`.
void drop_rounding(Jet2& h, const Jet2& mag) {
  const double level = 64.0 * std::numeric_limits<double>::epsilon() * (h.degree() + 1);
  for (int d = 0; d <= h.degree(); ++d) {
    for (int j = 0; j <= d; ++j) {
      if (std::abs(h(d - j, j)) <= level * mag(d - j, j)) h.at(d - j, j) = 0.0;
    }
  }
}

// h(x, -y), times `sign`.
Jet2 flip_y(const Jet2& h, double sign) {
  Jet2 out(h.degree());
  for (int d = 0; d <= h.degree(); ++d) {
    for (int j = 0; j <= d; ++j) out.at(d - j, j) = sign * ((j % 2 == 0) ? 1.0 : -1.0) * h(d - j, j);
  }
  return out;
}

}  // namespace

ReducedMap unstable_setup(const ReducedMap& rm, int min_degree) {
  const int D = std::max(rm.r, min_degree);
  const double c = rm.c;
  const Jet2 f = rm.nonlinearity().with_degree(D);
  const Jet2Pair inv = inverse_jet(c, Jet2(D), f, D);
  const Jet2 x = Jet2::x(D), y = Jet2::y(D);
  // F^-1 = (x - c y + g1, y + g2); conjugating by (x, y) -> (x, -y) gives
  // (x + c y + g1(x, -y), y - g2(x, -y)).
  Jet2 g1 = inv.x - (x - c * y);
  Jet2 g2 = inv.y - y;
  // Coefficient magnitudes of the fixed-point terms bound the cancellation
  // error; without this, noise at high degree can pose as a leading term.
  const Jet2 mag = compose(abs_jet(f), abs_jet(inv.x), abs_jet(inv.y));
  drop_rounding(g1, c * mag);
  drop_rounding(g2, mag);
  Conjugation conj = rm.conj;
  conj.push({ConjugationStep::Kind::SignFlip, Jet2(), 1.0});
  ReducedMap out = reduce_jets(rm.name, c, flip_y(g1, 1.0), flip_y(g2, -1.0), D, false,
                               std::move(conj));
  out.time_reversed = !rm.time_reversed;
  return out;
}

}  // namespace paramfold
