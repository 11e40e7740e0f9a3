#include "paramfold/refine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "numeric.hpp"
#include "paramfold/error.hpp"

namespace paramfold {

using detail::fmt;

namespace {

constexpr int kMaxPower = 96;

struct Chebyshev {
  std::vector<double> nodes;
  std::vector<double> weights;

  Chebyshev(int m, double rho) {
    for (int k = 0; k < m; ++k) {
      const double theta = (2.0 * k + 1.0) * std::numbers::pi / (2.0 * m);
      nodes.push_back(0.5 * rho * (1.0 - std::cos(theta)));
      weights.push_back(((k % 2 == 0) ? 1.0 : -1.0) * std::sin(theta));
    }
  }
};

std::pair<double, double> barycentric(std::span<const double> nodes, std::span<const double> w,
                                      std::span<const double> vx, std::span<const double> vy,
                                      double s) {
  double num_x = 0.0, num_y = 0.0, den = 0.0;
  const std::size_t m = nodes.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double d = s - nodes[k];
    if (d == 0.0) return {vx[k], vy[k]};
    const double q = w[k] / d;
    num_x += q * vx[k];
    num_y += q * vy[k];
    den += q;
  }
  return {num_x / den, num_y / den};
}

}  // namespace

std::pair<double, double> RefineState::delta_at(double t) const {
  if (nodes.empty()) return {0.0, 0.0};
  const Chebyshev cheb(static_cast<int>(nodes.size()), rho);
  return barycentric(nodes, cheb.weights, delta_x, delta_y, t);
}

// ---------------------------------------------------------------- NOperator

NOperator::NOperator(const ReducedMap& rm, const Parameterization& par)
    : par_(par), c_(rm.c) {
  std::tie(ex_, ey_) = residual_polynomials(rm, par);
  const Jet2 f = rm.nonlinearity();
  for (int d = 0; d <= f.degree(); ++d) {
    for (int j = 0; j <= d; ++j) {
      const double a = f(d - j, j);
      if (a == 0.0) continue;
      mono_.push_back({d - j, j, a});
      max_i_ = std::max(max_i_, d - j);
      max_j_ = std::max(max_j_, j);
    }
  }
  if (max_i_ >= kMaxPower || max_j_ >= kMaxPower) {
    fail(ErrorKind::Argument, "map degree too large for the refinement kernel");
  }
}

double NOperator::f_difference(double X, double Y, double dX, double dY) const {
  // A_i = (X+dX)^i - X^i = (X+dX) A_{i-1} + dX X^(i-1), likewise B_j.
  std::array<double, kMaxPower> px, qx, ax, py, qy, by;
  px[0] = qx[0] = 1.0;
  ax[0] = 0.0;
  const double Xn = X + dX;
  for (int i = 1; i <= max_i_; ++i) {
    ax[i] = Xn * ax[i - 1] + dX * px[i - 1];
    px[i] = px[i - 1] * X;
    qx[i] = qx[i - 1] * Xn;
  }
  py[0] = qy[0] = 1.0;
  by[0] = 0.0;
  const double Yn = Y + dY;
  for (int j = 1; j <= max_j_; ++j) {
    by[j] = Yn * by[j - 1] + dY * py[j - 1];
    py[j] = py[j - 1] * Y;
    qy[j] = qy[j - 1] * Yn;
  }
  double sum = 0.0;
  for (const auto& mo : mono_) sum += mo.a * (ax[mo.i] * qy[mo.j] + px[mo.i] * by[mo.j]);
  return sum;
}

std::pair<double, double> NOperator::operator()(double t, double dx, double dy) const {
  const double X = par_.Kx.eval(t), Y = par_.Ky.eval(t);
  return {c_ * dy + ex_.eval(t), f_difference(X, Y, dx, dy) + ey_.eval(t)};
}

std::pair<double, double> apply_N(const ReducedMap& rm, const Parameterization& par,
                                  const std::function<Point(double)>& delta, double t) {
  const NOperator op(rm, par);
  const Point d = delta(t);
  return op(t, d.x, d.y);
}

// ---------------------------------------------------------------- Picard

namespace {

// Per-node data of one orbit {R^j(t_i)}. The parts of N that are linear in
// the node values of delta are summed once into matrix rows; only the
// quadratic remainder of f(K + Delta) - f(K) is re-evaluated each sweep, on
// the (short) prefix of the orbit where it is not negligible.
struct Orbit {
  double ex = 0.0, ey = 0.0;  // sum of E_n along the orbit
  std::vector<double> mx;     // c s^(n+N-1) l_k(s), summed
  std::vector<double> myx;    // f_x(K) s^n l_k(s)
  std::vector<double> myy;    // f_y(K) s^(n+N-1) l_k(s)
  // Prefix for the remainder: point, K_n, weights, gradient of f at K_n.
  std::vector<double> s, kx, ky, wx, wy, fx, fy;
  long length = 0;
};

double coeff_bound(const Jet1& e, int p, double rho) {
  // |e(s)| <= C s^p on [0, rho] when e has no terms below p.
  double C = 0.0;
  for (int i = p; i <= e.degree(); ++i) C += std::abs(e[i]) * std::pow(rho, i - p);
  return C;
}

class Solver {
 public:
  Solver(const ReducedMap& rm, const Parameterization& par, const RefineConfig& cfg)
      : rm_(rm), par_(par), cfg_(cfg), op_(rm, par), dyn_(par.R, par.N),
        cheb_(cfg.m, cfg.rho), map_(rm.as_map()) {
    n_ = par.n;
    N_ = par.N;
    wx_ = n_;
    wy_ = n_ + N_ - 1;
    nu_ = cfg.nu > 0.0 ? cfg.nu : 0.9 * (N_ - 1) * std::abs(par.R_N());
    const Jet2 f = rm.nonlinearity();
    fx_ = f.dx();
    fy_ = f.dy();
  }

  RefineState run(const std::function<void(const SweepRecord&)>& on_sweep) {
    RefineState st;
    st.n = n_;
    st.N = N_;
    st.rho = cfg_.rho;
    st.alpha = alpha();
    st.nodes = cheb_.nodes;
    st.delta_x.assign(cheb_.nodes.size(), 0.0);
    st.delta_y.assign(cheb_.nodes.size(), 0.0);

    double apriori = cfg_.delta_apriori;
    build_orbits(apriori);
    int stalled = 0;
    double prev = std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
      if (st.sweep >= cfg_.max_sweeps) {
        fail(ErrorKind::Numeric, "Picard iteration did not converge in " +
                                     std::to_string(cfg_.max_sweeps) + " sweeps (last change " +
                                     fmt(st.sup_change) + ")");
      }
      std::vector<double> nx, ny;
      apply_T(st.delta_x, st.delta_y, nx, ny);
      double change = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < nx.size(); ++i) {
        change = std::max({change, std::abs(nx[i] - st.delta_x[i]), std::abs(ny[i] - st.delta_y[i])});
        norm = std::max({norm, std::abs(nx[i]), std::abs(ny[i])});
      }
      st.delta_x = std::move(nx);
      st.delta_y = std::move(ny);
      st.delta_norm = norm;
      st.sup_change = change;
      ++st.sweep;
      st.residual_sup = residual_sup(st);
      const SweepRecord rec{st.sweep, change, st.residual_sup};
      st.history.push_back(rec);
      if (on_sweep) on_sweep(rec);

      if (!std::isfinite(change) || norm > st.alpha) {
        fail(ErrorKind::Numeric, "outside contraction ball (|delta| = " + fmt(norm) +
                                     ") - reduce rho or raise n");
      }
      const double floor = 1e-14 * std::max(1.0, norm);
      stalled = change >= prev ? stalled + 1 : 0;
      prev = change;
      if (change < cfg_.tol) {
        done = true;
      } else if (stalled >= 3) {
        if (change <= std::max(cfg_.tol, 100.0 * floor)) {
          st.noise_floor = true;
          done = true;
        } else {
          fail(ErrorKind::Numeric, "no contraction - reduce rho (sup change " + fmt(change) +
                                       " did not decrease for 3 sweeps)");
        }
      }
      if (done && norm > apriori) {
        // Prefixes were sized for a smaller delta; extend and keep iterating.
        apriori = 2.0 * norm;
        build_prefixes(apriori);
        done = false;
        stalled = 0;
        prev = std::numeric_limits<double>::infinity();
      }
    }
    for (const auto& o : orbits_) st.orbit_points += o.length;
    measure_contraction(st);
    return st;
  }

 private:
  double alpha() const {
    if (cfg_.alpha) return *cfg_.alpha;
    // Polynomial maps are entire (d = infinity); the ball then only guards
    // against divergence.
    return std::numeric_limits<double>::infinity();
  }

  // Largest |f_x(K + theta Delta)| / t^(2N-2) and |f_y(...)| / t^(N-1).
  std::pair<double, double> lipschitz_factors(const RefineState* st) const {
    double lx = 0.0, ly = 0.0;
    const int samples = cfg_.residual_oversample * cfg_.m;
    for (int k = 1; k <= samples; ++k) {
      const double t = cfg_.rho * k / samples;
      double X = par_.Kx.eval(t), Y = par_.Ky.eval(t);
      double dX = 0.0, dY = 0.0;
      if (st) {
        const auto [a, b] = st->delta_at(t);
        dX = std::pow(t, wx_) * a;
        dY = std::pow(t, wy_) * b;
      }
      for (double th : {0.0, 0.5, 1.0}) {
        const double x = X + th * dX, y = Y + th * dY;
        lx = std::max(lx, std::abs(fx_.eval(x, y)) / std::pow(t, 2 * N_ - 2));
        ly = std::max(ly, std::abs(fy_.eval(x, y)) / std::pow(t, N_ - 1));
      }
    }
    return {lx, ly};
  }

  double tail_factor(double s, int p) const {
    return 1.0 + (N_ - 1) / (nu_ * std::pow(s, N_ - 1) * (p - N_ + 1));
  }

  // Orbit sums of the parts of N that do not depend on delta or depend on it
  // linearly. Tails are cut when the E part and the linear part per unit of
  // |delta| are below orbit_tol, so the truncation error is relative to the
  // size of delta and no a-priori bound is needed here.
  void build_orbits(double apriori) {
    const double rho = cfg_.rho;
    for (int k = 1; k <= 64; ++k) {
      const double t = rho * k / 64.0;
      const double r = dyn_.forward(t);
      if (!(r > 0.0 && r < t)) {
        fail(ErrorKind::Numeric, "R does not map (0, rho) into itself at t = " + fmt(t) +
                                     "; reduce rho");
      }
    }
    const int px = n_ + par_.x_offset, py = n_ + par_.y_offset;
    const double cx = coeff_bound(op_.Ex(), px, rho);
    const double cy = coeff_bound(op_.Ey(), py, rho);
    const auto [lx, ly] = lipschitz_factors(nullptr);
    const double lip = 2.0 * (lx + ly);
    const double c = rm_.c;
    const int pdy = n_ + 2 * N_ - 2;
    const std::size_t m = cheb_.nodes.size();
    orbits_.assign(m, Orbit{});
    detail::parallel_for(m, [&](std::size_t i) {
      const double t = cheb_.nodes[i];
      const double sx = std::pow(t, wx_), sy = std::pow(t, wy_);
      Orbit& o = orbits_[i];
      detail::CompensatedSum ex, ey;
      std::vector<detail::CompensatedSum> mx(m), myx(m), myy(m);
      std::vector<double> ell(m);
      double s = t;
      for (long j = 0;; ++j) {
        if (j > 50000000) {
          fail(ErrorKind::Numeric, "orbit of node " + fmt(t) + " too long; raise n or rho");
        }
        const double kx = par_.Kx.eval(s), ky = par_.Ky.eval(s);
        const double wx = std::pow(s, wx_), wy = std::pow(s, wy_);
        const double gx = fx_.eval(kx, ky), gy = fy_.eval(kx, ky);
        lagrange(s, ell);
        for (std::size_t k = 0; k < m; ++k) {
          if (ell[k] == 0.0) continue;
          mx[k].add(c * wy * ell[k]);
          myx[k].add(gx * wx * ell[k]);
          myy[k].add(gy * wy * ell[k]);
        }
        ex.add(op_.Ex().eval(s));
        ey.add(op_.Ey().eval(s));
        o.length = j + 1;
        s = dyn_.forward(s);
        if (s <= 0.0) break;
        if (j % 8 != 0) continue;
        const double tx = (cx * std::pow(s, px) * tail_factor(s, px) +
                           c * std::pow(s, wy_) * tail_factor(s, wy_)) / sx;
        const double ty = (cy * std::pow(s, py) * tail_factor(s, py) +
                           lip * std::pow(s, pdy) * tail_factor(s, pdy)) / sy;
        if (tx <= cfg_.orbit_tol && ty <= cfg_.orbit_tol) break;
      }
      o.ex = ex.value();
      o.ey = ey.value();
      o.mx.resize(m);
      o.myx.resize(m);
      o.myy.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        o.mx[k] = mx[k].value();
        o.myx[k] = myx[k].value();
        o.myy[k] = myy[k].value();
      }
    });
    build_prefixes(apriori);
  }

  // Orbit prefixes on which the quadratic remainder of f(K + Delta) - f(K)
  // exceeds orbit_tol for |delta| <= apriori.
  void build_prefixes(double apriori) {
    const double hess = 2.0 * curvature_factor(apriori);
    const int pq = 2 * n_;
    detail::parallel_for(orbits_.size(), [&](std::size_t i) {
      const double t = cheb_.nodes[i];
      const double sy = std::pow(t, wy_);
      Orbit& o = orbits_[i];
      for (auto* v : {&o.s, &o.kx, &o.ky, &o.wx, &o.wy, &o.fx, &o.fy}) v->clear();
      double s = t;
      for (long j = 0; j < o.length; ++j) {
        const double kx = par_.Kx.eval(s), ky = par_.Ky.eval(s);
        o.s.push_back(s);
        o.kx.push_back(kx);
        o.ky.push_back(ky);
        o.wx.push_back(std::pow(s, wx_));
        o.wy.push_back(std::pow(s, wy_));
        o.fx.push_back(fx_.eval(kx, ky));
        o.fy.push_back(fy_.eval(kx, ky));
        s = dyn_.forward(s);
        if (s <= 0.0 || hess * std::pow(s, pq) * tail_factor(s, pq) / sy <= cfg_.orbit_tol) break;
      }
    });
  }

  // Lagrange basis values l_k(s) of the Chebyshev interpolant.
  void lagrange(double s, std::vector<double>& ell) const {
    const std::size_t m = cheb_.nodes.size();
    double den = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double d = s - cheb_.nodes[k];
      if (d == 0.0) {
        std::fill(ell.begin(), ell.end(), 0.0);
        ell[k] = 1.0;
        return;
      }
      ell[k] = cheb_.weights[k] / d;
      den += ell[k];
    }
    for (auto& v : ell) v /= den;
  }

  // Bound on |f(K+D) - f(K) - grad f(K) D| / |D|^2 for |D| up to the
  // a-priori size of Delta, from the second derivatives on the samples.
  double curvature_factor(double apriori) const {
    const Jet2 fxx = fx_.dx(), fxy = fx_.dy(), fyy = fy_.dy();
    double h = 0.0;
    const int samples = cfg_.residual_oversample * cfg_.m;
    for (int k = 1; k <= samples; ++k) {
      const double t = cfg_.rho * k / samples;
      const double x = par_.Kx.eval(t), y = par_.Ky.eval(t);
      const double r = apriori * std::pow(t, wx_);
      for (double sx : {-r, 0.0, r}) {
        for (double sy : {-r, 0.0, r}) {
          h = std::max(h, 0.5 * (std::abs(fxx.eval(x + sx, y + sy)) +
                                 2.0 * std::abs(fxy.eval(x + sx, y + sy)) +
                                 std::abs(fyy.eval(x + sx, y + sy))));
        }
      }
    }
    return h * apriori * apriori;
  }

  void apply_T(const std::vector<double>& dx, const std::vector<double>& dy, std::vector<double>& out_x,
               std::vector<double>& out_y) const {
    const std::size_t m = cheb_.nodes.size();
    out_x.assign(m, 0.0);
    out_y.assign(m, 0.0);
    detail::parallel_for(m, [&](std::size_t i) {
      const Orbit& o = orbits_[i];
      detail::CompensatedSum sx, sy;
      sx.add(o.ex);
      sy.add(o.ey);
      for (std::size_t k = 0; k < m; ++k) {
        sx.add(o.mx[k] * dy[k]);
        sy.add(o.myx[k] * dx[k]);
        sy.add(o.myy[k] * dy[k]);
      }
      for (std::size_t j = 0; j < o.s.size(); ++j) {
        const auto [a, b] = barycentric(cheb_.nodes, cheb_.weights, dx, dy, o.s[j]);
        const double Dx = o.wx[j] * a, Dy = o.wy[j] * b;
        sy.add(op_.f_difference(o.kx[j], o.ky[j], Dx, Dy) - o.fx[j] * Dx - o.fy[j] * Dy);
      }
      out_x[i] = -sx.value() / o.wx[0];
      out_y[i] = -sy.value() / o.wy[0];
    });
  }

  Point curve(const RefineState& st, double t) const {
    const auto [a, b] = st.delta_at(t);
    return {par_.Kx.eval(t) + std::pow(t, wx_) * a, par_.Ky.eval(t) + std::pow(t, wy_) * b};
  }

  double residual_sup(const RefineState& st) const {
    const int samples = cfg_.residual_oversample * cfg_.m;
    double worst = 0.0;
    for (int k = 1; k <= samples; ++k) {
      const double t = cfg_.rho * k / samples;
      const Point fk = map_(curve(st, t));
      const Point kr = curve(st, dyn_.forward(t));
      worst = std::max({worst, std::abs(fk.x - kr.x), std::abs(fk.y - kr.y)});
    }
    return worst;
  }

  void measure_contraction(RefineState& st) const {
    std::vector<double> bx, by;
    apply_T(st.delta_x, st.delta_y, bx, by);
    const double eps = 1e-6;
    double ratio = 0.0;
    for (auto [vx, vy] : std::array<std::pair<double, double>, 4>{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}}) {
      std::vector<double> px = st.delta_x, py = st.delta_y;
      for (auto& v : px) v += eps * vx;
      for (auto& v : py) v += eps * vy;
      std::vector<double> tx, ty;
      apply_T(px, py, tx, ty);
      double diff = 0.0;
      for (std::size_t i = 0; i < tx.size(); ++i) {
        diff = std::max({diff, std::abs(tx[i] - bx[i]), std::abs(ty[i] - by[i])});
      }
      ratio = std::max(ratio, diff / eps);
    }
    st.measured_contraction = ratio;

    const double rn1 = std::pow(cfg_.rho, N_ - 1);
    const double sx = rn1 + (N_ - 1) / (nu_ * n_);
    const double sy = rn1 + (N_ - 1) / (nu_ * (n_ + N_ - 1));
    const auto [lx, ly] = lipschitz_factors(&st);
    st.contraction_bound = std::max(sx * rm_.c, sy * (lx + ly));
  }

  const ReducedMap& rm_;
  const Parameterization& par_;
  RefineConfig cfg_;
  NOperator op_;
  InnerDynamics dyn_;
  Chebyshev cheb_;
  PolynomialMap map_;
  Jet2 fx_, fy_;
  int n_ = 0, N_ = 0, wx_ = 0, wy_ = 0;
  double nu_ = 0.0;
  std::vector<Orbit> orbits_;
};

}  // namespace

RefineState picard_solve(const ReducedMap& rm, const Parameterization& par, const RefineConfig& cfg,
                         const std::function<void(const SweepRecord&)>& on_sweep) {
  if (par.family != Family::Primary) {
    fail(ErrorKind::Argument, "refinement supports the primary family only");
  }
  if (!(par.R_N() < 0.0)) {
    fail(ErrorKind::Argument, "picard_solve needs a stable curve (R_N < 0); refine unstable "
                              "curves through unstable_setup");
  }
  if (!(cfg.rho > 0.0) || cfg.m < 4 || !(cfg.tol > 0.0) || cfg.max_sweeps < 1 ||
      !(cfg.orbit_tol > 0.0) || cfg.residual_oversample < 1) {
    fail(ErrorKind::Argument, "invalid refinement configuration");
  }
  if (cfg.gamma != 1.0) {
    // The rescaled problem has the same R; solve it and keep delta in the
    // rescaled coordinates (delta^y scales by 1/gamma).
    const ReducedMap scaled = rescale(rm, cfg.gamma);
    Parameterization sp = par;
    sp.Ky *= 1.0 / cfg.gamma;
    RefineConfig inner = cfg;
    inner.gamma = 1.0;
    RefineState st = picard_solve(scaled, sp, inner, on_sweep);
    for (auto& v : st.delta_y) v *= cfg.gamma;
    return st;
  }
  Solver solver(rm, par, cfg);
  return solver.run(on_sweep);
}

int measured_order(const ReducedMap& rm, const Parameterization& par) {
  const ResidualReport rep = residual_report(rm, par);
  return std::min(rep.first_nonzero_x - par.x_offset, rep.first_nonzero_y - par.y_offset);
}

AposterioriResult aposteriori_refine(const ReducedMap& rm, const Jet1& Kx, const Jet1& Ky,
                                     const Jet1& R, const RefineConfig& cfg,
                                     const AposterioriOptions& opts,
                                     const std::function<void(const SweepRecord&)>& on_sweep) {
  // Offsets and normalization come from the minimal formal pair.
  Parameterization par = initial_pair(rm, Branch::Stable);
  const int dmax = std::max({Kx.degree(), Ky.degree(), 2 * par.N - 1});
  par.Kx = Kx.with_degree(dmax);
  par.Ky = Ky.with_degree(dmax);
  par.R = R;
  if (R.degree() < par.N || R[0] != 0.0 || R[1] != 1.0 || !(R[par.N] < 0.0)) {
    fail(ErrorKind::Argument, "R-hat must be t + R_N t^N + ... with R_N < 0");
  }
  for (int i = 0; i < par.N; ++i) {
    if (i >= 2 && R[i] != 0.0) fail(ErrorKind::Argument, "R-hat has terms below t^N");
  }
  // Large trial order so the residual jets cover every measured coefficient.
  par.n = dmax + 2;
  const ResidualReport rep = residual_report(rm, par);
  const int nhat = std::min(rep.first_nonzero_x - par.x_offset, rep.first_nonzero_y - par.y_offset);
  if (nhat < par.kx_base) {
    fail(ErrorKind::Numeric, "input fails the order condition: residual orders (" +
                                 std::to_string(rep.first_nonzero_x) + ", " +
                                 std::to_string(rep.first_nonzero_y) + ") are below (" +
                                 std::to_string(par.kx_base + par.x_offset) + ", " +
                                 std::to_string(par.kx_base + par.y_offset) + ")");
  }
  par.n = nhat;
  // Keep only the terms an order-n pair may carry.
  par.Kx = par.Kx.with_degree(std::max(par.Kx.degree(), nhat));
  par.Ky = par.Ky.with_degree(std::max(par.Ky.degree(), nhat + par.ky_base - par.kx_base));

  const int singular_from = par.N - 2 + par.kx_base;
  int target = std::max(nhat, opts.extend_to);
  if (nhat <= singular_from && par.R_2Nm1() == 0.0) target = std::max(target, singular_from + 1);
  while (par.n < target) par = extend_order(rm, par);

  AposterioriResult out;
  out.measured_order = nhat;
  out.state = picard_solve(rm, par, cfg, on_sweep);
  out.par = std::move(par);
  return out;
}

double rescale_gamma(const ReducedMap& rm, Branch branch) {
  const Classification cls = classify(rm);
  const double c = rm.c;
  const double r = rm.r;
  double g2 = 0.0;
  switch (cls.tag) {
    case CaseTag::Case1: {
      const double k = *rm.k;
      g2 = (k * rm.a_k / c) * (2 * r - 2 * k + 2) / (2 * r - k + 1);
      break;
    }
    case CaseTag::Case2: {
      const double l = *rm.l, k = *rm.k;
      const double K = leading_pair(rm, branch).ky_lead;
      g2 = ((l - 1) * std::abs(K * rm.b_l) + k * rm.a_k) / c * (r - 2 * l + 2) / (r - l + 1);
      break;
    }
    case CaseTag::Case3: {
      const double l = *rm.l;
      const double rad = (l - 1) * (r - 2 * l + 2) / (l * (r - l + 1));
      if (!(rad > 0.0)) fail(ErrorKind::Hypothesis, "nonpositive radicand in the rescaling factor");
      return std::abs(rm.b_l) / std::abs(c) * std::sqrt(rad);
    }
  }
  if (!(g2 > 0.0)) fail(ErrorKind::Hypothesis, "nonpositive radicand in the rescaling factor");
  return std::sqrt(g2);
}

ReducedMap rescale(const ReducedMap& rm, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorKind::Argument, "gamma must be positive");
  ReducedMap out = rm;
  out.c = rm.c * gamma;
  for (auto& a : out.p) a /= gamma;
  if (rm.k) out.a_k = rm.a_k / gamma;
  for (int d = 0; d <= out.u.degree(); ++d) {
    for (int j = 2; j <= d; ++j) out.u.at(d - j, j) *= std::pow(gamma, j - 1);
  }
  out.conj.push({ConjugationStep::Kind::Scale, Jet2(), gamma});
  return out;
}

// ---------------------------------------------------------------- RefinedCurve

RefinedCurve::RefinedCurve(ReducedMap working, Parameterization par, RefineState state,
                           PolynomialMap original, Branch branch)
    : working_(std::move(working)), par_(std::move(par)), state_(std::move(state)),
      original_(std::move(original)), branch_(branch), inverse_{original_} {}

Point RefinedCurve::delta(double t) const {
  const auto [a, b] = state_.delta_at(t);
  return {std::pow(t, state_.n) * a, std::pow(t, state_.n + state_.N - 1) * b};
}

Point RefinedCurve::local_working(double t) const {
  const Point d = delta(t);
  return {par_.Kx.eval(t) + d.x, par_.Ky.eval(t) + d.y};
}

Point RefinedCurve::local(double t) const { return working_.conj.to_original(local_working(t)); }

double RefinedCurve::R(double t) const {
  if (branch_ == Branch::Stable) return par_.R.eval(t);
  return InnerDynamics(par_.R, par_.N).backward(t);
}

double RefinedCurve::toward_origin(double t) const { return par_.R.eval(t); }

GlobalPoint RefinedCurve::eval(double t, int extra_depth) const {
  if (!(t > 0.0)) fail(ErrorKind::Argument, "curve parameter must be positive");
  const auto local_fn = [this](double s) { return local(s); };
  const auto step = [this](double s) { return toward_origin(s); };
  if (branch_ == Branch::Stable) {
    const auto away = [this](Point p) { return invert_F(inverse_, p); };
    return globalize(local_fn, step, away, state_.rho, t, extra_depth);
  }
  const auto away = [this](Point p) { return original_(p); };
  return globalize(local_fn, step, away, state_.rho, t, extra_depth);
}

Point RefinedCurve::residual(double t) const {
  const Point k = eval(t).p;
  const Point fk = original_(k);
  const Point kr = eval(R(t)).p;
  return {fk.x - kr.x, fk.y - kr.y};
}

}  // namespace paramfold
