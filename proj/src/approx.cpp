#include "paramfold/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "paramfold/error.hpp"

namespace paramfold {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct ResidualJets {
  Jet1 Gx, Gy;
  double scale_x, scale_y;  // largest coefficient of the subtracted terms
};

// F(K(t)) - K(R(t)) through degree d.
ResidualJets residual_jets(const Jet2& f, double c, const Parameterization& par, int d) {
  const Jet1 kx = par.Kx.with_degree(d);
  const Jet1 ky = par.Ky.with_degree(d);
  const Jet1 r = par.R.with_degree(d);
  const Jet1 fx = kx + c * ky;
  const Jet1 fy = ky + compose(f, kx, ky);
  const Jet1 kxr = compose(kx, r);
  const Jet1 kyr = compose(ky, r);
  ResidualJets out{fx - kxr, fy - kyr, std::max(fx.max_abs(), kxr.max_abs()),
                   std::max(fy.max_abs(), kyr.max_abs())};
  return out;
}

int first_above(const Jet1& g, double thresh) { return g.order(thresh); }

struct Offsets {
  int kx_base, ky_base, N, x_offset, y_offset;
};

Offsets offsets_for(const ReducedMap& rm, Family family) {
  const Classification cls = classify(rm);
  if (family == Family::Secondary) {
    if (cls.tag != CaseTag::Case3) {
      fail(ErrorKind::Hypothesis, "the secondary family exists only in case 3");
    }
    if (!rm.k) fail(ErrorKind::Hypothesis, "the secondary family needs a nonzero p (k <= r)");
    const int k = *rm.k, l = *rm.l;
    const int n2 = k - l + 1;
    return {1, n2, n2, n2, k};
  }
  if (cls.tag == CaseTag::Case1) {
    const int k = *rm.k;
    return {2, k + 1, k, k, 2 * k - 1};
  }
  const int l = *rm.l;
  return {1, l, l, l, 2 * l - 1};
}

}  // namespace

int order_cap(const ReducedMap& rm, Family family) {
  if (rm.polynomial_exact) return std::numeric_limits<int>::max();
  const Classification cls = classify(rm);
  const int r = rm.r;
  if (family == Family::Secondary) {
    const int k = *rm.k, l = *rm.l;
    return r - (k - l) * l - 2 * l + 1;
  }
  if (cls.tag == CaseTag::Case1) return 2 * (r - *rm.k + 1);
  return r - 2 * *rm.l + 2;
}

LeadingPair leading_pair(const ReducedMap& rm, Branch branch, Family family) {
  const Classification cls = classify(rm);
  const double c = rm.c;
  const bool stable = branch == Branch::Stable;
  double ky = 0.0;
  if (family == Family::Secondary) {
    offsets_for(rm, family);  // validates the case
    ky = -rm.a_k / rm.b_l;
    const double rn = c * ky;
    if ((rn < 0.0) != stable) {
      fail(ErrorKind::Hypothesis, std::string("secondary family has R_N = ") + fmt(rn) +
                                      ", not a " + to_string(branch) + " curve");
    }
    return {ky, rn};
  }
  switch (cls.tag) {
    case CaseTag::Case1: {
      const int k = *rm.k;
      if (rm.a_k <= 0.0) {
        fail(ErrorKind::Hypothesis, "case 1 needs a_k > 0 (a_k = " + fmt(rm.a_k) + ")");
      }
      const double mag = std::sqrt(2.0 * rm.a_k / (c * (k + 1)));
      ky = stable ? -mag : mag;
      return {ky, 0.5 * c * ky};
    }
    case CaseTag::Case2: {
      const int l = *rm.l;
      const double b = rm.b_l;
      const double disc = b * b + 4.0 * c * rm.a_k * l;
      if (disc < 0.0) fail(ErrorKind::Hypothesis, "no real formal curve: b_l^2 + 4 c a_k l < 0");
      ky = (stable ? b - std::sqrt(disc) : b + std::sqrt(disc)) / (2.0 * c * l);
      break;
    }
    case CaseTag::Case3: {
      ky = rm.b_l / (c * *rm.l);
      break;
    }
  }
  const double rn = c * ky;
  if (rn == 0.0 || (rn < 0.0) != stable) {
    fail(ErrorKind::Hypothesis, std::string("leading coefficient R_N = ") + fmt(rn) +
                                    " does not give a " + to_string(branch) + " curve");
  }
  return {ky, rn};
}

Parameterization initial_pair(const ReducedMap& rm, Branch branch, Family family) {
  const Offsets off = offsets_for(rm, family);
  const LeadingPair lead = leading_pair(rm, branch, family);
  Parameterization par;
  par.tag = *rm.tag;
  par.branch = branch;
  par.family = family;
  par.n = off.kx_base;
  par.N = off.N;
  par.kx_base = off.kx_base;
  par.ky_base = off.ky_base;
  par.x_offset = off.x_offset;
  par.y_offset = off.y_offset;
  par.Kx = Jet1::monomial(off.kx_base, off.kx_base, 1.0);
  par.Ky = Jet1::monomial(off.ky_base, off.ky_base, lead.ky_lead);
  par.R = Jet1::identity(2 * off.N - 1);
  par.R.at(off.N) = lead.R_N;
  return par;
}

ResidualReport residual_report(const ReducedMap& rm, const Parameterization& par,
                               std::span<const double> sample_t) {
  const int d = par.n + par.y_offset + 3;
  const ResidualJets g = residual_jets(rm.nonlinearity(), rm.c, par, d);
  ResidualReport rep;
  rep.n = par.n;
  rep.Gx = g.Gx;
  rep.Gy = g.Gy;
  rep.first_nonzero_x = first_above(g.Gx, kOrderTolerance * std::max(g.scale_x, 1e-300));
  rep.first_nonzero_y = first_above(g.Gy, kOrderTolerance * std::max(g.scale_y, 1e-300));
  if (!sample_t.empty()) {
    const auto [ex, ey] = residual_polynomials(rm, par);
    for (double t : sample_t) rep.pointwise.push_back({t, std::abs(ex.eval(t)), std::abs(ey.eval(t))});
  }
  return rep;
}

std::pair<Jet1, Jet1> residual_polynomials(const ReducedMap& rm, const Parameterization& par) {
  const Jet2 f = rm.nonlinearity();
  const int e = std::max(f.effective_degree(), 1);
  const int dk = std::max(par.Kx.degree(), par.Ky.degree());
  const int d = std::max({e * dk, dk * par.R.degree(), par.n + par.y_offset + 1});
  ResidualJets g = residual_jets(f, rm.c, par, d);
  const int ox = par.n + par.x_offset;
  const int oy = par.n + par.y_offset;
  double dropped_x = 0.0, dropped_y = 0.0;
  for (int i = 0; i < std::min(ox, d + 1); ++i) {
    dropped_x = std::max(dropped_x, std::abs(g.Gx[i]));
    g.Gx.at(i) = 0.0;
  }
  for (int i = 0; i < std::min(oy, d + 1); ++i) {
    dropped_y = std::max(dropped_y, std::abs(g.Gy[i]));
    g.Gy.at(i) = 0.0;
  }
  if (dropped_x > kOrderTolerance * std::max(g.scale_x, 1e-300) ||
      dropped_y > kOrderTolerance * std::max(g.scale_y, 1e-300)) {
    fail(ErrorKind::Numeric, "residual does not satisfy the order-" + std::to_string(par.n) +
                                 " condition (low-order coefficients " + fmt(dropped_x) + ", " +
                                 fmt(dropped_y) + ")");
  }
  return {g.Gx, g.Gy};
}

Parameterization extend_order(const ReducedMap& rm, const Parameterization& par,
                              const ExtendOptions& opts) {
  const int n = par.n;
  if (n + 1 > order_cap(rm, par.family)) {
    fail(ErrorKind::Hypothesis, "order " + std::to_string(n + 1) + " exceeds the cap " +
                                    std::to_string(order_cap(rm, par.family)) +
                                    " for a map known through degree " + std::to_string(rm.r));
  }
  const Jet2 f = rm.nonlinearity();
  const int ix = n + 1;
  const int iy = n + par.x_offset;
  const int jr = par.step_r_index(n);
  const int gx_at = n + par.x_offset;
  const int gy_at = n + par.y_offset;
  const int d = n + par.y_offset + 3;

  Parameterization base = par;
  base.n = n + 1;
  base.Kx = par.Kx.with_degree(std::max(par.Kx.degree(), ix));
  base.Ky = par.Ky.with_degree(std::max(par.Ky.degree(), iy));
  base.R = par.R.with_degree(std::max(par.R.degree(), jr));

  auto trial = [&](double X, double Y, double rho) {
    Parameterization p = base;
    p.Kx.at(ix) += X;
    p.Ky.at(iy) += Y;
    p.R.at(jr) += rho;
    return p;
  };
  struct Lead {
    double x, y;
    double sx, sy;
  };
  auto lead = [&](const Parameterization& p) {
    const ResidualJets g = residual_jets(f, rm.c, p, d);
    return Lead{g.Gx[gx_at], g.Gy[gy_at], g.scale_x, g.scale_y};
  };

  const Lead g0 = lead(trial(0, 0, 0));
  const Lead gX = lead(trial(1, 0, 0));
  const Lead gY = lead(trial(0, 1, 0));
  const Lead gR = lead(trial(0, 0, 1));
  const double m00 = gX.x - g0.x, m10 = gX.y - g0.y;
  const double m01 = gY.x - g0.x, m11 = gY.y - g0.y;
  const double cr0 = gR.x - g0.x, cr1 = gR.y - g0.y;

  const double mmax = std::max({std::abs(m00), std::abs(m01), std::abs(m10), std::abs(m11)});
  const double det = m00 * m11 - m01 * m10;
  const bool singular = std::abs(det) < 1e-9 * mmax * mmax;
  const bool expected = jr == 2 * par.N - 1;
  if (singular != expected) {
    fail(ErrorKind::Numeric,
         "induction step " + std::to_string(n) + " -> " + std::to_string(n + 1) +
             (singular ? " is singular but no R coefficient is available at that order"
                       : " was expected to be singular") +
             " (det = " + fmt(det) + ", matrix scale " + fmt(mmax) + ")");
  }

  double X = 0.0, Y = 0.0, rho = 0.0;
  if (!singular) {
    X = (-g0.x * m11 + g0.y * m01) / det;
    Y = (-g0.y * m00 + g0.x * m10) / det;
  } else {
    // Left null vector of the rank-one matrix fixes rho by consistency.
    double w0 = m10, w1 = -m00;
    if (std::hypot(m11, m01) > std::hypot(m10, m00)) {
      w0 = m11;
      w1 = -m01;
    }
    const double wr = w0 * cr0 + w1 * cr1;
    const double wg = w0 * g0.x + w1 * g0.y;
    if (std::abs(wr) <= 1e-12 * std::hypot(w0, w1) * std::max(std::abs(cr0), std::abs(cr1))) {
      fail(ErrorKind::Numeric, "singular step " + std::to_string(n) +
                                   ": consistency condition cannot be met by R_" +
                                   std::to_string(jr));
    }
    rho = -wg / wr;
    X = opts.tie_break_x;
    if (std::abs(m01) >= std::abs(m11)) {
      Y = (-g0.x - rho * cr0 - m00 * X) / m01;
    } else {
      Y = (-g0.y - rho * cr1 - m10 * X) / m11;
    }
  }

  Parameterization out = trial(X, Y, rho);
  const Lead check = lead(out);
  if (std::abs(check.x) > kOrderTolerance * std::max(check.sx, 1e-300) ||
      std::abs(check.y) > kOrderTolerance * std::max(check.sy, 1e-300)) {
    fail(ErrorKind::Numeric, "induction step " + std::to_string(n) +
                                 " left leading residual coefficients " + fmt(check.x) + ", " +
                                 fmt(check.y));
  }
  return out;
}

Approximation approximate(const ReducedMap& rm, Branch branch, int n, const ApproxOptions& opts) {
  Parameterization par = initial_pair(rm, branch, opts.family);
  if (n < par.n) {
    fail(ErrorKind::Argument, "order must be at least " + std::to_string(par.n));
  }
  const ExtendOptions ext{opts.tie_break_x};
  while (par.n < n) par = extend_order(rm, par, ext);
  Approximation out{par, residual_report(rm, par)};
  if (out.residual.first_nonzero_x < n + par.x_offset ||
      out.residual.first_nonzero_y < n + par.y_offset) {
    fail(ErrorKind::Numeric, "order certificate failed at n = " + std::to_string(n));
  }
  return out;
}

}  // namespace paramfold
