#include "paramfold/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "paramfold/error.hpp"

namespace paramfold {

namespace {

// Coefficients below this fraction of the largest one count as zero when
// locating the leading indices k and l.
constexpr double kLeadingThreshold = 1e-13;
// Relative tolerance for the exceptional case-2 constant.
constexpr double kExceptionalTol = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double degree_max(const Jet2& f, int d) {
  double m = 0.0;
  for (int j = 0; j <= d; ++j) m = std::max(m, std::abs(f(d - j, j)));
  return m;
}

// scale[d] = max(floor, largest coefficient of f in degrees <= d).
std::vector<double> cumulative_scale(const Jet2& f, double floor) {
  std::vector<double> out(static_cast<std::size_t>(f.degree()) + 1, floor);
  double m = floor;
  for (int d = 0; d <= f.degree(); ++d) {
    m = std::max(m, degree_max(f, d));
    out[static_cast<std::size_t>(d)] = m;
  }
  return out;
}

HypothesisCheck check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::Case1: return "case1";
    case CaseTag::Case2: return "case2";
    case CaseTag::Case3: return "case3";
  }
  return "?";
}

const char* to_string(Branch branch) {
  return branch == Branch::Stable ? "stable" : "unstable";
}

void PlanarMapSpec::validate() const {
  if (!std::isfinite(c) || c == 0.0) fail(ErrorKind::Input, "c: not a nilpotent parabolic block (c = 0)");
  if (degree < 3) fail(ErrorKind::Input, "degree: must be at least 3");
  for (const auto* f : {&f1, &f2}) {
    const char* field = f == &f1 ? "f1" : "f2";
    if (f->order() < 2) {
      fail(ErrorKind::Input, std::string(field) + ": constant and linear monomials are not allowed");
    }
    if (f->effective_degree() > degree) {
      fail(ErrorKind::Input, std::string(field) + ": monomial above the declared degree");
    }
    for (double v : f->coeffs()) {
      if (!std::isfinite(v)) fail(ErrorKind::Input, std::string(field) + ": non-finite coefficient");
    }
  }
}

// ---------------------------------------------------------------- PolynomialMap

PolynomialMap::PolynomialMap(double c, Jet2 f1, Jet2 f2)
    : c_(c),
      f1_(std::move(f1)),
      f2_(std::move(f2)),
      f1x_(f1_.dx()),
      f1y_(f1_.dy()),
      f2x_(f2_.dx()),
      f2y_(f2_.dy()) {}

PolynomialMap PolynomialMap::from_spec(const PlanarMapSpec& spec) {
  return PolynomialMap(spec.c, spec.f1, spec.f2);
}

Point PolynomialMap::operator()(Point p) const {
  return {p.x + c_ * p.y + f1_.eval(p.x, p.y), p.y + f2_.eval(p.x, p.y)};
}

std::array<double, 4> PolynomialMap::jacobian(Point p) const {
  return {1.0 + f1x_.eval(p.x, p.y), c_ + f1y_.eval(p.x, p.y), f2x_.eval(p.x, p.y),
          1.0 + f2y_.eval(p.x, p.y)};
}

// ---------------------------------------------------------------- Conjugation

bool Conjugation::sign_flipped() const {
  return std::ranges::count_if(steps_, [](const ConjugationStep& s) {
           return s.kind == ConjugationStep::Kind::SignFlip;
         }) % 2 == 1;
}

Point Conjugation::to_working(Point p) const {
  for (const auto& step : steps_) {
    switch (step.kind) {
      case ConjugationStep::Kind::SignFlip: p.y = -p.y; break;
      case ConjugationStep::Kind::Shear: p.y += step.shear.eval(p.x, p.y); break;
      case ConjugationStep::Kind::Scale: p.y /= step.gamma; break;
    }
  }
  return p;
}

Point Conjugation::to_original(Point p) const {
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    switch (it->kind) {
      case ConjugationStep::Kind::SignFlip: p.y = -p.y; break;
      case ConjugationStep::Kind::Scale: p.y *= it->gamma; break;
      case ConjugationStep::Kind::Shear: {
        // Solve y + h(x, y) = target for y.
        const double target = p.y;
        const Jet2 hy = it->shear.dy();
        double y = target;
        bool converged = false;
        for (int iter = 0; iter < 60; ++iter) {
          const double g = y + it->shear.eval(p.x, y) - target;
          const double dg = 1.0 + hy.eval(p.x, y);
          if (dg == 0.0) break;
          const double step = g / dg;
          y -= step;
          if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(y))) {
            converged = true;
            break;
          }
        }
        if (!converged || !std::isfinite(y)) {
          fail(ErrorKind::Numeric, "could not undo the reduction shear at x = " + fmt(p.x));
        }
        p.y = y;
        break;
      }
    }
  }
  return p;
}

// ---------------------------------------------------------------- ReducedMap

Jet2 ReducedMap::nonlinearity() const {
  Jet2 f = u.with_degree(r);
  for (int i = 2; i <= r; ++i) f.at(i, 0) += p[static_cast<std::size_t>(i)];
  for (int j = 2; j <= r; ++j) f.at(j - 1, 1) += q[static_cast<std::size_t>(j)];
  return f;
}

PolynomialMap ReducedMap::as_map() const {
  return PolynomialMap(c, Jet2(r), nonlinearity());
}

ReducedMap reduce_jets(const std::string& name, double c, const Jet2& f1, const Jet2& f2,
                       int r, bool polynomial_exact, Conjugation conj) {
  if (c == 0.0 || !std::isfinite(c)) {
    fail(ErrorKind::Input, "not a nilpotent parabolic block (c = 0)");
  }
  Jet2 g1 = f1.with_degree(r);
  Jet2 g2 = f2.with_degree(r);
  if (c < 0.0) {
    // L(x, y) = (x, -y): L^-1 F L = (x - c y + f1(x, -y), y - f2(x, -y)).
    Jet2 flip1(r), flip2(r);
    for (int d = 0; d <= r; ++d) {
      for (int j = 0; j <= d; ++j) {
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        flip1.at(d - j, j) = sgn * g1(d - j, j);
        flip2.at(d - j, j) = -sgn * g2(d - j, j);
      }
    }
    g1 = std::move(flip1);
    g2 = std::move(flip2);
    c = -c;
    conj.push({ConjugationStep::Kind::SignFlip, Jet2(), 1.0});
  }

  Jet2 f = g2;
  if (g1.max_abs() != 0.0) {
    // Phi(x, y) = (x, y + f1/c); the reduced map is Phi F Phi^-1.
    const Jet2 h = g1 * (1.0 / c);
    const Jet2Pair phi{Jet2::x(r), Jet2::y(r) + h};
    const Jet2Pair phi_inv = invert_in_y(h);
    const Jet2Pair F{Jet2::x(r) + c * Jet2::y(r) + g1, Jet2::y(r) + g2};
    const Jet2Pair inner = compose(F, phi_inv);
    const Jet2Pair reduced = compose(phi, inner);
    const Jet2 first_residual = reduced.x - (Jet2::x(r) + c * Jet2::y(r));
    std::vector<double> scale = cumulative_scale(F.x, std::max(1.0, c));
    const std::vector<double> inner_scale = cumulative_scale(inner.y, 0.0);
    const std::vector<double> inv_scale = cumulative_scale(phi_inv.y, 0.0);
    for (std::size_t d = 0; d < scale.size(); ++d) {
      scale[d] = std::max({scale[d], c * inner_scale[d], c * inv_scale[d]});
    }
    for (int d = 2; d <= r; ++d) {
      const double bad = degree_max(first_residual, d);
      if (bad > 1e-13 * scale[static_cast<std::size_t>(d)]) {
        fail(ErrorKind::Numeric, "reduction left first-component terms of size " + fmt(bad) +
                                     " at degree " + std::to_string(d));
      }
    }
    f = reduced.y - Jet2::y(r);
    polynomial_exact = false;
    conj.push({ConjugationStep::Kind::Shear, h, 1.0});
  }

  ReducedMap rm;
  rm.name = name;
  rm.c = c;
  rm.r = r;
  rm.p.assign(static_cast<std::size_t>(r) + 1, 0.0);
  rm.q.assign(static_cast<std::size_t>(r) + 1, 0.0);
  rm.u = Jet2(r);
  for (int d = 2; d <= r; ++d) {
    for (int j = 0; j <= d; ++j) {
      const double v = f(d - j, j);
      if (j == 0) {
        rm.p[static_cast<std::size_t>(d)] = v;
      } else if (j == 1) {
        rm.q[static_cast<std::size_t>(d)] = v;  // y x^(d-1): b_d
      } else {
        rm.u.at(d - j, j) = v;
      }
    }
  }
  rm.polynomial_exact = polynomial_exact;
  rm.conj = std::move(conj);

  // Exact maps use the largest coefficient overall. Truncated jets (shears,
  // inverses) compare degree i with the largest coefficient of degree <= i,
  // so fast-growing high-order terms do not mask low ones.
  std::vector<double> scale = cumulative_scale(f, 0.0);
  if (polynomial_exact) std::fill(scale.begin(), scale.end(), scale.back());
  auto thresh = [&](int i) { return kLeadingThreshold * scale[static_cast<std::size_t>(i)]; };
  for (int i = 2; i <= r; ++i) {
    if (std::abs(rm.p[static_cast<std::size_t>(i)]) > thresh(i)) {
      rm.k = i;
      rm.a_k = rm.p[static_cast<std::size_t>(i)];
      break;
    }
  }
  for (int j = 2; j <= r; ++j) {
    if (std::abs(rm.q[static_cast<std::size_t>(j)]) > thresh(j)) {
      rm.l = j;
      rm.b_l = rm.q[static_cast<std::size_t>(j)];
      break;
    }
  }
  if (rm.k || rm.l) {
    const Classification cls = classify(rm);
    rm.tag = cls.tag;
    rm.N = cls.N;
    rm.s = cls.s;
  }
  return rm;
}

ReducedMap reduce(const PlanarMapSpec& spec) {
  spec.validate();
  return reduce_jets(spec.name, spec.c, spec.f1, spec.f2, spec.degree, true, Conjugation{});
}

Classification classify(const ReducedMap& rm) {
  if (!rm.k && !rm.l) {
    fail(ErrorKind::Hypothesis, "no nonlinear normal data through degree " + std::to_string(rm.r));
  }
  // Infinite indices compare as larger than any finite one.
  if (rm.k && (!rm.l || *rm.k < 2 * *rm.l - 1)) return {CaseTag::Case1, *rm.k, 2 * rm.r};
  if (rm.k && *rm.k == 2 * *rm.l - 1) return {CaseTag::Case2, *rm.l, rm.r};
  return {CaseTag::Case3, *rm.l, rm.r};
}

bool HypothesisReport::analytic_ok() const {
  return std::ranges::all_of(analytic, [](const HypothesisCheck& c) { return c.passed; });
}

bool HypothesisReport::smooth_ok() const {
  return std::ranges::all_of(smooth, [](const HypothesisCheck& c) { return c.passed; });
}

HypothesisReport check_hypotheses(const ReducedMap& rm, Branch branch) {
  HypothesisReport rep;
  rep.branch = branch;
  const Classification cls = classify(rm);
  rep.tag = cls.tag;
  const double c = rm.c;
  const int r = rm.r;
  const bool stable = branch == Branch::Stable;

  switch (cls.tag) {
    case CaseTag::Case1: {
      const int k = *rm.k;
      rep.analytic.push_back(check("a_k > 0", rm.a_k > 0.0, "a_k = " + fmt(rm.a_k)));
      rep.smooth.push_back(check("r >= 3k/2", 2 * r >= 3 * k,
                                 "r = " + std::to_string(r) + ", k = " + std::to_string(k)));
      break;
    }
    case CaseTag::Case2: {
      const int k = *rm.k, l = *rm.l;
      const double a = rm.a_k, b = rm.b_l;
      rep.analytic.push_back(check("a_k > 0", a > 0.0, "a_k = " + fmt(a)));
      rep.analytic.push_back(check("b_l != 0", b != 0.0, "b_l = " + fmt(b)));
      const double disc = b * b + 4.0 * c * a * l;
      rep.formal_window = a > -b * b / (4.0 * c * l);
      const double exceptional = -(2.0 * l + 1.0) / (3.0 * l - 1.0) * b * b;
      rep.exceptional_constant =
          std::abs(a - exceptional) <= kExceptionalTol * std::max(std::abs(exceptional), 1e-300);
      rep.smooth.push_back(check("r > k", r > k, "r = " + std::to_string(r) + ", k = " + std::to_string(k)));
      if (disc >= 0.0) {
        // The inverse map has -b_l in place of b_l.
        const double bb = stable ? b : -b;
        const double beta = 2.0 * l * std::abs(b) / std::abs(bb - std::sqrt(disc));
        rep.beta = beta;
        const double lhs1 = beta / ((r - 2.0 * l + 2.0) * (r - l + 1.0)) *
                            (2.0 * l * (l - 1.0) + c * k * a / (b * b) * beta);
        const double lhs2 = 2.0 * l * beta / (r - l + 1.0);
        const bool ok = r - 2 * l + 2 > 0 && std::max(lhs1, lhs2) < 1.0;
        rep.smooth.push_back(check("beta condition", ok,
                                   "max(" + fmt(lhs1) + ", " + fmt(lhs2) + ") with beta = " + fmt(beta)));
      } else {
        rep.smooth.push_back(check("beta condition", false, "b_l^2 + 4 c a_k l < 0"));
      }
      break;
    }
    case CaseTag::Case3: {
      const int l = *rm.l;
      const double b = rm.b_l;
      rep.analytic.push_back(stable ? check("b_l < 0", b < 0.0, "b_l = " + fmt(b))
                                    : check("b_l > 0", b > 0.0, "b_l = " + fmt(b)));
      rep.smooth.push_back(check("r > 2l-1", r > 2 * l - 1,
                                 "r = " + std::to_string(r) + ", l = " + std::to_string(l)));
      const double denom = (r - 2.0 * l + 2.0) * (r - l + 1.0);
      const double ratio = denom > 0.0 ? l * (l - 1.0) / denom : INFINITY;
      rep.smooth.push_back(check("l(l-1)/((r-2l+2)(r-l+1)) < 1", ratio < 1.0, "value " + fmt(ratio)));
      break;
    }
  }
  return rep;
}

}  // namespace paramfold
