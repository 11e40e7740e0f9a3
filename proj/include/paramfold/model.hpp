#pragma once

// Planar maps with a parabolic fixed point at the origin whose linear part
// is the Jordan block [[1, c], [0, 1]], their reduced form
//
//   (x, y) -> (x + c y, y + p(x) + y q(x) + u(x, y)),   c > 0,
//
// the case 1/2/3 classification, and the hypothesis checks that decide
// whether a stable or unstable curve construction applies.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "paramfold/jets.hpp"

namespace paramfold {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class CaseTag { Case1 = 1, Case2 = 2, Case3 = 3 };
enum class Branch { Stable, Unstable };

const char* to_string(CaseTag tag);
const char* to_string(Branch branch);

// F(x, y) = (x + c y + f1(x, y), y + f2(x, y)) with f1, f2 of order >= 2.
// The jets hold the polynomial nonlinearities exactly; `degree` is the
// smoothness degree r used by the reduction and the hypothesis checks.
struct PlanarMapSpec {
  std::string name;
  double c = 1.0;
  int degree = 3;
  Jet2 f1;
  Jet2 f2;

  // Throws Input errors naming the violated field.
  void validate() const;
};

class PolynomialMap {
 public:
  PolynomialMap(double c, Jet2 f1, Jet2 f2);
  static PolynomialMap from_spec(const PlanarMapSpec& spec);

  Point operator()(Point p) const;
  // Row-major [dFx/dx, dFx/dy, dFy/dx, dFy/dy].
  std::array<double, 4> jacobian(Point p) const;

  double c() const { return c_; }
  const Jet2& f1() const { return f1_; }
  const Jet2& f2() const { return f2_; }

 private:
  double c_;
  Jet2 f1_, f2_;
  Jet2 f1x_, f1y_, f2x_, f2y_;
};

// One coordinate change on the way from input coordinates to working ones.
struct ConjugationStep {
  enum class Kind { SignFlip, Shear, Scale };
  Kind kind = Kind::SignFlip;
  Jet2 shear;          // Shear: (x, y) -> (x, y + shear(x, y))
  double gamma = 1.0;  // Scale: (x, y) -> (x, y / gamma)
};

// Ordered chain of coordinate changes. to_working applies the steps in
// order; to_original undoes them in reverse (shears are inverted by Newton
// in y, so points far from the origin may fail to map back).
class Conjugation {
 public:
  void push(ConjugationStep step) { steps_.push_back(std::move(step)); }
  const std::vector<ConjugationStep>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  bool sign_flipped() const;

  Point to_working(Point p) const;
  Point to_original(Point p) const;

 private:
  std::vector<ConjugationStep> steps_;
};

struct ReducedMap {
  std::string name;
  double c = 1.0;
  int r = 3;
  // a_i at index i and b_j (coefficient of y x^(j-1)) at index j, both sized
  // r+1; entries below 2 are zero.
  std::vector<double> p;
  std::vector<double> q;
  Jet2 u;  // every monomial divisible by y^2
  // Remainder beyond degree r. Only polynomial maps are accepted, so this is
  // always false; the slot keeps the format stable for callable remainders.
  bool has_remainder = false;

  std::optional<int> k;
  std::optional<int> l;
  double a_k = 0.0;
  double b_l = 0.0;
  std::optional<CaseTag> tag;
  int N = 0;
  int s = 0;

  // True when p + y q + u is the whole nonlinearity rather than its
  // degree-r Taylor polynomial (the case when no shear or inversion was
  // needed).
  bool polynomial_exact = true;
  // True when this is the reduced form of the inverse of the input map.
  bool time_reversed = false;
  Conjugation conj;

  // p(x) + y q(x) + u(x, y) as one jet of degree r.
  Jet2 nonlinearity() const;
  PolynomialMap as_map() const;
};

struct Classification {
  CaseTag tag;
  int N;
  int s;
};

// Conjugates spec to its reduced form through degree r, flipping the sign
// of y first when c < 0, and classifies the result when p or q is nonzero.
ReducedMap reduce(const PlanarMapSpec& spec);

// Same as reduce() for a map given by its nonlinear jets. `conj` is the
// chain already applied to reach these coordinates.
ReducedMap reduce_jets(const std::string& name, double c, const Jet2& f1, const Jet2& f2,
                       int r, bool polynomial_exact, Conjugation conj);

// Case 1: k < 2l-1; case 2: k = 2l-1; case 3: k > 2l-1. Missing p or q
// counts as an infinite index. Throws Hypothesis when both are missing.
Classification classify(const ReducedMap& rm);

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct HypothesisReport {
  Branch branch = Branch::Stable;
  CaseTag tag = CaseTag::Case1;
  // Necessary conditions for the formal and analytic constructions.
  std::vector<HypothesisCheck> analytic;
  // Sufficient conditions for a C^r curve at the declared degree.
  std::vector<HypothesisCheck> smooth;
  std::optional<double> beta;            // case 2 only
  std::optional<bool> formal_window;     // case 2: a_k > -b_l^2 / (4 c l)
  bool exceptional_constant = false;     // case 2: a_k = -(2l+1)/(3l-1) b_l^2

  bool analytic_ok() const;
  bool smooth_ok() const;
};

// Never throws on failed hypotheses; the report carries them.
HypothesisReport check_hypotheses(const ReducedMap& rm, Branch branch);

}  // namespace paramfold
