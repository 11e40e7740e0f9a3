#pragma once

// Truncated power series ("jets") in one and two real variables.
//
// A jet of degree d stores the Taylor coefficients of orders 0..d. Every
// operation truncates its result at the working degree of its operands, so
// arithmetic is exact up to that degree in exact arithmetic and nothing is
// ever reported above it.
//
// Jet2 coefficient layout (also the serialization order) is graded
// lexicographic with x before y:
//
//   1, x, y, x^2, xy, y^2, x^3, x^2y, xy^2, y^3, ...
//
// i.e. monomial x^i y^j sits at (i+j)(i+j+1)/2 + j.

#include <cstddef>
#include <span>
#include <vector>

namespace paramfold {

class Jet1 {
 public:
  Jet1() : coeffs_(1, 0.0) {}
  explicit Jet1(int degree);
  Jet1(int degree, std::vector<double> coeffs);

  // t at the given degree (requires degree >= 1).
  static Jet1 identity(int degree);
  static Jet1 monomial(int degree, int power, double value = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  // Coefficient of t^i; zero above the degree.
  double operator[](int i) const {
    return (i >= 0 && i <= degree()) ? coeffs_[static_cast<std::size_t>(i)] : 0.0;
  }
  double& at(int i);

  std::span<const double> coeffs() const { return coeffs_; }

  // Same coefficients at another degree (drops or zero-pads).
  Jet1 with_degree(int degree) const;

  double eval(double t) const;
  Jet1 derivative() const;

  // Index of the first coefficient with magnitude above tol, or degree()+1.
  int order(double tol = 0.0) const;
  double max_abs() const;

  Jet1& operator+=(const Jet1& other);
  Jet1& operator-=(const Jet1& other);
  Jet1& operator*=(double s);

 private:
  std::vector<double> coeffs_;
};

Jet1 operator+(Jet1 a, const Jet1& b);
Jet1 operator-(Jet1 a, const Jet1& b);
Jet1 operator-(Jet1 a);
Jet1 operator*(Jet1 a, double s);
Jet1 operator*(double s, Jet1 a);
// Cauchy product truncated at the common degree.
Jet1 operator*(const Jet1& a, const Jet1& b);
bool operator==(const Jet1& a, const Jet1& b);

// outer(inner(t)) through the working degree; inner must vanish at 0.
Jet1 compose(const Jet1& outer, const Jet1& inner);

class Jet2 {
 public:
  Jet2() : coeffs_(1, 0.0), degree_(0) {}
  explicit Jet2(int degree);
  Jet2(int degree, std::vector<double> coeffs);

  static Jet2 x(int degree);
  static Jet2 y(int degree);
  static Jet2 monomial(int degree, int i, int j, double value = 1.0);

  static std::size_t index(int i, int j) {
    const auto d = static_cast<std::size_t>(i + j);
    return d * (d + 1) / 2 + static_cast<std::size_t>(j);
  }
  static std::size_t size_for(int degree) {
    const auto d = static_cast<std::size_t>(degree);
    return (d + 1) * (d + 2) / 2;
  }

  int degree() const { return degree_; }

  // Coefficient of x^i y^j; zero outside the table.
  double operator()(int i, int j) const {
    return (i >= 0 && j >= 0 && i + j <= degree_) ? coeffs_[index(i, j)] : 0.0;
  }
  double& at(int i, int j);

  std::span<const double> coeffs() const { return coeffs_; }

  Jet2 with_degree(int degree) const;

  double eval(double x, double y) const;
  Jet2 dx() const;
  Jet2 dy() const;

  // Lowest total degree carrying a coefficient above tol, or degree()+1.
  int order(double tol = 0.0) const;
  double max_abs() const;
  // Highest total degree with a nonzero coefficient (-1 for the zero jet).
  int effective_degree() const;

  Jet2& operator+=(const Jet2& other);
  Jet2& operator-=(const Jet2& other);
  Jet2& operator*=(double s);

 private:
  std::vector<double> coeffs_;
  int degree_;
};

Jet2 operator+(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a);
Jet2 operator*(Jet2 a, double s);
Jet2 operator*(double s, Jet2 a);
Jet2 operator*(const Jet2& a, const Jet2& b);
bool operator==(const Jet2& a, const Jet2& b);

// t -> outer(inner_x(t), inner_y(t)). Inners must vanish at 0 and share a
// degree, which is the degree of the result.
Jet1 compose(const Jet2& outer, const Jet1& inner_x, const Jet1& inner_y);

// (x, y) -> outer(inner_x(x, y), inner_y(x, y)), same rules as above.
Jet2 compose(const Jet2& outer, const Jet2& inner_x, const Jet2& inner_y);

// A planar map germ (x, y) -> (x(x, y), y(x, y)) given by two jets.
struct Jet2Pair {
  Jet2 x;
  Jet2 y;

  int degree() const { return x.degree(); }
  static Jet2Pair identity(int degree);
};

Jet2Pair compose(const Jet2Pair& outer, const Jet2Pair& inner);

// Inverse of the shear (x, y) -> (x, y + h(x, y)) with ord(h) >= 2, as a
// pair of jets at h's degree. Uses the fixed point y_{m+1} = y - h(x, y_m),
// which gains at least one order per step.
Jet2Pair invert_in_y(const Jet2& h);

}  // namespace paramfold
