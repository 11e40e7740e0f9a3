#include "paramfold/jets.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "paramfold/error.hpp"

namespace paramfold {

namespace {

void require_degree(int degree) {
  if (degree < 0) fail(ErrorKind::Argument, "jet degree must be nonnegative");
}

void require_same(int a, int b, const char* op) {
  if (a != b) {
    fail(ErrorKind::Argument, std::string("jet degree mismatch in ") + op + ": " +
                                  std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

// ---------------------------------------------------------------- Jet1

Jet1::Jet1(int degree) {
  require_degree(degree);
  coeffs_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
}

Jet1::Jet1(int degree, std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  require_degree(degree);
  if (coeffs_.size() != static_cast<std::size_t>(degree) + 1) {
    fail(ErrorKind::Argument, "Jet1 needs exactly degree+1 coefficients");
  }
}

Jet1 Jet1::identity(int degree) {
  if (degree < 1) fail(ErrorKind::Argument, "identity jet needs degree >= 1");
  return monomial(degree, 1);
}

Jet1 Jet1::monomial(int degree, int power, double value) {
  Jet1 j(degree);
  if (power >= 0 && power <= degree) j.coeffs_[static_cast<std::size_t>(power)] = value;
  return j;
}

double& Jet1::at(int i) {
  if (i < 0 || i > degree()) fail(ErrorKind::Argument, "Jet1 index out of range");
  return coeffs_[static_cast<std::size_t>(i)];
}

Jet1 Jet1::with_degree(int degree) const {
  Jet1 out(degree);
  const int top = std::min(degree, this->degree());
  std::copy_n(coeffs_.begin(), top + 1, out.coeffs_.begin());
  return out;
}

double Jet1::eval(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

Jet1 Jet1::derivative() const {
  const int d = degree();
  Jet1 out(std::max(d - 1, 0));
  for (int i = 1; i <= d; ++i) out.coeffs_[static_cast<std::size_t>(i - 1)] = i * (*this)[i];
  return out;
}

int Jet1::order(double tol) const {
  for (int i = 0; i <= degree(); ++i) {
    if (std::abs((*this)[i]) > tol) return i;
  }
  return degree() + 1;
}

double Jet1::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Jet1& Jet1::operator+=(const Jet1& other) {
  require_same(degree(), other.degree(), "add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Jet1& Jet1::operator-=(const Jet1& other) {
  require_same(degree(), other.degree(), "sub");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

Jet1& Jet1::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
Jet1 operator-(Jet1 a) { return a *= -1.0; }
Jet1 operator*(Jet1 a, double s) { return a *= s; }
Jet1 operator*(double s, Jet1 a) { return a *= s; }

Jet1 operator*(const Jet1& a, const Jet1& b) {
  require_same(a.degree(), b.degree(), "mul");
  const int d = a.degree();
  std::vector<double> out(static_cast<std::size_t>(d) + 1, 0.0);
  const int oa = a.order(), ob = b.order();
  for (int i = oa; i <= d; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (int j = ob; i + j <= d; ++j) out[static_cast<std::size_t>(i + j)] += ai * b[j];
  }
  return Jet1(d, std::move(out));
}

bool operator==(const Jet1& a, const Jet1& b) {
  return a.degree() == b.degree() && std::ranges::equal(a.coeffs(), b.coeffs());
}

Jet1 compose(const Jet1& outer, const Jet1& inner) {
  if (inner[0] != 0.0) {
    fail(ErrorKind::Argument, "compose: inner jet must have zero constant term");
  }
  const int d = inner.degree();
  // Horner in the jet ring: a_0 + s (a_1 + s (a_2 + ...)).
  Jet1 acc(d);
  for (int i = std::min(outer.degree(), d); i >= 0; --i) {
    acc = acc * inner;
    acc.at(0) += outer[i];
  }
  return acc;
}

// ---------------------------------------------------------------- Jet2

Jet2::Jet2(int degree) : degree_(degree) {
  require_degree(degree);
  coeffs_.assign(size_for(degree), 0.0);
}

Jet2::Jet2(int degree, std::vector<double> coeffs) : coeffs_(std::move(coeffs)), degree_(degree) {
  require_degree(degree);
  if (coeffs_.size() != size_for(degree)) {
    fail(ErrorKind::Argument, "Jet2 coefficient table does not match its degree");
  }
}

Jet2 Jet2::x(int degree) { return monomial(degree, 1, 0); }
Jet2 Jet2::y(int degree) { return monomial(degree, 0, 1); }

Jet2 Jet2::monomial(int degree, int i, int j, double value) {
  Jet2 out(degree);
  if (i >= 0 && j >= 0 && i + j <= degree) out.coeffs_[index(i, j)] = value;
  return out;
}

double& Jet2::at(int i, int j) {
  if (i < 0 || j < 0 || i + j > degree_) fail(ErrorKind::Argument, "Jet2 index out of range");
  return coeffs_[index(i, j)];
}

Jet2 Jet2::with_degree(int degree) const {
  Jet2 out(degree);
  const int top = std::min(degree, degree_);
  for (int d = 0; d <= top; ++d) {
    for (int j = 0; j <= d; ++j) out.coeffs_[index(d - j, j)] = (*this)(d - j, j);
  }
  return out;
}

double Jet2::eval(double xv, double yv) const {
  // Horner in x over polynomials in y.
  double acc = 0.0;
  for (int i = degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = degree_ - i; j >= 0; --j) inner = inner * yv + (*this)(i, j);
    acc = acc * xv + inner;
  }
  return acc;
}

Jet2 Jet2::dx() const {
  Jet2 out(std::max(degree_ - 1, 0));
  for (int d = 1; d <= degree_; ++d) {
    for (int j = 0; j < d; ++j) {
      const int i = d - j;
      out.coeffs_[index(i - 1, j)] = i * (*this)(i, j);
    }
  }
  return out;
}

Jet2 Jet2::dy() const {
  Jet2 out(std::max(degree_ - 1, 0));
  for (int d = 1; d <= degree_; ++d) {
    for (int j = 1; j <= d; ++j) {
      const int i = d - j;
      out.coeffs_[index(i, j - 1)] = j * (*this)(i, j);
    }
  }
  return out;
}

int Jet2::order(double tol) const {
  for (int d = 0; d <= degree_; ++d) {
    for (int j = 0; j <= d; ++j) {
      if (std::abs((*this)(d - j, j)) > tol) return d;
    }
  }
  return degree_ + 1;
}

double Jet2::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

int Jet2::effective_degree() const {
  for (int d = degree_; d >= 0; --d) {
    for (int j = 0; j <= d; ++j) {
      if ((*this)(d - j, j) != 0.0) return d;
    }
  }
  return -1;
}

Jet2& Jet2::operator+=(const Jet2& other) {
  require_same(degree_, other.degree_, "add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& other) {
  require_same(degree_, other.degree_, "sub");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

Jet2& Jet2::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
Jet2 operator-(Jet2 a) { return a *= -1.0; }
Jet2 operator*(Jet2 a, double s) { return a *= s; }
Jet2 operator*(double s, Jet2 a) { return a *= s; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
  require_same(a.degree(), b.degree(), "mul");
  const int deg = a.degree();
  Jet2 out(deg);
  const int oa = a.order(), ob = b.order();
  for (int da = oa; da <= deg; ++da) {
    for (int ja = 0; ja <= da; ++ja) {
      const double ca = a(da - ja, ja);
      if (ca == 0.0) continue;
      for (int db = ob; da + db <= deg; ++db) {
        for (int jb = 0; jb <= db; ++jb) {
          const double cb = b(db - jb, jb);
          if (cb == 0.0) continue;
          out.at(da - ja + db - jb, ja + jb) += ca * cb;
        }
      }
    }
  }
  return out;
}

bool operator==(const Jet2& a, const Jet2& b) {
  return a.degree() == b.degree() && std::ranges::equal(a.coeffs(), b.coeffs());
}

namespace {

// Shared Horner evaluation of a bivariate jet on inner jets of type J.
template <class J>
J horner2(const Jet2& outer, const J& ix, const J& iy, int degree) {
  const int top = std::min(outer.degree(), degree);
  J acc(degree);
  for (int i = top; i >= 0; --i) {
    J column(degree);
    for (int j = top - i; j >= 0; --j) {
      column = column * iy;
      J c(degree);
      if constexpr (std::is_same_v<J, Jet1>) {
        c.at(0) = outer(i, j);
      } else {
        c.at(0, 0) = outer(i, j);
      }
      column += c;
    }
    acc = acc * ix + column;
  }
  return acc;
}

}  // namespace

Jet1 compose(const Jet2& outer, const Jet1& inner_x, const Jet1& inner_y) {
  require_same(inner_x.degree(), inner_y.degree(), "compose2");
  if (inner_x[0] != 0.0 || inner_y[0] != 0.0) {
    fail(ErrorKind::Argument, "compose2: inner jets must have zero constant terms");
  }
  return horner2(outer, inner_x, inner_y, inner_x.degree());
}

Jet2 compose(const Jet2& outer, const Jet2& inner_x, const Jet2& inner_y) {
  require_same(inner_x.degree(), inner_y.degree(), "compose2");
  if (inner_x(0, 0) != 0.0 || inner_y(0, 0) != 0.0) {
    fail(ErrorKind::Argument, "compose2: inner jets must have zero constant terms");
  }
  return horner2(outer, inner_x, inner_y, inner_x.degree());
}

Jet2Pair Jet2Pair::identity(int degree) { return {Jet2::x(degree), Jet2::y(degree)}; }

Jet2Pair compose(const Jet2Pair& outer, const Jet2Pair& inner) {
  return {compose(outer.x, inner.x, inner.y), compose(outer.y, inner.x, inner.y)};
}

Jet2Pair invert_in_y(const Jet2& h) {
  const int d = h.degree();
  if (h.order() < 2) fail(ErrorKind::Argument, "invert_in_y: h must have order >= 2");
  const Jet2 xs = Jet2::x(d);
  const Jet2 ys = Jet2::y(d);
  Jet2 yi = ys;
  // Each pass fixes at least one more total degree; d passes reach degree d.
  for (int m = 0; m < d; ++m) {
    Jet2 next = ys - compose(h, xs, yi);
    if (next == yi) break;
    yi = std::move(next);
  }
  return {xs, yi};
}

}  // namespace paramfold
