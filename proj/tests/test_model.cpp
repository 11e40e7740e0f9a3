#include <doctest.h>

#include "paramfold/error.hpp"
#include "paramfold/io.hpp"
#include "paramfold/model.hpp"
#include "support.hpp"

using namespace paramfold;
using testing::rel_diff;

namespace {

PlanarMapSpec make_spec(double c, int r, Jet2 f1, Jet2 f2) {
  PlanarMapSpec s;
  s.name = "test";
  s.c = c;
  s.degree = r;
  s.f1 = std::move(f1);
  s.f2 = std::move(f2);
  return s;
}

Jet2 mono(int r, int i, int j, double v) { return Jet2::monomial(r, i, j, v); }

}  // namespace

TEST_CASE("already reduced map") {
  const ReducedMap rm = reduce(make_spec(1.0, 4, Jet2(4), mono(4, 2, 0, 1.0)));
  CHECK(rm.c == 1.0);
  REQUIRE(rm.k);
  CHECK(*rm.k == 2);
  CHECK(rm.a_k == 1.0);
  CHECK(!rm.l);
  CHECK(rel_diff(rm.nonlinearity(), mono(4, 2, 0, 1.0)) == 0.0);
  CHECK(rm.conj.empty());
}

TEST_CASE("shear reduction of f1 = xy, f2 = x^2") {
  const int r = 4;
  const PlanarMapSpec spec = make_spec(1.0, r, mono(r, 1, 1, 1.0), mono(r, 2, 0, 1.0));
  const ReducedMap rm = reduce(spec);
  // Oracle (sympy, tests/oracles/derive_values.py): second component minus y
  // is x^2 + x^3 + x^2 y + y^2 - x y^2 + x^2 y^2.
  Jet2 expect(r);
  expect.at(2, 0) = 1.0;
  expect.at(3, 0) = 1.0;
  expect.at(2, 1) = 1.0;
  expect.at(0, 2) = 1.0;
  expect.at(1, 2) = -1.0;
  expect.at(2, 2) = 1.0;
  CHECK(rel_diff(rm.nonlinearity(), expect) <= 1e-13);
  CHECK(rm.p[2] == doctest::Approx(1.0));
  CHECK(rm.p[3] == doctest::Approx(1.0));
  CHECK(rm.q[3] == doctest::Approx(1.0));
  REQUIRE(rm.l);
  CHECK(*rm.l == 3);

  // Jet conjugacy oracle: Phi o F = F~ o Phi through degree r,
  // Phi(x, y) = (x, y + f1/c).
  const Jet2Pair F{Jet2::x(r) + Jet2::y(r) * spec.c + spec.f1, Jet2::y(r) + spec.f2};
  const Jet2Pair phi{Jet2::x(r), Jet2::y(r) + spec.f1 * (1.0 / spec.c)};
  const Jet2Pair Ft{Jet2::x(r) + Jet2::y(r) * rm.c, Jet2::y(r) + rm.nonlinearity()};
  const Jet2Pair lhs = compose(phi, F), rhs = compose(Ft, phi);
  CHECK(rel_diff(lhs.x, rhs.x) <= 1e-13);
  CHECK(rel_diff(lhs.y, rhs.y) <= 1e-13);
}

TEST_CASE("u collects the terms divisible by y^2") {
  const int r = 5;
  Jet2 f2 = mono(r, 3, 0, 2.0) + mono(r, 1, 1, -1.0) + mono(r, 1, 2, 0.5) + mono(r, 0, 3, 0.25);
  const ReducedMap rm = reduce(make_spec(2.0, r, Jet2(r), f2));
  for (int d = 0; d <= r; ++d) {
    for (int j = 0; j < 2 && j <= d; ++j) CHECK(rm.u(d - j, j) == 0.0);
  }
  CHECK(rm.u(1, 2) == 0.5);
  CHECK(rm.u(0, 3) == 0.25);
  CHECK(rm.p[3] == 2.0);
  CHECK(rm.q[2] == -1.0);
}

TEST_CASE("negative c is conjugated by the sign flip") {
  const ReducedMap rm = reduce(make_spec(-1.0, 4, Jet2(4), mono(4, 2, 0, 1.0)));
  CHECK(rm.c == 1.0);
  CHECK(rm.a_k == -1.0);
  CHECK(rm.conj.sign_flipped());
  const Point p = rm.conj.to_working({0.3, 0.2});
  CHECK(p.y == -0.2);
  const Point q = rm.conj.to_original(p);
  CHECK(q.y == 0.2);
}

TEST_CASE("reduction is idempotent") {
  const int r = 5;
  const PlanarMapSpec spec = make_spec(1.5, r, mono(r, 1, 1, 0.7) + mono(r, 2, 0, -0.3),
                                       mono(r, 2, 0, 1.0) + mono(r, 0, 2, 0.4) + mono(r, 3, 1, 0.2));
  const ReducedMap a = reduce(spec);
  const ReducedMap b = reduce(make_spec(a.c, r, Jet2(r), a.nonlinearity()));
  CHECK(b.c == a.c);
  CHECK(rel_diff(a.nonlinearity(), b.nonlinearity()) <= 1e-13);
  CHECK(a.k == b.k);
  CHECK(a.l == b.l);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(reduce(make_spec(0.0, 4, Jet2(4), mono(4, 2, 0, 1.0))), Error);
  try {
    reduce(make_spec(0.0, 4, Jet2(4), mono(4, 2, 0, 1.0)));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Input);
    CHECK(std::string(e.what()).find("not a nilpotent parabolic block") != std::string::npos);
  }
  CHECK_THROWS_AS(reduce(make_spec(1.0, 4, mono(4, 1, 0, 1.0), mono(4, 2, 0, 1.0))), Error);
}

TEST_CASE("classification of the test maps") {
  const ReducedMap t1 = reduce(read_map_spec(testing::data_path("t1.json")));
  const ReducedMap t2 = reduce(read_map_spec(testing::data_path("t2.json")));
  const ReducedMap t3 = reduce(read_map_spec(testing::data_path("t3.json")));
  const Classification c1 = classify(t1), c2 = classify(t2), c3 = classify(t3);
  CHECK(c1.tag == CaseTag::Case1);
  CHECK(c1.N == 2);
  CHECK(c1.s == 12);
  CHECK(c2.tag == CaseTag::Case2);
  CHECK(c2.N == 2);
  CHECK(c2.s == 6);
  CHECK(c3.tag == CaseTag::Case3);
  CHECK(c3.N == 2);
  CHECK(t1.a_k == 1.5);
  CHECK(*t2.k == 3);
  CHECK(*t2.l == 2);
  CHECK(*t3.k == 4);
  CHECK(t3.b_l == -1.0);
}

TEST_CASE("degenerate map is rejected by classify") {
  const ReducedMap rm = reduce(make_spec(1.0, 4, Jet2(4), mono(4, 0, 2, 1.0)));
  CHECK(!rm.tag);
  try {
    classify(rm);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
    CHECK(std::string(e.what()).find("no nonlinear normal data") != std::string::npos);
  }
}

TEST_CASE("leading indices ignore coefficients below the threshold") {
  const ReducedMap rm = reduce(make_spec(1.0, 4, Jet2(4), mono(4, 2, 0, 1e-15) + mono(4, 3, 0, 1.0)));
  REQUIRE(rm.k);
  CHECK(*rm.k == 3);
}

TEST_CASE("hypothesis reports") {
  const ReducedMap t1 = reduce(read_map_spec(testing::data_path("t1.json")));
  const HypothesisReport h1 = check_hypotheses(t1, Branch::Stable);
  CHECK(h1.analytic_ok());
  CHECK(h1.smooth_ok());

  // Case 2 with c = 1, l = 2, a_3 = 1, b_2 = 1: beta = 4 / |1 - 3| = 2.
  const ReducedMap t2 = reduce(read_map_spec(testing::data_path("t2.json")));
  const HypothesisReport h2 = check_hypotheses(t2, Branch::Stable);
  REQUIRE(h2.beta);
  CHECK(*h2.beta == doctest::Approx(2.0).epsilon(1e-14));
  REQUIRE(h2.formal_window);
  CHECK(*h2.formal_window);
  CHECK(!h2.exceptional_constant);

  // Case 3 with b_2 = +1: stable fails, unstable passes.
  const ReducedMap t3p = reduce(make_spec(1.0, 6, Jet2(6), mono(6, 1, 1, 1.0) + mono(6, 4, 0, 1.0)));
  CHECK(!check_hypotheses(t3p, Branch::Stable).analytic_ok());
  CHECK(check_hypotheses(t3p, Branch::Unstable).analytic_ok());

  // Case 1 with r < 3k/2 fails only the smooth condition.
  const ReducedMap low = reduce(make_spec(1.0, 5, Jet2(5), mono(5, 4, 0, 1.0)));
  const HypothesisReport hl = check_hypotheses(low, Branch::Stable);
  CHECK(hl.analytic_ok());
  CHECK(!hl.smooth_ok());

  // Exceptional constant of case 2: a_k = -(2l+1)/(3l-1) b_l^2, l = 2, b = 1.
  const ReducedMap ex = reduce(make_spec(1.0, 6, Jet2(6), mono(6, 3, 0, -1.0) + mono(6, 1, 1, 1.0)));
  CHECK(check_hypotheses(ex, Branch::Stable).exceptional_constant);
}

TEST_CASE("polynomial map and jacobian") {
  const PolynomialMap F(1.0, Jet2(3), mono(3, 2, 0, 1.5));
  const Point p = F({0.1, 0.01});
  CHECK(p.x == doctest::Approx(0.11).epsilon(1e-15));
  CHECK(p.y == doctest::Approx(0.025).epsilon(1e-15));
  const auto J = F.jacobian({0.1, 0.01});
  CHECK(J[0] == 1.0);
  CHECK(J[1] == 1.0);
  CHECK(J[2] == doctest::Approx(0.3));
  CHECK(J[3] == 1.0);
}
