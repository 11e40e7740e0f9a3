#include <doctest.h>

#include "jet_properties.hpp"
#include "paramfold/error.hpp"

using namespace paramfold;
using testing::rel_diff;

namespace {

Jet1 poly(int degree, std::initializer_list<double> c) {
  Jet1 j(degree);
  int i = 0;
  for (double v : c) j.at(i++) = v;
  return j;
}

}  // namespace

TEST_CASE("jet1 add and mul examples") {
  CHECK(poly(1, {1, 1}) + poly(1, {1, -1}) == poly(1, {2, 0}));
  const Jet1 a = poly(3, {0, 0.5, -2, 1});
  CHECK(Jet1(3) + a == a);
  CHECK(Jet1::monomial(3, 2) + Jet1::monomial(3, 3) == poly(3, {0, 0, 1, 1}));
  CHECK(poly(2, {1, 1}) * poly(2, {1, -1}) == poly(2, {1, 0, -1}));
  CHECK(Jet1::monomial(5, 5) * Jet1::identity(5) == Jet1(5));
  CHECK_THROWS_AS(Jet1(2) + Jet1(3), Error);
  CHECK_THROWS_AS(Jet1(2) * Jet1(3), Error);
}

TEST_CASE("jet2 mul example") {
  const Jet2 s = Jet2::x(2) + Jet2::y(2);
  const Jet2 sq = s * s;
  CHECK(sq(2, 0) == 1.0);
  CHECK(sq(1, 1) == 2.0);
  CHECK(sq(0, 2) == 1.0);
  CHECK(rel_diff(sq, Jet2::monomial(2, 2, 0) + Jet2::monomial(2, 1, 1, 2.0) + Jet2::monomial(2, 0, 2)) == 0.0);
}

TEST_CASE("graded lexicographic layout") {
  CHECK(Jet2::index(0, 0) == 0);
  CHECK(Jet2::index(1, 0) == 1);
  CHECK(Jet2::index(0, 1) == 2);
  CHECK(Jet2::index(2, 0) == 3);
  CHECK(Jet2::index(1, 1) == 4);
  CHECK(Jet2::index(0, 2) == 5);
  CHECK(Jet2::index(3, 0) == 6);
  CHECK(Jet2::size_for(3) == 10);
}

TEST_CASE("compose1 examples") {
  const Jet1 r = poly(4, {0, 1, -0.5});
  CHECK(compose(Jet1::identity(4), r) == r);
  // Oracle: sympy expansion in tests/oracles/derive_values.py.
  CHECK(rel_diff(compose(Jet1::monomial(4, 2), r), poly(4, {0, 0, 1, -1, 0.25})) == 0.0);
  const Jet1 r5 = poly(5, {0, 1, -0.5});
  CHECK(rel_diff(compose(Jet1::monomial(5, 3), r5), poly(5, {0, 0, 0, 1, -1.5, 0.75})) == 0.0);
  CHECK_THROWS_AS(compose(Jet1::identity(3), poly(3, {1, 1})), Error);
}

TEST_CASE("compose2 examples") {
  const Jet1 ix = poly(6, {0, 0.3, 1, -2}), iy = poly(6, {0, 0, 0.5});
  CHECK(compose(Jet2::x(6), ix, iy) == ix);
  CHECK(compose(Jet2::monomial(6, 2, 0), Jet1::monomial(6, 2), iy) == Jet1::monomial(6, 4));
  CHECK(compose(Jet2::monomial(6, 1, 1), Jet1::monomial(6, 2), Jet1::monomial(6, 3, -1.0)) ==
        Jet1::monomial(6, 5, -1.0));
  CHECK_THROWS_AS(compose(Jet2::x(3), poly(3, {1, 1}), Jet1::identity(3)), Error);
}

TEST_CASE("invert_in_y examples") {
  const auto id = invert_in_y(Jet2(4));
  CHECK(id.x == Jet2::x(4));
  CHECK(id.y == Jet2::y(4));
  const auto inv = invert_in_y(Jet2::monomial(3, 1, 1));
  // Oracle: two fixed-point rounds by hand, y - xy + x^2 y.
  Jet2 expect = Jet2::y(3) - Jet2::monomial(3, 1, 1) + Jet2::monomial(3, 2, 1);
  CHECK(rel_diff(inv.y, expect) == 0.0);
  CHECK_THROWS_AS(invert_in_y(Jet2::x(3)), Error);
}

TEST_CASE("evaluation and derivatives") {
  const Jet1 a = poly(3, {1, 2, 3, 4});
  CHECK(a.eval(0.5) == doctest::Approx(1 + 1 + 0.75 + 0.5).epsilon(1e-15));
  CHECK(a.derivative() == poly(2, {2, 6, 12}));
  CHECK(a.order() == 0);
  CHECK(poly(3, {0, 0, 1e-20, 2}).order(1e-15) == 3);
  const Jet2 f = Jet2::monomial(4, 2, 1, 3.0);
  CHECK(f.dx()(1, 1) == 6.0);
  CHECK(f.dy()(2, 0) == 3.0);
  CHECK(f.eval(2.0, 0.5) == 6.0);
  CHECK(f.effective_degree() == 3);
}

TEST_CASE("randomized ring, composition and inversion laws") {
  const auto errors = testing::jet_law_errors(1000, 12345);
  for (const auto& [law, e] : errors) {
    INFO(law);
    CHECK(e <= 1e-12);
  }
}
