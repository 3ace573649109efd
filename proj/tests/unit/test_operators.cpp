#include "doctest.h"
#include "support.hpp"

using namespace hvtest;

namespace {

void require_equal(const Operator& f, const Operator& g, int level) {
  auto r = equal_up_to(f, g, level);
  if (!r.equal) {
    const auto& m = *f.model();
    MESSAGE("witness " << r.mismatch->witness.str(m) << "\n lhs " << r.mismatch->lhs.str(m) << "\n rhs "
                       << r.mismatch->rhs.str(m));
  }
  CHECK(r.equal);
}

}  // namespace

TEST_CASE("heisenberg generators") {
  auto p2 = builtin_model("p2");
  auto h = cls(p2, "h");
  CHECK(q(0, h).is_zero_node());
  CHECK(q(1, h).apply(vac()) == word(p2, {{1, "h"}}));
  CHECK((q(-1, h) * q(1, h)).apply(vac()) == Rational(-1) * vac());
  CHECK(q(2, h).bidegree() == Bidegree{2, 4});
  require_equal(commutator(q(1, h), q(1, h)), zero_operator(p2), 3);
  require_equal(commutator(q(2, cls(p2, "one")), q(-2, cls(p2, "x"))), Rational(2) * identity(p2), 3);
  CHECK_FALSE(equal_up_to(q(1, h), q(2, h), 2).equal);
  CHECK(equal_up_to(q(1, h), q(2, h), 2).mismatch->witness.is_vacuum());
}

TEST_CASE("virasoro generators") {
  auto p2 = builtin_model("p2");
  auto x = cls(p2, "x");
  auto one = cls(p2, "one");
  CHECK(virasoro(0, one).apply(word(p2, {{3, "h"}})) == Rational(-3) * word(p2, {{3, "h"}}));
  CHECK(virasoro(1, cls(p2, "h")).apply(vac()).is_zero());
  CHECK(virasoro(2, x).apply(vac()) == word(p2, {{1, "x"}, {1, "x"}}, Rational(1, 2)));
  require_equal(commutator(virasoro(1, cls(p2, "h")), q(1, cls(p2, "h"))), Rational(-1) * q(2, x), 3);
}

TEST_CASE("W generators reduce to q and L") {
  for (const auto& name : {"p2", "torus"}) {
    auto m = builtin_model(name);
    const int level = std::string(name) == "torus" ? 2 : 3;
    for (Label a = 0; a < m->dim(); ++a) {
      auto alpha = m->basis_class(a);
      for (int n = -2; n <= 2; ++n) {
        CAPTURE(name);
        CAPTURE(n);
        CAPTURE(m->label(a));
        require_equal(w(1, n, alpha), q(n, alpha), level);
        require_equal(w(2, n, alpha), virasoro(n, alpha), level);
      }
    }
  }
  auto p2 = builtin_model("p2");
  CHECK(w(3, 0, cls(p2, "one")).apply(vac()).is_zero());
  CHECK_THROWS_AS(w(0, 1, cls(p2, "one")), UsageError);
}

TEST_CASE("boundary operator") {
  auto p2 = builtin_model("p2");
  auto d = boundary(p2);
  CHECK(d.apply(vac()).is_zero());
  CHECK(d.apply(word(p2, {{1, "h"}})).is_zero());
  FockVector expect = word(p2, {{1, "one"}, {1, "x"}}, 2) + word(p2, {{1, "h"}, {1, "h"}}) -
                      Rational(3) * word(p2, {{2, "h"}});
  CHECK(d.apply(word(p2, {{2, "one"}})) == expect);
  require_equal(derive(identity(p2)), zero_operator(p2), 3);
  for (Label a = 0; a < p2->dim(); ++a) {
    auto alpha = p2->basis_class(a);
    require_equal(derive(q(1, alpha)), virasoro(1, alpha), 3);
    require_equal(derive(q(-1, alpha)), Rational(-1) * virasoro(-1, alpha), 3);
  }
}

TEST_CASE("boundary on the torus is -W(3,0,1)") {
  auto t = builtin_model("torus");
  require_equal(boundary(t), Rational(-1) * w(3, 0, cls(t, "one")), 3);
}

TEST_CASE("normal ordering") {
  auto p2 = builtin_model("p2");
  const Label h = p2->index("h");
  NormalWord already(p2);
  already.add({{1, h}, {-1, h}}, 1);
  CHECK(normal_order_word({{1, h}, {-1, h}}, p2) == already);
  NormalWord expect = already;
  expect.add({}, -1);
  CHECK(normal_order_word({{-1, h}, {1, h}}, p2) == expect);
  CHECK(leading_term(expect) == already);
  CHECK(leading_term(NormalWord(p2)).is_zero());

  auto t = builtin_model("torus");
  const Label e1 = t->index("e1");
  const Label e2 = t->index("e2");
  NormalWord swapped(t);
  swapped.add({{1, e2}, {-1, e1}}, -1);
  CHECK(normal_order_word({{-1, e1}, {1, e2}}, t) == swapped);

  // A normal word acts like the composition it came from.
  Operator composed = q(-1, cls(p2, "h")) * q(1, cls(p2, "h")) * q(-2, cls(p2, "one"));
  NormalWord nw = normal_order_word({{-1, h}, {1, h}, {-2, p2->index("one")}}, p2);
  require_equal(words(nw), composed, 4);
}

TEST_CASE("adjoint rules") {
  auto p2 = builtin_model("p2");
  auto h = cls(p2, "h");
  require_equal(adjoint(q(3, h)), Rational(-1) * q(-3, h), 4);
  CHECK(adjoint(identity(p2)).kind() == Operator::Kind::Identity);
  CHECK_THROWS_AS(adjoint(custom(p2, [](const Monomial&, const Rational&, FockAccumulator&) {}, Bidegree{}, false, "f")),
                  UnsupportedExpression);

  auto t = builtin_model("torus");
  Operator f = q(1, cls(t, "e1")) * q(1, cls(t, "e2"));
  Operator g = Rational(-1) * q(-1, cls(t, "e2")) * q(-1, cls(t, "e1"));
  require_equal(adjoint(f), g, 3);
}

TEST_CASE("mixed parity is rejected by the bracket") {
  auto t = builtin_model("torus");
  Operator mixed = q(1, cls(t, "e1")) + q(1, cls(t, "one"));
  CHECK_THROWS_AS(commutator(mixed, q(1, cls(t, "e2"))), UsageError);
  CHECK_THROWS_AS(commutator(q(1, cls(t, "e1") + cls(t, "one")), q(1, cls(t, "e2"))), UsageError);
}

TEST_CASE("parallel and serial comparison agree") {
  auto p2 = builtin_model("p2");
  Operator f = boundary(p2) * q(1, cls(p2, "h"));
  Operator g = q(1, cls(p2, "h")) * boundary(p2);
  auto a = equal_up_to(f, g, 4);
  auto b = equal_up_to_serial(f, g, 4);
  CHECK(a.equal == b.equal);
  REQUIRE(a.mismatch);
  REQUIRE(b.mismatch);
  CHECK(a.mismatch->witness == b.mismatch->witness);
  CHECK(a.mismatch->lhs == b.mismatch->lhs);
  auto dom = basis_up_to(4, *p2);
  CHECK(images(f, dom) == images_serial(f, dom));
}
