#include "doctest.h"
#include "support.hpp"

using namespace hvtest;

TEST_CASE("builtin models validate") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    auto rep = validate_model(*m);
    CAPTURE(name);
    CHECK(rep.ok());
    CHECK(rep.checks.size() == 7);
  }
}

TEST_CASE("p2 with h*h = 0 fails nondegeneracy") {
  auto spec = builtin_model_spec("p2");
  for (auto& p : spec.products) {
    if (p.left == "h" && p.right == "h") p.result.clear();
  }
  auto m = SurfaceModel::build(spec);
  auto rep = validate_model(*m);
  CHECK_FALSE(rep.ok());
  for (const auto& c : rep.checks) {
    if (c.invariant == "nondegeneracy") {
      CHECK_FALSE(c.pass);
      CHECK(c.witness == std::vector<std::string>{"h"});
    } else {
      CHECK(c.pass);
    }
  }
}

TEST_CASE("schema errors name the field") {
  auto spec = builtin_model_spec("p2");
  spec.basis.push_back({"h", 2});
  CHECK_THROWS_WITH_AS(SurfaceModel::build(spec), doctest::Contains("basis[3].label"), ModelError);
  spec = builtin_model_spec("p2");
  spec.unit = "";
  CHECK_THROWS_WITH_AS(SurfaceModel::build(spec), doctest::Contains("unit"), ModelError);
}

TEST_CASE("products and integrals") {
  auto p2 = builtin_model("p2");
  CHECK(mul(cls(p2, "h"), cls(p2, "h")) == cls(p2, "x"));
  CHECK(mul(cls(p2, "one"), cls(p2, "h")) == cls(p2, "h"));
  CHECK(mul(cls(p2, "x"), cls(p2, "h")).is_zero());
  CHECK(integrate(cls(p2, "x")) == Rational(1));
  CHECK(integrate(cls(p2, "h")) == Rational(0));
  CHECK(integrate(Rational(3, 2) * cls(p2, "x") + cls(p2, "h")) == Rational(3, 2));

  auto t = builtin_model("torus");
  CHECK(mul(cls(t, "e1"), cls(t, "e1")).is_zero());
  CHECK(mul(cls(t, "e1"), cls(t, "e2")) == cls(t, "e12"));
  CHECK(mul(cls(t, "e2"), cls(t, "e1")) == Rational(-1) * cls(t, "e12"));
  CHECK(integrate(mul(cls(t, "e12"), cls(t, "e34"))) == Rational(1));
}

TEST_CASE("diagonal pushforward") {
  auto p2 = builtin_model("p2");
  CHECK(diag_push(cls(p2, "h"), 1) == TensorClass::decomposable(p2, {p2->index("h")}));
  CHECK(diag_push(cls(p2, "x"), 2) == TensorClass::decomposable(p2, {p2->index("x"), p2->index("x")}));
  auto one = p2->index("one");
  auto h = p2->index("h");
  auto x = p2->index("x");
  TensorClass expect = TensorClass::decomposable(p2, {one, x}) + TensorClass::decomposable(p2, {h, h}) +
                       TensorClass::decomposable(p2, {x, one});
  CHECK(diag_push(cls(p2, "one"), 2) == expect);
  CHECK_THROWS_AS(diag_push(cls(p2, "one"), 0), UsageError);
}

namespace {

void check_pairing_identity(const ModelPtr& m, const GradedClass& a, std::size_t k) {
  TensorClass t = diag_push(a, k);
  std::vector<Label> key(k, 0);
  const auto dim = static_cast<Label>(m->dim());
  for (;;) {
    GradedClass prod = a;
    for (Label l : key) prod = mul(prod, m->basis_class(l));
    TensorClass probe = t * TensorClass::decomposable(m, key);
    CAPTURE(a.str());
    CHECK(probe.integrate() == integrate(prod));
    std::size_t i = 0;
    while (i < k && ++key[i] == dim) key[i++] = 0;
    if (i == k) break;
  }
}

}  // namespace

TEST_CASE("pairing identity of the diagonal on every model") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    for (Label a = 0; a < m->dim(); ++a) {
      check_pairing_identity(m, m->basis_class(a), 2);
      if (m->dim() <= 6) check_pairing_identity(m, m->basis_class(a), 3);
    }
  }
  auto t = builtin_model("torus");
  check_pairing_identity(t, cls(t, "e1") + Rational(2) * cls(t, "e23"), 3);
}

TEST_CASE("diagonal is supersymmetric and coassociative") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    for (Label a = 0; a < m->dim(); ++a) {
      TensorClass t = diag_push(m->basis_class(a), 2);
      CHECK(t.swapped() == t);
      CHECK(t.push_leg(0) == t.push_leg(1));
      CHECK(t.push_leg(0) == diag_push(m->basis_class(a), 3));
    }
  }
}

TEST_CASE("euler class") {
  auto p2 = builtin_model("p2");
  CHECK(euler_class(*p2) == Rational(3) * cls(p2, "x"));
  CHECK(integrate(euler_class(*p2)) == Rational(3));
  auto t = builtin_model("torus");
  CHECK(euler_class(*t).is_zero());
  auto q = builtin_model("p1xp1");
  CHECK(euler_class(*q) == Rational(4) * cls(q, "pt"));
  CHECK(integrate(euler_class(*builtin_model("evenk0"))) == Rational(4));
}
