#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace hvtest;

TEST_CASE("normalize") {
  auto p2 = builtin_model("p2");
  auto [s1, m1] = normalize({{1, "h"}, {2, "h"}}, *p2);
  CHECK(s1 == 1);
  CHECK(m1.str(*p2) == "q(2,h)*q(1,h)*vac");

  auto t = builtin_model("torus");
  CHECK(normalize({{1, "e1"}, {1, "e1"}}, *t).first == 0);
  auto [s3, m3] = normalize({{1, "e2"}, {1, "e1"}}, *t);
  CHECK(s3 == -1);
  CHECK(m3.str(*t) == "q(1,e1)*q(1,e2)*vac");
  CHECK_THROWS_AS(normalize({{1, "nope"}}, *t), UsageError);
}

TEST_CASE("create and annihilate") {
  auto p2 = builtin_model("p2");
  CHECK(create(1, cls(p2, "h"), vac()) == word(p2, {{1, "h"}}));
  CHECK(create(2, cls(p2, "h") + cls(p2, "x"), vac()) == word(p2, {{2, "h"}}) + word(p2, {{2, "x"}}));
  CHECK(annihilate(2, cls(p2, "h"), vac()).is_zero());
  CHECK(annihilate(1, cls(p2, "h"), word(p2, {{1, "h"}})) == Rational(-1) * vac());
  CHECK(annihilate(1, cls(p2, "h"), word(p2, {{1, "h"}, {1, "x"}})) == Rational(-1) * word(p2, {{1, "x"}}));

  auto t = builtin_model("torus");
  CHECK(create(1, cls(t, "e1"), word(t, {{1, "e1"}})).is_zero());
  CHECK(annihilate(1, cls(t, "e34"), word(t, {{1, "e1"}, {1, "e12"}})) == Rational(-1) * word(t, {{1, "e1"}}));
  // e234 * e1 = -pt, and the contraction carries -n = -1.
  CHECK(annihilate(1, cls(t, "e234"), word(t, {{1, "e1"}, {1, "e2"}})) == word(t, {{1, "e2"}}));
  // Passing the odd q_1(e1) first costs a sign, cancelling the -n.
  CHECK(annihilate(1, cls(t, "e134"), word(t, {{1, "e1"}, {1, "e2"}})) == word(t, {{1, "e1"}}));
}

TEST_CASE("basis sizes agree with the generating function") {
  const std::vector<std::pair<std::string, std::vector<std::size_t>>> known = {
      {"p2", {1, 3, 9, 22, 51, 108}}, {"p1xp1", {1, 4, 14, 40, 105, 252}}, {"torus", {1, 16, 144, 960, 5264}}};
  for (const auto& [name, dims] : known) {
    auto m = builtin_model(name);
    const int top = static_cast<int>(dims.size()) - 1;
    auto gf = generating_function_betti(*m, top);
    for (int l = 0; l <= top; ++l) {
      CAPTURE(name);
      CAPTURE(l);
      auto b = basis(l, *m);
      CHECK(b.size() == dims[static_cast<std::size_t>(l)]);
      CHECK(std::is_sorted(b.begin(), b.end()));
      auto p = poincare(l, *m);
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == gf[static_cast<std::size_t>(l)][i]);
    }
  }
  auto p2 = builtin_model("p2");
  CHECK(poincare(0, *p2) == std::vector<std::int64_t>{1});
  CHECK(poincare(1, *p2) == std::vector<std::int64_t>{1, 0, 1, 0, 1});
  CHECK(poincare(2, *p2) == std::vector<std::int64_t>{1, 0, 2, 0, 3, 0, 2, 0, 1});
}

TEST_CASE("pairing") {
  auto p2 = builtin_model("p2");
  CHECK(pair_fock(vac(), vac(), *p2) == Rational(1));
  CHECK(pair_fock(word(p2, {{1, "h"}}), word(p2, {{1, "h"}}), *p2) == Rational(1));
  CHECK(pair_fock(word(p2, {{2, "one"}}), word(p2, {{1, "x"}, {1, "x"}}), *p2) == Rational(0));
  CHECK(pair_fock(word(p2, {{2, "one"}}), word(p2, {{2, "x"}}), *p2) == Rational(-2));
}

TEST_CASE("pairing is supersymmetric") {
  for (const auto& name : {"p2", "torus"}) {
    auto m = builtin_model(name);
    auto b = basis_up_to(2, *m);
    for (const auto& u : b) {
      for (const auto& v : b) {
        const int s = (u.odd(*m) && v.odd(*m)) ? -1 : 1;
        CHECK(pair_fock(u, FockVector::of(v), *m) == Rational(s) * pair_fock(v, FockVector::of(u), *m));
      }
    }
  }
}

TEST_CASE("printing") {
  auto p2 = builtin_model("p2");
  CHECK(FockVector{}.str(*p2) == "0");
  CHECK((Rational(-1) * vac()).str(*p2) == "-1*vac");
  FockVector v = word(p2, {{1, "x"}, {1, "x"}}, Rational(1, 2)) - Rational(3) * word(p2, {{2, "h"}});
  CHECK(v.str(*p2) == "-3*q(2,h)*vac + 1/2*q(1,x)*q(1,x)*vac");
}
