#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hv/expr.hpp"
#include "support.hpp"

using namespace hvtest;

namespace {

std::vector<std::string> read_lines(const std::string& name) {
  std::ifstream in(std::string(HV_FIXTURES) + "/" + name);
  REQUIRE(in);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

ParseError parse_error(const std::string& text) {
  try {
    parse_expr(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for '" << text << "'");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("parser examples") {
  auto g = parse_expr("q(1,h)");
  CHECK(g->kind == Expr::Kind::Q);
  CHECK(g->ints == std::vector<int>{1});
  CHECK(g->label == "h");

  auto b = parse_expr("[L(2,one), L(-2,one)]");
  REQUIRE(b->kind == Expr::Kind::Bracket);
  CHECK(b->children[0]->kind == Expr::Kind::L);
  CHECK(b->children[1]->kind == Expr::Kind::L);
  CHECK(b->children[1]->ints == std::vector<int>{-2});

  auto s = parse_expr("3/2*W(3,0,one)");
  REQUIRE(s->kind == Expr::Kind::Product);
  CHECK(s->children[0]->kind == Expr::Kind::Number);
  CHECK(s->children[0]->value == Rational(3, 2));
  CHECK(s->children[1]->kind == Expr::Kind::W);
  CHECK(s->children[1]->ints == std::vector<int>{3, 0});

  auto e = parse_error("q(1");
  CHECK(e.position() == 4);
  CHECK(e.expected() == std::vector<std::string>{"','", "')'"});
}

TEST_CASE("products are left associative, minus negates a term") {
  auto p = parse_expr("q(1,h)*q(1,x)*q(-1,h)");
  REQUIRE(p->kind == Expr::Kind::Product);
  CHECK(p->children.size() == 3);
  auto s = parse_expr("-q(1,h) + q(1,x) - d");
  REQUIRE(s->kind == Expr::Kind::Sum);
  CHECK(s->minus == std::vector<bool>{true, false, true});
}

TEST_CASE("valid fixtures round-trip") {
  auto p2 = builtin_model("p2");
  const auto lines = read_lines("expr_valid.txt");
  CHECK(lines.size() >= 30);
  for (const auto& text : lines) {
    CAPTURE(text);
    ExprPtr a = parse_expr(text);
    const std::string printed = print_expr(*a);
    ExprPtr b = parse_expr(printed);
    CHECK(same_expr(*a, *b));
    CHECK(print_expr(*b) == printed);
    const Operator f = elaborate(*a, p2);
    const Operator g = elaborate(*b, p2);
    CHECK(equal_up_to(f, g, 2).equal);
  }
}

TEST_CASE("malformed fixtures report positions") {
  const auto lines = read_lines("expr_malformed.txt");
  CHECK(lines.size() >= 10);
  for (const auto& line : lines) {
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string text = line.substr(0, tab);
    const std::size_t pos = std::stoul(line.substr(tab + 1));
    CAPTURE(text);
    CHECK(parse_error(text).position() == pos);
  }
}

TEST_CASE("elaboration errors carry positions") {
  auto p2 = builtin_model("p2");
  try {
    parse_operator("q(1,h) + q(1,zz)", p2);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 14);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_operator("W(0,0,h)", p2), ParseError);
  CHECK_THROWS_AS(parse_operator("q(1,h,x)", p2), ParseError);
  CHECK_THROWS_AS(parse_operator("q(h,1)", p2), ParseError);
}

TEST_CASE("printed operators parse back to the same operator") {
  auto torus = builtin_model("torus");
  const std::vector<Operator> ops = {
      q(2, cls(torus, "e1")) + scale(Rational(-1, 2), q(-1, cls(torus, "e12"))),
      commutator(virasoro(1, cls(torus, "e1")), q(-1, cls(torus, "e2"))),
      scale(3, w(3, 0, cls(torus, "one"))),
      derive(q(1, cls(torus, "e3"))),
      q(1, cls(torus, "e1") + cls(torus, "e2")) * q(-1, cls(torus, "e34")),
  };
  for (const auto& f : ops) {
    CAPTURE(f.str());
    CHECK(equal_up_to(parse_operator(f.str(), torus), f, 2).equal);
  }
}

TEST_CASE("states") {
  auto p2 = builtin_model("p2");
  CHECK(parse_state("vac", *p2) == vac());
  CHECK(parse_state("0", *p2).is_zero());
  CHECK(parse_state("q(1,h)*q(2,x)*vac", *p2) == word(p2, {{2, "x"}, {1, "h"}}));
  CHECK(parse_state("-3*q(2,h)*vac + 1/2*q(1,x)*q(1,x)*vac", *p2) ==
        word(p2, {{2, "h"}}, -3) + word(p2, {{1, "x"}, {1, "x"}}, Rational(1, 2)));
  CHECK(parse_state("q(1,h)*vac - q(1,h)*vac", *p2).is_zero());

  auto torus = builtin_model("torus");
  CHECK(parse_state("q(1,e2)*q(1,e1)*vac", *torus) == word(torus, {{1, "e2"}, {1, "e1"}}));
  CHECK(parse_state("q(1,e2)*q(1,e1)*vac", *torus) == Rational(-1) * parse_state("q(1,e1)*q(1,e2)*vac", *torus));
  CHECK(parse_state("q(1,e1)*q(1,e1)*vac", *torus).is_zero());

  auto err = [&](const std::string& s) -> std::size_t {
    try {
      parse_state(s, *p2);
    } catch (const ParseError& e) {
      return e.position();
    }
    return 0;
  };
  CHECK(err("q(0,h)*vac") == 3);
  CHECK(err("q(1,h)") == 7);
  CHECK(err("q(1,y)*vac") == 5);
  CHECK(err("vac +") == 6);
}

TEST_CASE("printed vectors parse back") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    CAPTURE(name);
    const Operator d = boundary(m);
    for (const auto& u : basis_up_to(3, *m)) {
      const FockVector v = d.apply(u) + virasoro(-1, m->basis_class(0)).apply(u) + FockVector::of(u, Rational(-2, 7));
      CHECK(parse_state(v.str(*m), *m) == v);
    }
  }
}
