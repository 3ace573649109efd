#include "hv/expr.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace hv {

namespace {

std::string join_expected(const std::vector<std::string>& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i > 0) s += i + 1 == e.size() ? " or " : ", ";
    s += e[i];
  }
  return s;
}

std::vector<std::string> distinct(const std::vector<std::string>& v) {
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

enum class Tok { Int, Ident, Sym, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t pos;  // 1-based
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, std::string(s.substr(i, j - i)), i + 1});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), i + 1});
      i = j;
    } else if (std::string_view("()[],+-*/").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), i + 1});
      ++i;
    } else {
      throw ParseError(i + 1, {}, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size() + 1});
  return out;
}

const std::vector<std::string> kAtomStart = {"number", "'q'", "'L'", "'W'", "'d'", "'['", "'('", "'adj'", "'D'"};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  const Token& peek() const { return toks_[i_]; }
  bool at_sym(const char* s) const { return peek().type == Tok::Sym && peek().text == s; }
  bool at_ident(const char* s) const { return peek().type == Tok::Ident && peek().text == s; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    expected = distinct(expected);
    const Token& t = peek();
    const std::string got = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.pos, expected, "expected " + join_expected(expected) + ", got " + got);
  }

  const Token& expect_sym(const char* s) {
    if (!at_sym(s)) fail({std::string("'") + s + "'"});
    return toks_[i_++];
  }

  void expect_end() {
    if (peek().type != Tok::End) fail({"'+'", "'-'", "'*'", "end of input"});
  }

  std::int64_t integer() {
    if (peek().type != Tok::Int) fail({"integer"});
    const Token& t = toks_[i_];
    if (t.text.size() > 18) throw ParseError(t.pos, {}, "integer too large");
    ++i_;
    return std::stoll(t.text);
  }

  Rational rational() {
    const std::size_t pos = peek().pos;
    const std::int64_t p = integer();
    if (!at_sym("/")) return Rational(p);
    ++i_;
    const std::int64_t q = integer();
    if (q == 0) throw ParseError(pos, {}, "zero denominator");
    return Rational(p, q);
  }

  ExprPtr expr() {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Sum;
    e->position = peek().pos;
    bool neg = false;
    if (at_sym("-")) {
      neg = true;
      ++i_;
    }
    e->children.push_back(prod());
    e->minus.push_back(neg);
    while (at_sym("+") || at_sym("-")) {
      e->minus.push_back(at_sym("-"));
      ++i_;
      e->children.push_back(prod());
    }
    if (e->children.size() == 1 && !e->minus[0]) return e->children[0];
    return e;
  }

  ExprPtr prod() {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Product;
    e->position = peek().pos;
    auto push = [&](ExprPtr a) {
      if (a->kind == Expr::Kind::Product) {
        e->children.insert(e->children.end(), a->children.begin(), a->children.end());
      } else {
        e->children.push_back(std::move(a));
      }
    };
    push(atom());
    while (at_sym("*")) {
      ++i_;
      push(atom());
    }
    if (e->children.size() == 1) return e->children[0];
    return e;
  }

  ExprPtr unary(Expr::Kind kind) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->position = toks_[i_++].pos;
    expect_sym("(");
    e->children.push_back(expr());
    expect_sym(")");
    return e;
  }

  ExprPtr generator(Expr::Kind kind) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    const Token& head = toks_[i_++];
    e->position = head.pos;
    expect_sym("(");
    struct Arg {
      bool is_int;
      std::int64_t n;
      std::string label;
      std::size_t pos;
    };
    std::vector<Arg> args;
    while (true) {
      const Token& t = peek();
      if (t.type == Tok::Ident) {
        args.push_back({false, 0, t.text, t.pos});
        ++i_;
      } else if (t.type == Tok::Int || (t.type == Tok::Sym && t.text == "-")) {
        bool neg = at_sym("-");
        if (neg) ++i_;
        std::int64_t n = integer();
        args.push_back({true, neg ? -n : n, "", t.pos});
      } else {
        fail({"integer", "label"});
      }
      if (at_sym(")")) {
        ++i_;
        break;
      }
      if (!at_sym(",")) fail({"','", "')'"});
      ++i_;
    }
    const std::size_t ints = kind == Expr::Kind::W ? 2 : 1;
    const std::string shape = kind == Expr::Kind::W ? "W(INT,INT,LABEL)" : head.text + "(INT,LABEL)";
    if (args.size() != ints + 1) throw ParseError(head.pos, {}, head.text + " takes arguments " + shape);
    for (std::size_t a = 0; a < args.size(); ++a) {
      const bool want_int = a < ints;
      if (args[a].is_int != want_int) {
        throw ParseError(args[a].pos, {want_int ? "integer" : "label"},
                         std::string("expected ") + (want_int ? "integer" : "label") + " in " + shape);
      }
      if (want_int) {
        if (args[a].n < -10000 || args[a].n > 10000) throw ParseError(args[a].pos, {}, "index out of range");
        e->ints.push_back(static_cast<int>(args[a].n));
      } else {
        e->label = args[a].label;
        e->label_position = args[a].pos;
      }
    }
    return e;
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.type == Tok::Int) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Number;
      e->position = t.pos;
      e->value = rational();
      return e;
    }
    if (t.type == Tok::Sym && t.text == "(") {
      ++i_;
      ExprPtr inner = expr();
      expect_sym(")");
      return inner;
    }
    if (t.type == Tok::Sym && t.text == "[") {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Bracket;
      e->position = t.pos;
      ++i_;
      e->children.push_back(expr());
      expect_sym(",");
      e->children.push_back(expr());
      expect_sym("]");
      return e;
    }
    if (t.type == Tok::Ident) {
      if (t.text == "q") return generator(Expr::Kind::Q);
      if (t.text == "L") return generator(Expr::Kind::L);
      if (t.text == "W") return generator(Expr::Kind::W);
      if (t.text == "adj") return unary(Expr::Kind::Adj);
      if (t.text == "D") return unary(Expr::Kind::Derive);
      if (t.text == "d") {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::D0;
        e->position = t.pos;
        ++i_;
        return e;
      }
    }
    fail(kAtomStart);
  }

  // state := '0' | sterm (('+'|'-') sterm)*
  FockVector state(const SurfaceModel& m) {
    if (peek().type == Tok::Int && peek().text == "0" && toks_[i_ + 1].type == Tok::End) return {};
    FockAccumulator acc;
    bool neg = false;
    if (at_sym("-")) {
      neg = true;
      ++i_;
    }
    state_term(m, neg, acc);
    while (at_sym("+") || at_sym("-")) {
      neg = at_sym("-");
      ++i_;
      state_term(m, neg, acc);
    }
    if (peek().type != Tok::End) fail({"'+'", "'-'", "end of input"});
    return acc.finish();
  }

  void state_term(const SurfaceModel& m, bool neg, FockAccumulator& acc) {
    Rational c = 1;
    if (peek().type == Tok::Int) {
      c = rational();
      expect_sym("*");
    }
    std::vector<Part> word;
    while (!at_ident("vac")) {
      if (!at_ident("q")) fail({"'q'", "'vac'"});
      ++i_;
      expect_sym("(");
      const std::size_t npos = peek().pos;
      bool minus = false;
      if (at_sym("-")) {
        minus = true;
        ++i_;
      }
      std::int64_t n = integer();
      if (minus) n = -n;
      if (n <= 0 || n > 10000) throw ParseError(npos, {}, "creation index must be in 1..10000");
      expect_sym(",");
      if (peek().type != Tok::Ident) fail({"label"});
      const Token& lt = toks_[i_++];
      auto l = m.find(lt.text);
      if (!l) throw ParseError(lt.pos, {}, "unknown label '" + lt.text + "'");
      expect_sym(")");
      expect_sym("*");
      word.push_back(Part{static_cast<std::int16_t>(n), *l});
    }
    ++i_;
    auto [sign, mono] = normalize(word, m);
    if (sign == 0) return;
    acc.add(std::move(mono), neg == (sign < 0) ? c : -c);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

std::string print_child(const Expr& e, bool in_product) {
  std::string s = print_expr(e);
  if (e.kind == Expr::Kind::Sum || (in_product && e.kind == Expr::Kind::Product)) return "(" + s + ")";
  return s;
}

}  // namespace

ParseError::ParseError(std::size_t position, std::vector<std::string> expected, const std::string& message)
    : std::invalid_argument("position " + std::to_string(position) + ": " + message),
      position_(position),
      expected_(std::move(expected)) {}

ExprPtr parse_expr(std::string_view text) {
  Parser p(text);
  ExprPtr e = p.expr();
  p.expect_end();
  return e;
}

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.value.str();
    case Expr::Kind::Q:
      return "q(" + std::to_string(e.ints[0]) + "," + e.label + ")";
    case Expr::Kind::L:
      return "L(" + std::to_string(e.ints[0]) + "," + e.label + ")";
    case Expr::Kind::W:
      return "W(" + std::to_string(e.ints[0]) + "," + std::to_string(e.ints[1]) + "," + e.label + ")";
    case Expr::Kind::D0:
      return "d";
    case Expr::Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i == 0) {
          s += e.minus[0] ? "-" : "";
        } else {
          s += e.minus[i] ? " - " : " + ";
        }
        s += print_child(*e.children[i], false);
      }
      return s;
    }
    case Expr::Kind::Product: {
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) s += "*";
        s += print_child(*e.children[i], true);
      }
      return s;
    }
    case Expr::Kind::Bracket:
      return "[" + print_expr(*e.children[0]) + "," + print_expr(*e.children[1]) + "]";
    case Expr::Kind::Adj:
      return "adj(" + print_expr(*e.children[0]) + ")";
    case Expr::Kind::Derive:
      return "D(" + print_expr(*e.children[0]) + ")";
  }
  return "?";
}

bool same_expr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || !(a.value == b.value) || a.ints != b.ints || a.label != b.label || a.minus != b.minus ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_expr(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

Operator elaborate(const Expr& e, const ModelPtr& model) {
  auto cls = [&]() {
    auto l = model->find(e.label);
    if (!l) throw ParseError(e.label_position, {}, "unknown label '" + e.label + "'");
    return model->basis_class(*l);
  };
  try {
    switch (e.kind) {
      case Expr::Kind::Number:
        return scale(e.value, identity(model));
      case Expr::Kind::Q:
        return q(e.ints[0], cls());
      case Expr::Kind::L:
        return virasoro(e.ints[0], cls());
      case Expr::Kind::W:
        return w(e.ints[0], e.ints[1], cls());
      case Expr::Kind::D0:
        return boundary(model);
      case Expr::Kind::Sum: {
        std::vector<Operator> parts;
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          Operator f = elaborate(*e.children[i], model);
          parts.push_back(e.minus[i] ? scale(-1, f) : f);
        }
        return sum(parts);
      }
      case Expr::Kind::Product: {
        Operator f = elaborate(*e.children[0], model);
        for (std::size_t i = 1; i < e.children.size(); ++i) f = compose(f, elaborate(*e.children[i], model));
        return f;
      }
      case Expr::Kind::Bracket:
        return commutator(elaborate(*e.children[0], model), elaborate(*e.children[1], model));
      case Expr::Kind::Adj:
        return adjoint(elaborate(*e.children[0], model));
      case Expr::Kind::Derive:
        return derive(elaborate(*e.children[0], model));
    }
  } catch (const UsageError& err) {
    throw ParseError(e.position, {}, err.what());
  }
  throw std::logic_error("elaborate: unknown node");
}

Operator parse_operator(std::string_view text, const ModelPtr& model) { return elaborate(*parse_expr(text), model); }

FockVector parse_state(std::string_view text, const SurfaceModel& m) {
  Parser p(text);
  return p.state(m);
}

}  // namespace hv
