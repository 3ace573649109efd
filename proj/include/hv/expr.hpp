#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hv/operators.hpp"

namespace hv {

/// Syntax or elaboration error at a 1-based character position.
class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t position, std::vector<std::string> expected, const std::string& message);

  std::size_t position() const { return position_; }
  /// Tokens that would have been accepted, quoted ("','"), in grammar order;
  /// empty for elaboration errors.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Number, Q, L, W, D0, Sum, Product, Bracket, Adj, Derive };

  Kind kind;
  std::size_t position = 0;  ///< 1-based start in the source
  Rational value;            ///< Number
  std::vector<int> ints;     ///< q, L: {n}; W: {k, n}
  std::string label;         ///< q, L, W
  std::size_t label_position = 0;
  std::vector<ExprPtr> children;
  std::vector<bool> minus;  ///< Sum: per child, whether it is subtracted
};

/// Parses the operator grammar:
///   expr := sum; sum := ['-'] prod (('+'|'-') prod)*; prod := atom ('*' atom)*;
///   atom := RATIONAL | GEN | '[' expr ',' expr ']' | '(' expr ')' | 'adj' '(' expr ')' | 'D' '(' expr ')';
///   GEN := 'q' '(' INT ',' LABEL ')' | 'L' '(' INT ',' LABEL ')' | 'W' '(' INT ',' INT ',' LABEL ')' | 'd'.
ExprPtr parse_expr(std::string_view text);
/// Canonical text; parse_expr(print_expr(e)) is structurally equal to e.
std::string print_expr(const Expr& e);
/// Structural equality, ignoring positions.
bool same_expr(const Expr& a, const Expr& b);
/// Resolves labels against the model and builds the operator.
Operator elaborate(const Expr& e, const ModelPtr& model);
Operator parse_operator(std::string_view text, const ModelPtr& model);

/// Parses a state: "0" or a sum of [RATIONAL '*'] (q(n,label) '*')* 'vac'
/// terms with n > 0. Accepts everything FockVector::str() prints.
FockVector parse_state(std::string_view text, const SurfaceModel& m);

}  // namespace hv
