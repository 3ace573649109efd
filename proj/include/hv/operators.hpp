#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hv/fock.hpp"
#include "hv/frobenius.hpp"

namespace hv {

/// Raised by adjoint() on an operator built from an opaque action.
class UnsupportedExpression : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// q_n(e_label) with n of either sign; an element of a Heisenberg word.
struct Symbol {
  int n = 0;
  Label label = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};
using Word = std::vector<Symbol>;

/// Rational combination of normally ordered Heisenberg words (negative indices
/// to the right). Within each block the symbols are sorted, with Koszul signs.
class NormalWord {
 public:
  explicit NormalWord(ModelPtr model) : model_(std::move(model)) {}

  const ModelPtr& model() const { return model_; }
  const std::map<Word, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Adds a word that is already normal and canonical.
  void add(const Word& w, const Rational& c);
  std::size_t max_length() const;

  friend bool operator==(const NormalWord& a, const NormalWord& b) { return a.terms_ == b.terms_; }
  std::string str() const;

 private:
  ModelPtr model_;
  std::map<Word, Rational> terms_;
};

/// Wick rewriting of a finite word into normal order.
NormalWord normal_order_word(const Word& word, const ModelPtr& model);
/// The maximal-length words.
NormalWord leading_term(const NormalWord& nw);

class Operator;
using ActionFn = std::function<void(const Monomial&, const Rational&, FockAccumulator&)>;

/// Linear endomorphism of the Fock space, stored as an expression tree over
/// the generators q, L, W, d. Immutable, cheap to copy.
class Operator {
 public:
  enum class Kind { Zero, Identity, Scaled, Sum, Compose, Bracket, Heisenberg, Virasoro, W, Boundary, Words, Custom };

  struct Node;

  Operator();  // zero operator without a model

  Kind kind() const;
  const ModelPtr& model() const;
  /// Shift (level, cohomological degree); nullopt when inhomogeneous.
  std::optional<Bidegree> bidegree() const;
  /// Parity of the cohomological shift; nullopt when mixed.
  std::optional<bool> odd() const;
  bool is_zero_node() const { return kind() == Kind::Zero; }

  FockVector apply(const FockVector& v) const;
  FockVector apply(const Monomial& u) const;
  void apply_to(const Monomial& u, const Rational& c, FockAccumulator& out) const;

  /// Expression-syntax rendering (parseable when built from basis classes).
  std::string str() const;

  const Node& node() const { return *node_; }
  /// Operands of Scaled, Sum, Compose and Bracket nodes.
  const std::vector<Operator>& children() const;
  /// Factor of a Scaled node.
  const Rational& scalar() const;
  /// Identity of the underlying node; equal for copies of one operator.
  const void* id() const { return node_.get(); }

 private:
  explicit Operator(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend struct OperatorFactory;
};

Operator zero_operator(const ModelPtr& model);
Operator identity(const ModelPtr& model);
Operator scale(const Rational& c, const Operator& f);
Operator sum(const std::vector<Operator>& fs);
Operator compose(const Operator& f, const Operator& g);
Operator operator+(const Operator& f, const Operator& g);
Operator operator-(const Operator& f, const Operator& g);
Operator operator*(const Operator& f, const Operator& g);
Operator operator*(const Rational& c, const Operator& f);

/// Heisenberg generator q_n(a); q_0 = 0.
Operator q(int n, const GradedClass& a);
/// Virasoro generator L_n(a), evaluated from the quadratic sum over q_m q_{n-m}.
Operator virasoro(int n, const GradedClass& a);
/// W^k_n(a): the z^{n-k} coefficient of the normally ordered k-fold vertex
/// operator of the diagonal class, divided by k!.
Operator w(int k, int n, const GradedClass& a);
/// The boundary operator d: kills the vacuum and acts on creation words by the
/// Leibniz rule with q'_n(b) = n L_n(b) + n(n-1)/2 q_n(K b), n > 0.
Operator boundary(const ModelPtr& model);
Operator words(const NormalWord& nw);
Operator custom(const ModelPtr& model, ActionFn action, std::optional<Bidegree> bideg, std::optional<bool> odd,
                std::string name);

/// Superbracket f g - (-1)^{|f||g|} g f. Throws UsageError when a parity is mixed.
Operator commutator(const Operator& f, const Operator& g);
/// [d, f].
Operator derive(const Operator& f);
/// k-th derivative.
Operator derive(const Operator& f, int k);
/// Rewrites the tree with q_n(a)^+ = (-1)^n q_{-n}(a), (fg)^+ = (-1)^{|f||g|} g^+ f^+,
/// [f,g]^+ = -[f^+, g^+], L_n^+ = (-1)^n L_{-n}, (W^k_n)^+ = (-1)^n W^k_{-n}, d^+ = d.
Operator adjoint(const Operator& f);

struct Mismatch {
  Monomial witness;
  FockVector lhs;
  FockVector rhs;
};

struct Comparison {
  bool equal = true;
  std::optional<Mismatch> mismatch;  ///< smallest failing basis monomial
  std::size_t checked = 0;
};

/// Compares f and g on every basis monomial of level <= max_level. Runs in
/// parallel (OpenMP); the reported witness is the first failing monomial in
/// canonical order, independent of scheduling.
Comparison equal_up_to(const Operator& f, const Operator& g, int max_level);
/// Single-threaded reference of equal_up_to().
Comparison equal_up_to_serial(const Operator& f, const Operator& g, int max_level);
/// Compares on an explicit list of monomials.
Comparison equal_on(const Operator& f, const Operator& g, const std::vector<Monomial>& domain);

/// Images of every monomial in `domain`, computed in parallel.
std::vector<FockVector> images(const Operator& f, const std::vector<Monomial>& domain);
std::vector<FockVector> images_serial(const Operator& f, const std::vector<Monomial>& domain);

}  // namespace hv
