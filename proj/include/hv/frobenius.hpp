#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hv/rational.hpp"

namespace hv {

/// Index of a basis element of H*(X).
using Label = std::uint16_t;

/// Malformed model input. The message names the offending field.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands from different models, k = 0 for a diagonal, and similar misuse.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using LabeledCoeffs = std::vector<std::pair<std::string, Rational>>;

/// Raw description of a surface cohomology model, as read from a model file.
struct ModelSpec {
  struct BasisEntry {
    std::string label;
    int degree = 0;
  };
  struct ProductEntry {
    std::string left;
    std::string right;
    LabeledCoeffs result;
  };

  std::string name;
  std::vector<BasisEntry> basis;
  std::string unit;
  std::vector<ProductEntry> products;
  LabeledCoeffs integral;
  LabeledCoeffs canonical;
};

class GradedClass;

/// H*(X) as a finite graded algebra with an integral. Immutable once built;
/// always handled through std::shared_ptr<const SurfaceModel>.
///
/// Products are given for left <= right (in basis order); the reverse order is
/// filled in with the Koszul sign. Products whose degrees add up past 4 are
/// dropped.
class SurfaceModel : public std::enable_shared_from_this<SurfaceModel> {
 public:
  using Terms = std::vector<std::pair<Label, Rational>>;

  /// Checks the schema (labels, unit, degrees) but not the algebra axioms;
  /// see validate_model() for those.
  static std::shared_ptr<const SurfaceModel> build(const ModelSpec& spec);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return labels_.size(); }
  const std::string& label(Label i) const { return labels_[i]; }
  int degree(Label i) const { return degrees_[i]; }
  bool odd(Label i) const { return (degrees_[i] & 1) != 0; }
  std::optional<Label> find(std::string_view label) const;
  /// Throws UsageError for an unknown label.
  Label index(std::string_view label) const;
  Label unit() const { return unit_; }

  /// e_i * e_j as a sparse combination of basis elements.
  const Terms& product(Label i, Label j) const { return products_[i * dim() + j]; }
  const Rational& integral(Label i) const { return integral_[i]; }
  /// Gram entry: integral of e_i * e_j.
  const Rational& pairing(Label i, Label j) const { return gram_[i * dim() + j]; }
  /// True when the Gram matrix is invertible.
  bool nondegenerate() const { return nondegenerate_; }
  /// Dual basis w.r.t. the pairing: integral(e_i * dual(j)) = delta_ij.
  /// Throws UsageError on a degenerate model.
  const std::vector<Rational>& dual(Label j) const;

  GradedClass basis_class(Label i) const;
  GradedClass zero() const;
  GradedClass canonical_class() const;
  std::shared_ptr<const SurfaceModel> ptr() const { return shared_from_this(); }

  const ModelSpec& spec() const { return spec_; }
  /// K_X == 0.
  bool canonical_trivial() const;

 private:
  SurfaceModel() = default;

  ModelSpec spec_;
  std::string name_;
  std::vector<std::string> labels_;
  std::vector<int> degrees_;
  std::unordered_map<std::string, Label> by_label_;
  Label unit_ = 0;
  std::vector<Terms> products_;
  std::vector<Rational> integral_;
  std::vector<Rational> canonical_;
  std::vector<Rational> gram_;
  bool nondegenerate_ = false;
  std::vector<std::vector<Rational>> dual_;
};

using ModelPtr = std::shared_ptr<const SurfaceModel>;

/// Element of H*(X): rational coefficients over the model basis, possibly of
/// mixed degree.
class GradedClass {
 public:
  GradedClass(ModelPtr model, std::vector<Rational> coeffs);

  const ModelPtr& model() const { return model_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& operator[](Label i) const { return coeffs_[i]; }

  bool is_zero() const;
  /// The common degree of the nonzero components, if there is one. The zero
  /// class has no degree.
  std::optional<int> degree() const;
  /// The common parity of the nonzero components (zero class: even).
  std::optional<bool> odd() const;
  /// Degree-d part.
  GradedClass component(int d) const;
  /// Sparse view: nonzero (label, coefficient) pairs in basis order.
  std::vector<std::pair<Label, Rational>> terms() const;

  GradedClass& operator+=(const GradedClass& o);
  GradedClass& operator-=(const GradedClass& o);
  GradedClass& operator*=(const Rational& c);
  friend GradedClass operator+(GradedClass a, const GradedClass& b) { return a += b; }
  friend GradedClass operator-(GradedClass a, const GradedClass& b) { return a -= b; }
  friend GradedClass operator*(const Rational& c, GradedClass a) { return a *= c; }
  friend bool operator==(const GradedClass& a, const GradedClass& b);

  std::string str() const;

 private:
  ModelPtr model_;
  std::vector<Rational> coeffs_;
};

/// Element of H*(X^k) in the Kunneth basis e_{i1} (x) ... (x) e_{ik}.
class TensorClass {
 public:
  using Key = std::vector<Label>;

  TensorClass(ModelPtr model, std::size_t k);

  const ModelPtr& model() const { return model_; }
  std::size_t k() const { return k_; }
  const std::map<Key, Rational>& terms() const { return terms_; }
  void add(const Key& key, const Rational& c);
  bool is_zero() const { return terms_.empty(); }

  /// Koszul product (a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd.
  friend TensorClass operator*(const TensorClass& a, const TensorClass& b);
  friend TensorClass operator+(const TensorClass& a, const TensorClass& b);
  friend bool operator==(const TensorClass& a, const TensorClass& b);

  /// Decomposable tensor from basis labels.
  static TensorClass decomposable(ModelPtr model, const Key& key, Rational c = 1);
  /// Product of the factor integrals, summed.
  Rational integrate() const;
  /// For k = 2: swap the legs with the Koszul sign.
  TensorClass swapped() const;
  /// Replace leg `pos` by its diagonal pushforward into X^2, giving a
  /// (k+1)-tensor. The pushforward has even degree, so no Koszul sign arises.
  TensorClass push_leg(std::size_t pos) const;
  /// Multiply all legs together: X^k -> X pullback along the diagonal.
  GradedClass multiply_legs() const;

  std::string str() const;

 private:
  ModelPtr model_;
  std::size_t k_;
  std::map<Key, Rational> terms_;
};

GradedClass mul(const GradedClass& a, const GradedClass& b);
Rational integrate(const GradedClass& a);
/// Diagonal pushforward H*(X) -> H*(X^k), computed from dual bases.
TensorClass diag_push(const GradedClass& a, std::size_t k);
/// m(diag_push(1, 2)); stands in for c_2(X).
GradedClass euler_class(const SurfaceModel& model);

struct ModelCheck {
  std::string invariant;
  bool pass = true;
  /// Violating basis labels, e.g. the triple breaking associativity.
  std::vector<std::string> witness;
};

struct ModelReport {
  std::string model;
  std::vector<ModelCheck> checks;
  bool ok() const;
};

ModelReport validate_model(const SurfaceModel& model);

/// Names accepted after "builtin:".
const std::vector<std::string>& builtin_model_names();
ModelSpec builtin_model_spec(std::string_view name);
ModelPtr builtin_model(std::string_view name);

}  // namespace hv
