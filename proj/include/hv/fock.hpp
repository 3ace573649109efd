#pragma once

#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hv/frobenius.hpp"
#include "hv/rational.hpp"

namespace hv {

/// (level n, cohomological degree i) of H^i(X^[n]), or the shift of an operator.
struct Bidegree {
  int level = 0;
  int cohdeg = 0;
  friend bool operator==(const Bidegree&, const Bidegree&) = default;
  Bidegree operator+(const Bidegree& o) const { return {level + o.level, cohdeg + o.cohdeg}; }
  Bidegree operator-() const { return {-level, -cohdeg}; }
};

/// One creation symbol q_n(e_label), n > 0.
struct Part {
  std::int16_t n = 0;
  Label label = 0;
  friend bool operator==(const Part&, const Part&) = default;
};

/// Canonical order of creation symbols: larger n first, then smaller label.
inline bool part_before(const Part& a, const Part& b) {
  return a.n != b.n ? a.n > b.n : a.label < b.label;
}

using PartVec = boost::container::small_vector<Part, 10>;

/// Canonical creation word q_{n1}(b1) ... q_{nk}(bk)|0>: parts in canonical
/// order, no odd symbol repeated. The empty word is the vacuum.
class Monomial {
 public:
  Monomial() = default;
  /// Takes parts that are already canonical; see normalize() otherwise.
  explicit Monomial(PartVec parts) : parts_(std::move(parts)) {}

  const PartVec& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool is_vacuum() const { return parts_.empty(); }
  int level() const;
  int cohdeg(const SurfaceModel& m) const;
  /// Parity of the cohomological degree (number of odd labels mod 2).
  bool odd(const SurfaceModel& m) const;
  Bidegree bidegree(const SurfaceModel& m) const { return {level(), cohdeg(m)}; }

  /// Canonical total order: by level, then part sequence.
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.parts_ == b.parts_; }

  std::size_t hash() const;
  /// "q(2,h)*q(1,x)*vac".
  std::string str(const SurfaceModel& m) const;

 private:
  PartVec parts_;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

using Term = std::pair<Monomial, Rational>;

/// Finite rational combination of canonical monomials. Terms are kept sorted
/// in canonical order with no zero coefficients.
class FockVector {
 public:
  FockVector() = default;
  static FockVector vacuum();
  static FockVector of(Monomial m, Rational c = 1);
  /// Sorts, merges equal monomials and drops zeros.
  static FockVector from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coefficient(const Monomial& m) const;
  Rational vacuum_coefficient() const;

  FockVector& operator+=(const FockVector& o);
  FockVector& operator-=(const FockVector& o);
  FockVector& operator*=(const Rational& c);
  friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
  friend FockVector operator-(FockVector a, const FockVector& b) { return a -= b; }
  friend FockVector operator*(const Rational& c, FockVector a) { return a *= c; }
  friend bool operator==(const FockVector&, const FockVector&) = default;

  /// "1/2*q(1,x)*q(1,x)*vac - 3*q(2,h)*vac"; "0" for the zero vector.
  std::string str(const SurfaceModel& m) const;

 private:
  std::vector<Term> terms_;
};

/// Unsorted term buffer; finish() canonicalizes.
class FockAccumulator {
 public:
  void add(Monomial m, const Rational& c) {
    if (!c.is_zero()) terms_.emplace_back(std::move(m), c);
  }
  void add(const FockVector& v, const Rational& c);
  bool empty() const { return terms_.empty(); }
  FockVector finish() { return FockVector::from_terms(std::move(terms_)); }
  /// The raw terms, unmerged and in insertion order.
  std::vector<Term> take() { return std::move(terms_); }

 private:
  std::vector<Term> terms_;
};

namespace kernel {

/// Inserts p into canonical parts, returning the Koszul sign of moving it
/// into place, or 0 if an odd symbol repeats.
int insert_part(PartVec& parts, Part p, const SurfaceModel& m);

/// q_n(e_b) on a monomial, n > 0.
void create(int n, Label b, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out);

/// q_{-n}(e_a) on a monomial, n > 0: Wick contraction against each part of
/// size n, with the Koszul sign of moving past the parts to its left and the
/// contraction constant -n * integral(e_a e_b).
void annihilate(int n, Label a, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out);

/// q_n(e_b) for any n (n = 0 is the zero operator).
void heisenberg(int n, Label b, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out);

}  // namespace kernel

/// Canonical form of a creation word given as (n, label) pairs, n > 0.
/// Returns the sign (0 if the word vanishes) and the monomial.
std::pair<int, Monomial> normalize(const std::vector<std::pair<int, std::string>>& word, const SurfaceModel& m);
std::pair<int, Monomial> normalize(const std::vector<Part>& word, const SurfaceModel& m);

FockVector create(int n, const GradedClass& a, const FockVector& v);
FockVector annihilate(int n, const GradedClass& a, const FockVector& v);

/// All canonical monomials of the given level, in canonical order.
std::vector<Monomial> basis(int level, const SurfaceModel& m);
/// basis(0) ++ ... ++ basis(max_level).
std::vector<Monomial> basis_up_to(int max_level, const SurfaceModel& m);

/// |basis(l)| for l = 0..max_level, counted without enumerating.
std::vector<std::size_t> level_dimensions(int max_level, const SurfaceModel& m);

/// The bilinear form on the Fock space, fixed by <vac, vac> = 1 and the
/// adjoint rule <q_n(a) u, v> = (-1)^{|a||u|} (-1)^n <u, q_{-n}(a) v>.
Rational pair_fock(const FockVector& u, const FockVector& v, const SurfaceModel& m);
Rational pair_fock(const Monomial& u, const FockVector& v, const SurfaceModel& m);

/// Coefficients of sum over basis(level) of t^cohdeg, indexed by degree.
std::vector<std::int64_t> poincare(int level, const SurfaceModel& m);

}  // namespace hv
