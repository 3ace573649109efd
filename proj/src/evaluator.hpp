#pragma once

#include <cstdint>
#include <map>
#include <array>
#include <bitset>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hv/operators.hpp"

namespace hv::detail {

using Id = std::uint32_t;
/// Sparse vector over interned monomials: sorted by id, no zero entries.
using SVec = std::vector<std::pair<Id, Rational>>;

/// Interns monomials as dense ids.
class MonomialSpace {
 public:
  Id id(const Monomial& m);
  const Monomial& mono(Id i) const { return monos_[i]; }
  std::size_t size() const { return monos_.size(); }

  SVec from(const FockVector& v);
  FockVector to(const SVec& v) const;
  /// Forgets every id >= n.
  void truncate(std::size_t n);

 private:
  std::unordered_map<Monomial, Id, MonomialHash> index_;
  std::vector<Monomial> monos_;
};

/// Collects (id, coefficient) terms; finish() merges them. The scratch buffer
/// keeps its capacity across uses.
class SAccumulator {
 public:
  void add(Id i, const Rational& c) {
    if (!c.is_zero()) terms_.emplace_back(i, c);
  }
  void add(const SVec& v, const Rational& c);
  SVec finish();

 private:
  SVec terms_;
};

/// Lazily filled table id -> SVec with stable references.
class IdTable {
 public:
  const SVec* find(Id i) const {
    const std::size_t c = i >> kShift;
    if (c >= chunks_.size() || !chunks_[c] || !chunks_[c]->have[i & kMask]) return nullptr;
    return &chunks_[c]->rows[i & kMask];
  }
  const SVec& put(Id i, SVec v);
  void clear();
  std::size_t stored() const { return stored_; }

 private:
  static constexpr unsigned kShift = 6;
  static constexpr Id kMask = (Id{1} << kShift) - 1;
  struct Chunk {
    std::array<SVec, kMask + 1> rows;
    std::bitset<kMask + 1> have;
  };

  std::vector<std::unique_ptr<Chunk>> chunks_;
  std::size_t stored_ = 0;
};

/// Applies operator trees on interned monomials. Images of generator nodes
/// (and of pinned composite nodes) are cached per id.
class Evaluator {
 public:
  explicit Evaluator(MonomialSpace& space, std::size_t term_cap = 20'000'000) : space_(space), cap_(term_cap) {}

  /// Caches the images of this (composite) operator too.
  void pin(const Operator& f);
  /// Drops all cached images.
  void flush();

  SVec apply(const Operator& f, Id u);
  SVec apply(const Operator& f, const SVec& v);
  void apply_to(const Operator& f, Id u, const Rational& c, SAccumulator& out);
  /// Image of a single id. The reference stays valid until the next call
  /// into the evaluator made at nesting depth zero.
  const SVec& image(const Operator& f, Id u);

  MonomialSpace& space() { return space_; }

 private:
  struct Entry {
    Operator keep;
    IdTable images;
  };

  struct Depth {
    explicit Depth(Evaluator& e);
    ~Depth() { --e.depth_; }
    Evaluator& e;
  };

  void dispatch(const Operator& f, Id u, const Rational& c, SAccumulator& out);
  /// d(q_n(e_b) r) = [d, q_n(e_b)] r + q_n(e_b) d(r), with r the remaining parts.
  void boundary(const Operator& f, Id u, const Rational& c, SAccumulator& out);
  const std::pair<Operator, Operator>& creation_pair(const Operator& d, Part p);
  void structural(const Operator& f, Id u, const Rational& c, SAccumulator& out);
  /// Image of f at u, by reference when f is cached, else through `tmp`.
  const SVec& child_image(const Operator& f, Id u, SVec& tmp);
  const SVec& cached(Entry& e, Id u);
  Entry* find(const Operator& f);
  Entry& entry(const Operator& f);
  SAccumulator& scratch();

  MonomialSpace& space_;
  std::size_t cap_;
  std::unordered_map<const void*, Entry> memo_;
  std::array<std::pair<const void*, Entry*>, 64> recent_{};
  std::size_t stored_ = 0;
  int depth_ = 0;
  std::vector<std::unique_ptr<SAccumulator>> scratch_;
  /// (q_n(e_b), [d, q_n(e_b)]) by (n, b).
  std::map<std::pair<int, Label>, std::pair<Operator, Operator>> creation_;
};

}  // namespace hv::detail
