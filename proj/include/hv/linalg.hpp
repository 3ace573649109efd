#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <vector>

#include "hv/rational.hpp"

namespace hv {

/// Sparse row over Q keyed by column index.
using SparseRow = std::map<std::size_t, mpq_class>;

mpq_class to_mpq(const Rational& r);

/// Row echelon form built one row at a time over Q. Pivots are the smallest
/// column of each reduced row, so the basis depends only on insertion order.
class Echelon {
 public:
  /// Reduces `row` against the stored pivots. Keeps it and returns true if a
  /// nonzero remainder is left.
  bool insert(SparseRow row);
  /// Reduces without storing; empty iff the row lies in the span.
  SparseRow reduce(SparseRow row) const;
  std::size_t rank() const { return rows_.size(); }
  /// Pivot column -> normalized row (pivot entry 1).
  const std::map<std::size_t, SparseRow>& rows() const { return rows_; }

 private:
  std::map<std::size_t, SparseRow> rows_;
};

/// Rank of the rows.
std::size_t rank(const std::vector<SparseRow>& rows);

}  // namespace hv
