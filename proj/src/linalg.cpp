#include "hv/linalg.hpp"

namespace hv {

mpq_class to_mpq(const Rational& r) {
  mpq_class q(mpz_class(static_cast<long>(r.num())), mpz_class(static_cast<long>(r.den())));
  q.canonicalize();
  return q;
}

SparseRow Echelon::reduce(SparseRow row) const {
  auto it = row.begin();
  while (it != row.end()) {
    auto piv = rows_.find(it->first);
    if (piv == rows_.end()) {
      ++it;
      continue;
    }
    const mpq_class f = it->second;
    const std::size_t col = it->first;
    for (const auto& [c, v] : piv->second) {
      auto [slot, inserted] = row.try_emplace(c, 0);
      slot->second -= f * v;
      if (slot->second == 0) row.erase(slot);
    }
    it = row.upper_bound(col);
  }
  return row;
}

bool Echelon::insert(SparseRow row) {
  row = reduce(std::move(row));
  if (row.empty()) return false;
  const mpq_class lead = row.begin()->second;
  for (auto& [c, v] : row) v /= lead;
  const std::size_t col = row.begin()->first;
  rows_.emplace(col, std::move(row));
  return true;
}

std::size_t rank(const std::vector<SparseRow>& rows) {
  Echelon e;
  for (const auto& r : rows) e.insert(r);
  return e.rank();
}

}  // namespace hv
