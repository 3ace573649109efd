#include "hv/fock.hpp"

#include <algorithm>
#include <sstream>

namespace hv {

// ---------------------------------------------------------------------------
// Monomial

int Monomial::level() const {
  int s = 0;
  for (const auto& p : parts_) s += p.n;
  return s;
}

int Monomial::cohdeg(const SurfaceModel& m) const {
  int s = 0;
  for (const auto& p : parts_) s += 2 * p.n - 2 + m.degree(p.label);
  return s;
}

bool Monomial::odd(const SurfaceModel& m) const {
  bool o = false;
  for (const auto& p : parts_) o ^= m.odd(p.label);
  return o;
}

bool operator<(const Monomial& a, const Monomial& b) {
  int la = a.level();
  int lb = b.level();
  if (la != lb) return la < lb;
  return std::lexicographical_compare(a.parts_.begin(), a.parts_.end(), b.parts_.begin(), b.parts_.end(),
                                      part_before);
}

std::size_t Monomial::hash() const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& p : parts_) {
    h ^= (static_cast<std::size_t>(static_cast<std::uint16_t>(p.n)) << 16) | p.label;
    h *= 1099511628211ull;
  }
  return h;
}

std::string Monomial::str(const SurfaceModel& m) const {
  std::string s;
  for (const auto& p : parts_) {
    s += "q(" + std::to_string(p.n) + "," + m.label(p.label) + ")*";
  }
  return s + "vac";
}

// ---------------------------------------------------------------------------
// FockVector

namespace {

bool term_less(const Term& a, const Term& b) { return a.first < b.first; }

void merge_sorted(std::vector<Term>& terms) {
  std::size_t w = 0;
  for (std::size_t r = 0; r < terms.size();) {
    Rational c = terms[r].second;
    std::size_t s = r + 1;
    while (s < terms.size() && terms[s].first == terms[r].first) c += terms[s++].second;
    if (!c.is_zero()) {
      if (w != r) terms[w].first = std::move(terms[r].first);
      terms[w].second = c;
      ++w;
    }
    r = s;
  }
  terms.resize(w);
}

}  // namespace

FockVector FockVector::vacuum() { return of(Monomial{}); }

FockVector FockVector::of(Monomial m, Rational c) {
  FockVector v;
  if (!c.is_zero()) v.terms_.emplace_back(std::move(m), c);
  return v;
}

FockVector FockVector::from_terms(std::vector<Term> terms) {
  FockVector v;
  if (terms.size() > 1 && !std::is_sorted(terms.begin(), terms.end(), term_less)) {
    std::sort(terms.begin(), terms.end(), term_less);
  }
  merge_sorted(terms);
  if (terms.capacity() > 2 * terms.size() + 8) terms.shrink_to_fit();
  v.terms_ = std::move(terms);
  return v;
}

Rational FockVector::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& x) { return t.first < x; });
  if (it != terms_.end() && it->first == m) return it->second;
  return 0;
}

Rational FockVector::vacuum_coefficient() const {
  if (!terms_.empty() && terms_.front().first.is_vacuum()) return terms_.front().second;
  return 0;
}

FockVector& FockVector::operator+=(const FockVector& o) {
  if (o.terms_.empty()) return *this;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  std::merge(std::make_move_iterator(terms_.begin()), std::make_move_iterator(terms_.end()), o.terms_.begin(),
             o.terms_.end(), std::back_inserter(merged), term_less);
  merge_sorted(merged);
  terms_ = std::move(merged);
  return *this;
}

FockVector& FockVector::operator-=(const FockVector& o) { return *this += Rational(-1) * o; }

FockVector& FockVector::operator*=(const Rational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

std::string FockVector::str(const SurfaceModel& m) const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    if (first) {
      s += c.str();
    } else {
      s += c < 0 ? " - " + (-c).str() : " + " + c.str();
    }
    s += "*" + mono.str(m);
    first = false;
  }
  return s;
}

void FockAccumulator::add(const FockVector& v, const Rational& c) {
  if (c.is_zero()) return;
  for (const auto& [m, x] : v.terms()) terms_.emplace_back(m, x * c);
}

// ---------------------------------------------------------------------------
// Kernels

namespace kernel {

int insert_part(PartVec& parts, Part p, const SurfaceModel& m) {
  const bool odd = m.odd(p.label);
  std::size_t pos = 0;
  int passed_odd = 0;
  while (pos < parts.size() && !part_before(p, parts[pos])) {
    if (parts[pos] == p) {
      if (odd) return 0;
      break;
    }
    if (m.odd(parts[pos].label)) ++passed_odd;
    ++pos;
  }
  parts.insert(parts.begin() + static_cast<long>(pos), p);
  return (odd && (passed_odd & 1)) ? -1 : 1;
}

void create(int n, Label b, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out) {
  PartVec parts = u.parts();
  int s = insert_part(parts, Part{static_cast<std::int16_t>(n), b}, m);
  if (s == 0) return;
  out.add(Monomial(std::move(parts)), s > 0 ? c : -c);
}

void annihilate(int n, Label a, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out) {
  const auto& parts = u.parts();
  const bool a_odd = m.odd(a);
  int odd_before = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].n == n) {
      const Rational& g = m.pairing(a, parts[i].label);
      if (!g.is_zero()) {
        PartVec rest;
        rest.reserve(parts.size() - 1);
        rest.insert(rest.end(), parts.begin(), parts.begin() + static_cast<long>(i));
        rest.insert(rest.end(), parts.begin() + static_cast<long>(i) + 1, parts.end());
        Rational w = c * g * Rational(-n);
        if (a_odd && (odd_before & 1)) w = -w;
        out.add(Monomial(std::move(rest)), w);
      }
    }
    if (m.odd(parts[i].label)) ++odd_before;
  }
}

void heisenberg(int n, Label b, const Monomial& u, const Rational& c, const SurfaceModel& m, FockAccumulator& out) {
  if (n > 0) {
    create(n, b, u, c, m, out);
  } else if (n < 0) {
    annihilate(-n, b, u, c, m, out);
  }
}

}  // namespace kernel

// ---------------------------------------------------------------------------
// Public operations

std::pair<int, Monomial> normalize(const std::vector<Part>& word, const SurfaceModel& m) {
  PartVec parts;
  int sign = 1;
  // Build right to left: each new symbol is prepended, then moved into place.
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (it->n <= 0) throw UsageError("normalize: creation symbols need n > 0");
    if (it->label >= m.dim()) throw UsageError("normalize: label out of range");
    int s = kernel::insert_part(parts, *it, m);
    if (s == 0) return {0, Monomial{}};
    sign *= s;
  }
  return {sign, Monomial(std::move(parts))};
}

std::pair<int, Monomial> normalize(const std::vector<std::pair<int, std::string>>& word, const SurfaceModel& m) {
  std::vector<Part> parts;
  for (const auto& [n, label] : word) parts.push_back(Part{static_cast<std::int16_t>(n), m.index(label)});
  return normalize(parts, m);
}

FockVector create(int n, const GradedClass& a, const FockVector& v) {
  if (n <= 0) throw UsageError("create: n must be positive");
  FockAccumulator acc;
  for (const auto& [b, cb] : a.terms()) {
    for (const auto& [mono, c] : v.terms()) kernel::create(n, b, mono, c * cb, *a.model(), acc);
  }
  return acc.finish();
}

FockVector annihilate(int n, const GradedClass& a, const FockVector& v) {
  if (n <= 0) throw UsageError("annihilate: n must be positive");
  FockAccumulator acc;
  for (const auto& [b, cb] : a.terms()) {
    for (const auto& [mono, c] : v.terms()) kernel::annihilate(n, b, mono, c * cb, *a.model(), acc);
  }
  return acc.finish();
}

std::vector<Monomial> basis(int level, const SurfaceModel& m) {
  std::vector<Monomial> out;
  if (level < 0) return out;
  PartVec parts;
  const auto dim = static_cast<Label>(m.dim());
  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      out.emplace_back(parts);
      return;
    }
    int max_n = parts.empty() ? remaining : std::min<int>(remaining, parts.back().n);
    for (int n = max_n; n >= 1; --n) {
      Label first = 0;
      if (!parts.empty() && parts.back().n == n) {
        const Part& prev = parts.back();
        first = m.odd(prev.label) ? prev.label + 1 : prev.label;
      }
      for (Label b = first; b < dim; ++b) {
        parts.push_back(Part{static_cast<std::int16_t>(n), b});
        self(self, remaining - n);
        parts.pop_back();
      }
    }
  };
  rec(rec, level);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> basis_up_to(int max_level, const SurfaceModel& m) {
  std::vector<Monomial> out;
  for (int l = 0; l <= max_level; ++l) {
    auto b = basis(l, m);
    out.insert(out.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  }
  return out;
}

std::vector<std::size_t> level_dimensions(int max_level, const SurfaceModel& m) {
  const auto top = static_cast<std::size_t>(std::max(0, max_level));
  std::vector<std::size_t> dims(top + 1, 0);
  dims[0] = 1;
  for (std::size_t n = 1; n <= top; ++n) {
    for (Label b = 0; b < m.dim(); ++b) {
      if (m.odd(b)) {
        for (std::size_t l = top; l >= n; --l) dims[l] += dims[l - n];
      } else {
        for (std::size_t l = n; l <= top; ++l) dims[l] += dims[l - n];
      }
    }
  }
  return dims;
}

Rational pair_fock(const Monomial& u, const FockVector& v, const SurfaceModel& m) {
  if (v.is_zero()) return 0;
  if (u.is_vacuum()) return v.vacuum_coefficient();
  const Part head = u.parts().front();
  Monomial rest(PartVec(u.parts().begin() + 1, u.parts().end()));
  FockAccumulator acc;
  for (const auto& [mono, c] : v.terms()) kernel::annihilate(head.n, head.label, mono, c, m, acc);
  int s = sign_pow(head.n) * ((m.odd(head.label) && rest.odd(m)) ? -1 : 1);
  return Rational(s) * pair_fock(rest, acc.finish(), m);
}

Rational pair_fock(const FockVector& u, const FockVector& v, const SurfaceModel& m) {
  Rational s;
  for (const auto& [mono, c] : u.terms()) s += c * pair_fock(mono, v, m);
  return s;
}

std::vector<std::int64_t> poincare(int level, const SurfaceModel& m) {
  std::vector<std::int64_t> coeffs(static_cast<std::size_t>(std::max(0, 4 * level)) + 1, 0);
  for (const auto& mono : basis(level, m)) ++coeffs[static_cast<std::size_t>(mono.cohdeg(m))];
  return coeffs;
}

}  // namespace hv
