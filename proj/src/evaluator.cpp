#include "evaluator.hpp"

#include <algorithm>

namespace hv::detail {

Id MonomialSpace::id(const Monomial& m) {
  auto [it, inserted] = index_.try_emplace(m, static_cast<Id>(monos_.size()));
  if (inserted) monos_.push_back(m);
  return it->second;
}

SVec MonomialSpace::from(const FockVector& v) {
  SAccumulator acc;
  for (const auto& [m, c] : v.terms()) acc.add(id(m), c);
  return acc.finish();
}

void MonomialSpace::truncate(std::size_t n) {
  for (std::size_t i = n; i < monos_.size(); ++i) index_.erase(monos_[i]);
  monos_.resize(std::min(n, monos_.size()));
}

FockVector MonomialSpace::to(const SVec& v) const {
  std::vector<Term> terms;
  terms.reserve(v.size());
  for (const auto& [i, c] : v) terms.emplace_back(monos_[i], c);
  return FockVector::from_terms(std::move(terms));
}

void SAccumulator::add(const SVec& v, const Rational& c) {
  if (c.is_zero()) return;
  if (c == Rational(1)) {
    terms_.insert(terms_.end(), v.begin(), v.end());
    return;
  }
  for (const auto& [i, x] : v) terms_.emplace_back(i, x * c);
}

SVec SAccumulator::finish() {
  SVec& t = terms_;
  if (t.size() > 1) std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < t.size();) {
    Rational c = t[r].second;
    std::size_t s = r + 1;
    while (s < t.size() && t[s].first == t[r].first) c += t[s++].second;
    if (!c.is_zero()) t[w++] = {t[r].first, c};
    r = s;
  }
  SVec out(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(w));
  t.clear();
  if (t.capacity() > 4096) SVec().swap(t);
  return out;
}

const SVec& IdTable::put(Id i, SVec v) {
  const std::size_t c = i >> kShift;
  if (c >= chunks_.size()) chunks_.resize(c + 1);
  if (!chunks_[c]) chunks_[c] = std::make_unique<Chunk>();
  stored_ += v.size() + 1;
  chunks_[c]->rows[i & kMask] = std::move(v);
  chunks_[c]->have.set(i & kMask);
  return chunks_[c]->rows[i & kMask];
}

void IdTable::clear() {
  std::vector<std::unique_ptr<Chunk>>().swap(chunks_);
  stored_ = 0;
}

Evaluator::Depth::Depth(Evaluator& ev) : e(ev) {
  if (e.depth_ == 0 && e.stored_ > e.cap_) e.flush();
  ++e.depth_;
}

void Evaluator::pin(const Operator& f) { entry(f); }

void Evaluator::flush() {
  for (auto& [key, other] : memo_) other.images.clear();
  stored_ = 0;
}

namespace {

std::size_t slot(const void* key) { return (reinterpret_cast<std::uintptr_t>(key) >> 4) & 63; }

}  // namespace

Evaluator::Entry* Evaluator::find(const Operator& f) {
  auto& r = recent_[slot(f.id())];
  if (r.first == f.id()) return r.second;
  auto it = memo_.find(f.id());
  if (it == memo_.end()) return nullptr;
  r = {f.id(), &it->second};
  return r.second;
}

Evaluator::Entry& Evaluator::entry(const Operator& f) {
  if (Entry* e = find(f)) return *e;
  Entry& e = memo_.emplace(f.id(), Entry{f, {}}).first->second;
  recent_[slot(f.id())] = {f.id(), &e};
  return e;
}

SAccumulator& Evaluator::scratch() {
  const auto d = static_cast<std::size_t>(depth_);
  while (scratch_.size() < d) scratch_.push_back(std::make_unique<SAccumulator>());
  return *scratch_[d - 1];
}

SVec Evaluator::apply(const Operator& f, Id u) {
  Depth d(*this);
  SAccumulator& acc = scratch();
  dispatch(f, u, 1, acc);
  return acc.finish();
}

SVec Evaluator::apply(const Operator& f, const SVec& v) {
  Depth d(*this);
  SAccumulator& acc = scratch();
  for (const auto& [u, c] : v) dispatch(f, u, c, acc);
  return acc.finish();
}

void Evaluator::apply_to(const Operator& f, Id u, const Rational& c, SAccumulator& out) {
  Depth d(*this);
  dispatch(f, u, c, out);
}

const SVec& Evaluator::image(const Operator& f, Id u) {
  Depth d(*this);
  return cached(entry(f), u);
}

void Evaluator::dispatch(const Operator& f, Id u, const Rational& c, SAccumulator& out) {
  using Kind = Operator::Kind;
  switch (f.kind()) {
    case Kind::Zero:
      return;
    case Kind::Identity:
      out.add(u, c);
      return;
    case Kind::Scaled:
      dispatch(f.children()[0], u, c * f.scalar(), out);
      return;
    case Kind::Sum:
      for (const auto& g : f.children()) dispatch(g, u, c, out);
      return;
    case Kind::Compose:
    case Kind::Bracket:
      if (Entry* e = find(f)) {
        out.add(cached(*e, u), c);
      } else {
        structural(f, u, c, out);
      }
      return;
    default:
      out.add(cached(entry(f), u), c);
      return;
  }
}

const SVec& Evaluator::child_image(const Operator& f, Id u, SVec& tmp) {
  using Kind = Operator::Kind;
  switch (f.kind()) {
    case Kind::Zero:
    case Kind::Identity:
    case Kind::Scaled:
    case Kind::Sum:
      break;
    case Kind::Compose:
    case Kind::Bracket:
      if (Entry* e = find(f)) return cached(*e, u);
      break;
    default:
      return cached(entry(f), u);
  }
  tmp = apply(f, u);
  return tmp;
}

const std::pair<Operator, Operator>& Evaluator::creation_pair(const Operator& d, Part p) {
  const auto key = std::make_pair(int{p.n}, p.label);
  auto it = creation_.find(key);
  if (it == creation_.end()) {
    const ModelPtr& m = d.model();
    const GradedClass e = m->basis_class(p.label);
    const Operator qn = q(p.n, e);
    const Operator prime =
        scale(p.n, virasoro(p.n, e)) + scale(Rational(p.n * (p.n - 1), 2), q(p.n, mul(m->canonical_class(), e)));
    it = creation_.emplace(key, std::make_pair(qn, prime)).first;
  }
  return it->second;
}

void Evaluator::boundary(const Operator& f, Id u, const Rational& c, SAccumulator& out) {
  const PartVec parts = space_.mono(u).parts();
  if (parts.empty()) return;
  const Id rest = space_.id(Monomial(PartVec(parts.begin() + 1, parts.end())));
  const auto& [qn, prime] = creation_pair(f, parts.front());
  dispatch(prime, rest, c, out);
  for (const auto& [v, cv] : cached(entry(f), rest)) dispatch(qn, v, c * cv, out);
}

void Evaluator::structural(const Operator& f, Id u, const Rational& c, SAccumulator& out) {
  if (f.kind() == Operator::Kind::Boundary) {
    boundary(f, u, c, out);
  } else if (f.kind() == Operator::Kind::Compose) {
    SVec tmp;
    const SVec& gu = child_image(f.children()[1], u, tmp);
    for (const auto& [v, cv] : gu) dispatch(f.children()[0], v, c * cv, out);
  } else if (f.kind() == Operator::Kind::Bracket) {
    const Operator& a = f.children()[0];
    const Operator& b = f.children()[1];
    SVec tmp;
    const SVec& bu = child_image(b, u, tmp);
    for (const auto& [v, cv] : bu) dispatch(a, v, c * cv, out);
    SVec tmp2;
    const SVec& au = child_image(a, u, tmp2);
    const Rational s = (*a.odd() && *b.odd()) ? c : -c;
    for (const auto& [v, cv] : au) dispatch(b, v, s * cv, out);
  } else {
    FockAccumulator acc;
    f.apply_to(space_.mono(u), c, acc);
    for (auto& [m, x] : acc.take()) out.add(space_.id(m), x);
  }
}

const SVec& Evaluator::cached(Entry& e, Id u) {
  if (const SVec* hit = e.images.find(u)) return *hit;
  Depth d(*this);
  SAccumulator& acc = scratch();
  structural(e.keep, u, 1, acc);
  SVec img = acc.finish();
  stored_ += img.size() + 1;
  return e.images.put(u, std::move(img));
}

}  // namespace hv::detail
