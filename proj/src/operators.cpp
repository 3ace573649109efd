#include "hv/operators.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hv {

namespace {

/// One Kunneth component c * e_{l1} (x) ... (x) e_{lk} of a diagonal class.
struct KTerm {
  Rational c;
  std::vector<Label> labels;
};

std::vector<KTerm> kunneth(const GradedClass& a, std::size_t k) {
  std::vector<KTerm> out;
  const TensorClass t = diag_push(a, k);
  for (const auto& [key, c] : t.terms()) out.push_back({c, key});
  return out;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

int max_part(const Monomial& u) { return u.is_vacuum() ? 0 : u.parts().front().n; }

}  // namespace

struct Operator::Node {
  Kind kind = Kind::Zero;
  ModelPtr model;
  std::optional<Bidegree> bideg;
  std::optional<bool> odd;
  Rational scalar = 1;
  std::vector<Operator> children;
  int n = 0;
  int k = 0;
  std::vector<std::pair<Label, Rational>> cls;  // generator class, sparse
  std::vector<KTerm> kterms;                    // L, W: diagonal of cls
  Rational inv_fact = 1;                        // W: 1/k!
  std::vector<std::vector<KTerm>> tau2_of;      // d: diagonal of each basis class
  std::vector<std::vector<std::pair<Label, Rational>>> k_times;  // d: K * e_b
  std::optional<NormalWord> words;
  ActionFn action;
  std::string name;
};

struct OperatorFactory {
  static Operator make(Operator::Node n) { return Operator(std::make_shared<const Operator::Node>(std::move(n))); }
};

namespace {

using Node = Operator::Node;
using Kind = Operator::Kind;

ModelPtr common_model(const std::vector<Operator>& fs) {
  ModelPtr m;
  for (const auto& f : fs) {
    if (!f.model()) continue;
    if (m && m != f.model()) throw UsageError("operators from different models");
    m = f.model();
  }
  return m;
}

// L_n evaluated literally from the quadratic sum: for n != 0,
// 1/2 sum_m q_m q_{n-m}; for n = 0, sum_{m>0} q_m q_{-m}. Terms with an
// annihilator larger than every part present vanish and are skipped.
void virasoro_apply(int n, const std::vector<KTerm>& tau2, const Monomial& u, const Rational& c, const SurfaceModel& m,
                    FockAccumulator& out) {
  const int top = max_part(u);
  if (n == 0) {
    for (int mm = 1; mm <= top; ++mm) {
      for (const auto& t : tau2) {
        FockAccumulator inner;
        kernel::annihilate(mm, t.labels[1], u, c * t.c, m, inner);
        if (inner.empty()) continue;
        const FockVector mid = inner.finish();
        for (const auto& [v, cv] : mid.terms()) kernel::create(mm, t.labels[0], v, cv, m, out);
      }
    }
    return;
  }
  const Rational half = c * Rational(1, 2);
  const int bound = top + std::abs(n);
  for (int mm = -bound; mm <= bound; ++mm) {
    if (mm == 0 || mm == n) continue;
    for (const auto& t : tau2) {
      FockAccumulator inner;
      kernel::heisenberg(n - mm, t.labels[1], u, half * t.c, m, inner);
      if (inner.empty()) continue;
      const FockVector mid = inner.finish();
      for (const auto& [v, cv] : mid.terms()) kernel::heisenberg(mm, t.labels[0], v, cv, m, out);
    }
  }
}

// W^k_n on a monomial. For every Kunneth term and every choice S of slots
// carrying negative indices, the normally ordered word has the creators (slots
// outside S) on the left and the annihilators (slots in S) on the right, each
// block in slot order, with the Koszul sign of the odd pairs that were
// inverted. The annihilators contract against parts of u, which fixes their
// indices; the creators then run over all compositions of what is left of n.
void w_apply(int k, int n, const std::vector<KTerm>& tau, const Rational& inv_fact, const Monomial& u,
             const Rational& c, const SurfaceModel& m, FockAccumulator& out) {
  const unsigned full = 1u << k;
  std::vector<int> ann;
  std::vector<int> cre;
  std::vector<int> comp;
  for (const auto& t : tau) {
    for (unsigned S = 0; S < full; ++S) {
      const auto s = static_cast<std::size_t>(__builtin_popcount(S));
      if (s > u.size()) continue;
      ann.clear();
      cre.clear();
      int inversions = 0;
      int odd_ann_before = 0;
      for (int i = 0; i < k; ++i) {
        const bool odd = m.odd(t.labels[static_cast<std::size_t>(i)]);
        if (S & (1u << i)) {
          ann.push_back(i);
          if (odd) ++odd_ann_before;
        } else {
          cre.push_back(i);
          if (odd) inversions += odd_ann_before;
        }
      }
      Rational base = c * inv_fact * t.c;
      if (inversions & 1) base = -base;

      auto creators = [&](const PartVec& rest, const Rational& coef, int total) {
        const auto r = cre.size();
        if (r == 0) {
          if (total == 0) out.add(Monomial(rest), coef);
          return;
        }
        if (total < static_cast<int>(r)) return;
        comp.assign(r, 1);
        auto place = [&](auto&& self, std::size_t slot, int remaining) -> void {
          if (slot + 1 == r) {
            comp[slot] = remaining;
            PartVec parts = rest;
            int sign = 1;
            for (std::size_t j = r; j-- > 0;) {
              int sg = kernel::insert_part(
                  parts, Part{static_cast<std::int16_t>(comp[j]), t.labels[static_cast<std::size_t>(cre[j])]}, m);
              if (sg == 0) return;
              sign *= sg;
            }
            out.add(Monomial(std::move(parts)), sign > 0 ? coef : -coef);
            return;
          }
          const int slots_after = static_cast<int>(r - slot - 1);
          for (int v = 1; v <= remaining - slots_after; ++v) {
            comp[slot] = v;
            self(self, slot + 1, remaining - v);
          }
        };
        place(place, 0, total);
      };

      auto annihilators = [&](auto&& self, int idx, const PartVec& parts, const Rational& coef, int psum) -> void {
        if (idx < 0) {
          creators(parts, coef, n + psum);
          return;
        }
        const Label a = t.labels[static_cast<std::size_t>(ann[static_cast<std::size_t>(idx)])];
        const bool a_odd = m.odd(a);
        int odd_before = 0;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          const Rational& g = m.pairing(a, parts[i].label);
          if (!g.is_zero()) {
            PartVec next;
            next.reserve(parts.size() - 1);
            next.insert(next.end(), parts.begin(), parts.begin() + static_cast<long>(i));
            next.insert(next.end(), parts.begin() + static_cast<long>(i) + 1, parts.end());
            Rational w = coef * g * Rational(-parts[i].n);
            if (a_odd && (odd_before & 1)) w = -w;
            self(self, idx - 1, next, w, psum + parts[i].n);
          }
          if (m.odd(parts[i].label)) ++odd_before;
        }
      };
      annihilators(annihilators, static_cast<int>(ann.size()) - 1, u.parts(), base, 0);
    }
  }
}

void boundary_apply(const Node& nd, const Monomial& u, const Rational& c, const SurfaceModel& m,
                    FockAccumulator& out) {
  const auto& parts = u.parts();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int ni = parts[i].n;
    const Label b = parts[i].label;
    Monomial suffix(PartVec(parts.begin() + static_cast<long>(i) + 1, parts.end()));
    FockAccumulator tmp;
    virasoro_apply(ni, nd.tau2_of[b], suffix, c * ni, m, tmp);
    const Rational kc = Rational(ni * (ni - 1), 2);
    if (!kc.is_zero()) {
      for (const auto& [l, x] : nd.k_times[b]) kernel::create(ni, l, suffix, c * kc * x, m, tmp);
    }
    const FockVector image = tmp.finish();
    for (const auto& [v, cv] : image.terms()) {
      PartVec p = v.parts();
      int sign = 1;
      for (std::size_t j = i; j-- > 0;) {
        int sg = kernel::insert_part(p, parts[j], m);
        if (sg == 0) {
          sign = 0;
          break;
        }
        sign *= sg;
      }
      if (sign != 0) out.add(Monomial(std::move(p)), sign > 0 ? cv : -cv);
    }
  }
}

void words_apply(const NormalWord& nw, const Monomial& u, const Rational& c, FockAccumulator& out) {
  const auto& m = *nw.model();
  for (const auto& [word, coef] : nw.terms()) {
    FockVector v = FockVector::of(u, c * coef);
    for (auto it = word.rbegin(); it != word.rend() && !v.is_zero(); ++it) {
      FockAccumulator step;
      for (const auto& [mono, x] : v.terms()) kernel::heisenberg(it->n, it->label, mono, x, m, step);
      v = step.finish();
    }
    out.add(v, 1);
  }
}

std::optional<Bidegree> sum_bidegree(const std::vector<Operator>& fs) {
  std::optional<Bidegree> b;
  bool any = false;
  for (const auto& f : fs) {
    if (f.is_zero_node()) continue;
    auto fb = f.bidegree();
    if (!fb) return std::nullopt;
    if (any && !(*b == *fb)) return std::nullopt;
    b = fb;
    any = true;
  }
  return any ? b : Bidegree{};
}

std::optional<bool> sum_parity(const std::vector<Operator>& fs) {
  std::optional<bool> p;
  for (const auto& f : fs) {
    if (f.is_zero_node()) continue;
    auto fp = f.odd();
    if (!fp) return std::nullopt;
    if (p && *p != *fp) return std::nullopt;
    p = fp;
  }
  return p.value_or(false);
}

std::optional<Bidegree> add_opt(std::optional<Bidegree> a, std::optional<Bidegree> b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

std::optional<bool> xor_opt(std::optional<bool> a, std::optional<bool> b) {
  if (!a || !b) return std::nullopt;
  return *a != *b;
}

std::string class_generator_str(const std::string& head, const std::string& args,
                                const std::vector<std::pair<Label, Rational>>& cls, const SurfaceModel& m) {
  if (cls.empty()) return "0";
  if (cls.size() == 1 && cls[0].second == Rational(1)) return head + "(" + args + m.label(cls[0].first) + ")";
  std::string s = "(";
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto& [l, c] = cls[i];
    if (i > 0) s += c < 0 ? " - " : " + ";
    Rational shown = (i > 0 && c < 0) ? -c : c;
    s += shown.str() + "*" + head + "(" + args + m.label(l) + ")";
  }
  return s + ")";
}

bool needs_parens_in_product(const Operator& f) {
  return f.kind() == Kind::Sum || (f.kind() == Kind::Words && f.node().words->terms().size() > 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator basics

Operator::Operator() : node_(std::make_shared<const Node>()) {}

Operator::Kind Operator::kind() const { return node_->kind; }
const ModelPtr& Operator::model() const { return node_->model; }
std::optional<Bidegree> Operator::bidegree() const { return node_->bideg; }
std::optional<bool> Operator::odd() const { return node_->odd; }
const std::vector<Operator>& Operator::children() const { return node_->children; }
const Rational& Operator::scalar() const { return node_->scalar; }

FockVector Operator::apply(const Monomial& u) const {
  FockAccumulator acc;
  apply_to(u, 1, acc);
  return acc.finish();
}

FockVector Operator::apply(const FockVector& v) const {
  FockAccumulator acc;
  for (const auto& [u, c] : v.terms()) apply_to(u, c, acc);
  return acc.finish();
}

void Operator::apply_to(const Monomial& u, const Rational& c, FockAccumulator& out) const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Zero:
      return;
    case Kind::Identity:
      out.add(u, c);
      return;
    case Kind::Scaled:
      nd.children[0].apply_to(u, c * nd.scalar, out);
      return;
    case Kind::Sum:
      for (const auto& f : nd.children) f.apply_to(u, c, out);
      return;
    case Kind::Compose: {
      FockVector gu = nd.children[1].apply(u);
      for (const auto& [v, cv] : gu.terms()) nd.children[0].apply_to(v, c * cv, out);
      return;
    }
    case Kind::Bracket: {
      const Operator& f = nd.children[0];
      const Operator& g = nd.children[1];
      const bool both_odd = *f.odd() && *g.odd();
      FockVector gu = g.apply(u);
      for (const auto& [v, cv] : gu.terms()) f.apply_to(v, c * cv, out);
      FockVector fu = f.apply(u);
      const Rational s = both_odd ? c : -c;
      for (const auto& [v, cv] : fu.terms()) g.apply_to(v, s * cv, out);
      return;
    }
    case Kind::Heisenberg:
      for (const auto& [b, cb] : nd.cls) kernel::heisenberg(nd.n, b, u, c * cb, *nd.model, out);
      return;
    case Kind::Virasoro:
      virasoro_apply(nd.n, nd.kterms, u, c, *nd.model, out);
      return;
    case Kind::W:
      w_apply(nd.k, nd.n, nd.kterms, nd.inv_fact, u, c, *nd.model, out);
      return;
    case Kind::Boundary:
      boundary_apply(nd, u, c, *nd.model, out);
      return;
    case Kind::Words:
      words_apply(*nd.words, u, c, out);
      return;
    case Kind::Custom:
      nd.action(u, c, out);
      return;
  }
}

std::string Operator::str() const {
  const Node& nd = *node_;
  switch (nd.kind) {
    case Kind::Zero:
      return "0";
    case Kind::Identity:
      return "1";
    case Kind::Scaled: {
      const Operator& f = nd.children[0];
      std::string inner = f.str();
      if (needs_parens_in_product(f) || f.kind() == Kind::Scaled) inner = "(" + inner + ")";
      return nd.scalar.str() + "*" + inner;
    }
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < nd.children.size(); ++i) {
        const Operator& f = nd.children[i];
        if (i == 0) {
          s += f.str();
        } else if (f.kind() == Kind::Scaled && f.node().scalar < 0) {
          s += " - " + scale(-f.node().scalar, f.node().children[0]).str();
        } else {
          s += " + " + f.str();
        }
      }
      return s.empty() ? "0" : s;
    }
    case Kind::Compose: {
      std::string a = nd.children[0].str();
      std::string b = nd.children[1].str();
      if (needs_parens_in_product(nd.children[0]) || nd.children[0].kind() == Kind::Scaled) a = "(" + a + ")";
      if (needs_parens_in_product(nd.children[1]) || nd.children[1].kind() == Kind::Scaled) b = "(" + b + ")";
      return a + "*" + b;
    }
    case Kind::Bracket:
      return "[" + nd.children[0].str() + "," + nd.children[1].str() + "]";
    case Kind::Heisenberg:
      return class_generator_str("q", std::to_string(nd.n) + ",", nd.cls, *nd.model);
    case Kind::Virasoro:
      return class_generator_str("L", std::to_string(nd.n) + ",", nd.cls, *nd.model);
    case Kind::W:
      return class_generator_str("W", std::to_string(nd.k) + "," + std::to_string(nd.n) + ",", nd.cls, *nd.model);
    case Kind::Boundary:
      return "d";
    case Kind::Words:
      return "(" + nd.words->str() + ")";
    case Kind::Custom:
      return nd.name;
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Constructors

Operator zero_operator(const ModelPtr& model) {
  Node n;
  n.kind = Kind::Zero;
  n.model = model;
  n.odd = false;
  return OperatorFactory::make(std::move(n));
}

Operator identity(const ModelPtr& model) {
  Node n;
  n.kind = Kind::Identity;
  n.model = model;
  n.bideg = Bidegree{};
  n.odd = false;
  return OperatorFactory::make(std::move(n));
}

Operator scale(const Rational& c, const Operator& f) {
  if (c.is_zero() || f.is_zero_node()) return zero_operator(f.model());
  if (c == Rational(1)) return f;
  if (f.kind() == Kind::Scaled) return scale(c * f.node().scalar, f.node().children[0]);
  Node n;
  n.kind = Kind::Scaled;
  n.model = f.model();
  n.scalar = c;
  n.children = {f};
  n.bideg = f.bidegree();
  n.odd = f.odd();
  return OperatorFactory::make(std::move(n));
}

Operator sum(const std::vector<Operator>& fs) {
  ModelPtr m = common_model(fs);
  std::vector<Operator> kept;
  for (const auto& f : fs) {
    if (f.is_zero_node()) continue;
    if (f.kind() == Kind::Sum) {
      kept.insert(kept.end(), f.node().children.begin(), f.node().children.end());
    } else {
      kept.push_back(f);
    }
  }
  if (kept.empty()) return zero_operator(m);
  if (kept.size() == 1) return kept[0];
  Node n;
  n.kind = Kind::Sum;
  n.model = m;
  n.bideg = sum_bidegree(kept);
  n.odd = sum_parity(kept);
  n.children = std::move(kept);
  return OperatorFactory::make(std::move(n));
}

Operator compose(const Operator& f, const Operator& g) {
  ModelPtr m = common_model({f, g});
  if (f.is_zero_node() || g.is_zero_node()) return zero_operator(m);
  if (f.kind() == Kind::Identity) return g;
  if (g.kind() == Kind::Identity) return f;
  if (f.kind() == Kind::Scaled) return scale(f.node().scalar, compose(f.node().children[0], g));
  if (g.kind() == Kind::Scaled) return scale(g.node().scalar, compose(f, g.node().children[0]));
  Node n;
  n.kind = Kind::Compose;
  n.model = m;
  n.children = {f, g};
  n.bideg = add_opt(f.bidegree(), g.bidegree());
  n.odd = xor_opt(f.odd(), g.odd());
  return OperatorFactory::make(std::move(n));
}

Operator operator+(const Operator& f, const Operator& g) { return sum({f, g}); }
Operator operator-(const Operator& f, const Operator& g) { return sum({f, scale(-1, g)}); }
Operator operator*(const Operator& f, const Operator& g) { return compose(f, g); }
Operator operator*(const Rational& c, const Operator& f) { return scale(c, f); }

Operator q(int n, const GradedClass& a) {
  if (n == 0 || a.is_zero()) return zero_operator(a.model());
  Node nd;
  nd.kind = Kind::Heisenberg;
  nd.model = a.model();
  nd.n = n;
  nd.cls = a.terms();
  if (auto d = a.degree()) nd.bideg = Bidegree{n, 2 * n - 2 + *d};
  nd.odd = a.odd();
  return OperatorFactory::make(std::move(nd));
}

Operator virasoro(int n, const GradedClass& a) {
  if (a.is_zero()) return zero_operator(a.model());
  Node nd;
  nd.kind = Kind::Virasoro;
  nd.model = a.model();
  nd.n = n;
  nd.cls = a.terms();
  nd.kterms = kunneth(a, 2);
  if (auto d = a.degree()) nd.bideg = Bidegree{n, 2 * n + *d};
  nd.odd = a.odd();
  return OperatorFactory::make(std::move(nd));
}

Operator w(int k, int n, const GradedClass& a) {
  if (k < 1) throw UsageError("W: conformal weight k must be positive");
  if (k > 16) throw UsageError("W: conformal weight k too large");
  if (a.is_zero()) return zero_operator(a.model());
  Node nd;
  nd.kind = Kind::W;
  nd.model = a.model();
  nd.n = n;
  nd.k = k;
  nd.cls = a.terms();
  nd.kterms = kunneth(a, static_cast<std::size_t>(k));
  nd.inv_fact = Rational(1) / factorial(k);
  if (auto d = a.degree()) nd.bideg = Bidegree{n, 2 * n + 2 * k - 4 + *d};
  nd.odd = a.odd();
  return OperatorFactory::make(std::move(nd));
}

Operator boundary(const ModelPtr& model) {
  Node nd;
  nd.kind = Kind::Boundary;
  nd.model = model;
  nd.bideg = Bidegree{0, 2};
  nd.odd = false;
  const GradedClass K = model->canonical_class();
  for (Label b = 0; b < model->dim(); ++b) {
    nd.tau2_of.push_back(kunneth(model->basis_class(b), 2));
    nd.k_times.push_back(mul(K, model->basis_class(b)).terms());
  }
  return OperatorFactory::make(std::move(nd));
}

Operator words(const NormalWord& nw) {
  if (nw.is_zero()) return zero_operator(nw.model());
  Node nd;
  nd.kind = Kind::Words;
  nd.model = nw.model();
  nd.words = nw;
  std::vector<Operator> dummy;
  std::optional<Bidegree> b;
  std::optional<bool> p;
  bool first = true;
  bool homogeneous = true;
  bool same_parity = true;
  for (const auto& [word, c] : nw.terms()) {
    Bidegree wb{};
    bool wodd = false;
    for (const auto& s : word) {
      wb = wb + Bidegree{s.n, 2 * s.n - 2 + nw.model()->degree(s.label)};
      wodd ^= nw.model()->odd(s.label);
    }
    if (first) {
      b = wb;
      p = wodd;
      first = false;
    } else {
      homogeneous = homogeneous && (*b == wb);
      same_parity = same_parity && (*p == wodd);
    }
  }
  nd.bideg = homogeneous ? b : std::nullopt;
  nd.odd = same_parity ? p : std::nullopt;
  return OperatorFactory::make(std::move(nd));
}

Operator custom(const ModelPtr& model, ActionFn action, std::optional<Bidegree> bideg, std::optional<bool> odd,
                std::string name) {
  Node nd;
  nd.kind = Kind::Custom;
  nd.model = model;
  nd.action = std::move(action);
  nd.bideg = bideg;
  nd.odd = odd;
  nd.name = std::move(name);
  return OperatorFactory::make(std::move(nd));
}

Operator commutator(const Operator& f, const Operator& g) {
  ModelPtr m = common_model({f, g});
  if (f.is_zero_node() || g.is_zero_node()) return zero_operator(m);
  if (!f.odd() || !g.odd()) throw UsageError("commutator: operand of mixed parity; split it into homogeneous parts");
  Node n;
  n.kind = Kind::Bracket;
  n.model = m;
  n.children = {f, g};
  n.bideg = add_opt(f.bidegree(), g.bidegree());
  n.odd = xor_opt(f.odd(), g.odd());
  return OperatorFactory::make(std::move(n));
}

Operator derive(const Operator& f) {
  if (!f.model()) return f;
  return commutator(boundary(f.model()), f);
}

Operator derive(const Operator& f, int k) {
  Operator r = f;
  if (k <= 0 || !f.model()) return r;
  Operator d = boundary(f.model());
  for (int i = 0; i < k; ++i) r = commutator(d, r);
  return r;
}

Operator adjoint(const Operator& f) {
  const auto& nd = f.node();
  switch (nd.kind) {
    case Kind::Zero:
    case Kind::Identity:
    case Kind::Boundary:
      return f;
    case Kind::Scaled:
      return scale(nd.scalar, adjoint(nd.children[0]));
    case Kind::Sum: {
      std::vector<Operator> parts;
      for (const auto& c : nd.children) parts.push_back(adjoint(c));
      return sum(parts);
    }
    case Kind::Compose: {
      const auto& a = nd.children[0];
      const auto& b = nd.children[1];
      if (!a.odd() || !b.odd()) throw UsageError("adjoint: composition with a factor of mixed parity");
      Operator r = compose(adjoint(b), adjoint(a));
      return (*a.odd() && *b.odd()) ? scale(-1, r) : r;
    }
    case Kind::Bracket:
      return scale(-1, commutator(adjoint(nd.children[0]), adjoint(nd.children[1])));
    case Kind::Heisenberg:
    case Kind::Virasoro:
    case Kind::W: {
      Node r = nd;
      r.n = -nd.n;
      if (r.bideg) r.bideg = Bidegree{r.bideg->level * -1, r.bideg->cohdeg - 4 * r.bideg->level};
      Operator out = OperatorFactory::make(std::move(r));
      return sign_pow(nd.n) < 0 ? scale(-1, out) : out;
    }
    case Kind::Words: {
      const auto& m = *nd.model;
      NormalWord out(nd.model);
      for (const auto& [word, c] : nd.words->terms()) {
        // (f1 ... fr)^+ = (-1)^{sum_{i<j} |fi||fj|} fr^+ ... f1^+, fi^+ = (-1)^{ni} q_{-ni}
        int odd_seen = 0;
        int sign = 1;
        Word rev;
        for (const auto& s : word) {
          if (m.odd(s.label)) {
            if (odd_seen & 1) sign = -sign;
            ++odd_seen;
          }
          sign *= sign_pow(s.n);
        }
        for (auto it = word.rbegin(); it != word.rend(); ++it) rev.push_back(Symbol{-it->n, it->label});
        NormalWord nw = normal_order_word(rev, nd.model);
        for (const auto& [w2, c2] : nw.terms()) out.add(w2, c * c2 * sign);
      }
      return words(out);
    }
    case Kind::Custom:
      throw UnsupportedExpression("adjoint: no rule for operator '" + nd.name + "'");
  }
  throw UnsupportedExpression("adjoint: unsupported operator");
}

// ---------------------------------------------------------------------------
// Normal ordering of words

void NormalWord::add(const Word& w, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::size_t NormalWord::max_length() const {
  std::size_t l = 0;
  for (const auto& [w, c] : terms_) l = std::max(l, w.size());
  return l;
}

std::string NormalWord::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (first) {
      s += c.str();
    } else {
      s += c < 0 ? " - " + (-c).str() : " + " + c.str();
    }
    for (const auto& sym : w) s += "*q(" + std::to_string(sym.n) + "," + model_->label(sym.label) + ")";
    first = false;
  }
  return s;
}

namespace {

// Sorts a block of mutually supercommuting symbols: creators by (n desc, label
// asc), annihilators the same way on |n|. Returns 0 if an odd symbol repeats.
int sort_block(Word& w, std::size_t lo, std::size_t hi, const SurfaceModel& m) {
  int sign = 1;
  auto before = [](const Symbol& a, const Symbol& b) {
    const int an = std::abs(a.n);
    const int bn = std::abs(b.n);
    return an != bn ? an > bn : a.label < b.label;
  };
  for (std::size_t i = lo + 1; i < hi; ++i) {
    std::size_t j = i;
    while (j > lo && before(w[j], w[j - 1])) {
      if (m.odd(w[j].label) && m.odd(w[j - 1].label)) sign = -sign;
      std::swap(w[j], w[j - 1]);
      --j;
    }
  }
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (w[i] == w[i - 1] && m.odd(w[i].label)) return 0;
  }
  return sign;
}

}  // namespace

NormalWord normal_order_word(const Word& word, const ModelPtr& model) {
  const auto& m = *model;
  NormalWord out(model);
  std::vector<std::pair<Word, Rational>> work{{word, Rational(1)}};
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    if (std::any_of(w.begin(), w.end(), [](const Symbol& s) { return s.n == 0; })) continue;
    std::size_t i = 0;
    while (i + 1 < w.size() && !(w[i].n < 0 && w[i + 1].n > 0)) ++i;
    if (i + 1 >= w.size()) {
      auto split = static_cast<std::size_t>(
          std::find_if(w.begin(), w.end(), [](const Symbol& s) { return s.n < 0; }) - w.begin());
      int s1 = sort_block(w, 0, split, m);
      int s2 = s1 == 0 ? 0 : sort_block(w, split, w.size(), m);
      if (s1 * s2 != 0) out.add(w, c * (s1 * s2));
      continue;
    }
    // q_a(x) q_b(y) = (-1)^{|x||y|} q_b(y) q_a(x) + a delta_{a+b} integral(xy)
    const Symbol x = w[i];
    const Symbol y = w[i + 1];
    if (x.n + y.n == 0) {
      Rational g = m.pairing(x.label, y.label);
      if (!g.is_zero()) {
        Word contracted(w.begin(), w.begin() + static_cast<long>(i));
        contracted.insert(contracted.end(), w.begin() + static_cast<long>(i) + 2, w.end());
        work.emplace_back(std::move(contracted), c * g * Rational(x.n));
      }
    }
    std::swap(w[i], w[i + 1]);
    work.emplace_back(std::move(w), (m.odd(x.label) && m.odd(y.label)) ? -c : c);
  }
  return out;
}

NormalWord leading_term(const NormalWord& nw) {
  NormalWord out(nw.model());
  const std::size_t l = nw.max_length();
  for (const auto& [w, c] : nw.terms()) {
    if (w.size() == l) out.add(w, c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounded comparison

std::vector<FockVector> images_serial(const Operator& f, const std::vector<Monomial>& domain) {
  std::vector<FockVector> out;
  out.reserve(domain.size());
  for (const auto& u : domain) out.push_back(f.apply(u));
  return out;
}

std::vector<FockVector> images(const Operator& f, const std::vector<Monomial>& domain) {
  std::vector<FockVector> out(domain.size());
  std::exception_ptr error;
  const auto n = static_cast<long>(domain.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f.apply(domain[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(hv_images_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

Comparison equal_on(const Operator& f, const Operator& g, const std::vector<Monomial>& domain) {
  Comparison res;
  res.checked = domain.size();
  const auto n = static_cast<long>(domain.size());
  long first_bad = n;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8) reduction(min : first_bad)
  for (long i = 0; i < n; ++i) {
    try {
      const auto& u = domain[static_cast<std::size_t>(i)];
      if (!(f.apply(u) == g.apply(u))) first_bad = std::min(first_bad, i);
    } catch (...) {
#pragma omp critical(hv_equal_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  if (first_bad < n) {
    const auto& u = domain[static_cast<std::size_t>(first_bad)];
    res.equal = false;
    res.mismatch = Mismatch{u, f.apply(u), g.apply(u)};
  }
  return res;
}

Comparison equal_up_to(const Operator& f, const Operator& g, int max_level) {
  ModelPtr m = common_model({f, g});
  if (!m) return Comparison{};
  return equal_on(f, g, basis_up_to(max_level, *m));
}

Comparison equal_up_to_serial(const Operator& f, const Operator& g, int max_level) {
  Comparison res;
  ModelPtr m = common_model({f, g});
  if (!m) return res;
  for (const auto& u : basis_up_to(max_level, *m)) {
    ++res.checked;
    FockVector a = f.apply(u);
    FockVector b = g.apply(u);
    if (!(a == b)) {
      res.equal = false;
      res.mismatch = Mismatch{u, std::move(a), std::move(b)};
      return res;
    }
  }
  return res;
}

}  // namespace hv
