#include "hv/identities.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "evaluator.hpp"
#include "hv/linalg.hpp"
#include "json.hpp"

namespace hv {

namespace {

using Clock = std::chrono::steady_clock;
using detail::Id;
using detail::SVec;

constexpr std::size_t kChainTermCap = 2'000'000;
/// Interned monomials kept before compare() trims the space back to the domains.
constexpr std::size_t kSpaceCap = 4'000'000;
constexpr std::size_t kPruneDomainCap = 6000;

std::vector<int> nonzero_range(int b) {
  std::vector<int> r;
  for (int n = -b; n <= b; ++n) {
    if (n != 0) r.push_back(n);
  }
  return r;
}

std::vector<int> full_range(int b) {
  std::vector<int> r;
  for (int n = -b; n <= b; ++n) r.push_back(n);
  return r;
}

Rational pow_int(const Rational& x, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Expected value of a nested commutator chain.
struct Expected {
  std::optional<Operator> op;  ///< compare against this operator
  bool free_scalar = false;    ///< otherwise: some c * Id ...
  bool zero_scalar = false;    ///< ... with c = 0
};

struct Context {
  Context(ModelPtr mp, const CheckParams& p, CheckReport& r)
      : model(std::move(mp)),
        m(*model),
        params(p),
        rep(r),
        start(Clock::now()),
        ev(space),
        d(boundary(model)),
        one(m.basis_class(m.unit())) {
    domain = ids(basis_up_to(params.level, m));
    pinned = space.size();
  }

  ModelPtr model;
  const SurfaceModel& m;
  CheckParams params;
  CheckReport& rep;
  Clock::time_point start;
  detail::MonomialSpace space;
  detail::Evaluator ev;
  std::vector<Id> domain;
  Operator d;
  GradedClass one;
  std::map<std::tuple<char, int, int, Label>, Operator> table;
  std::map<int, std::vector<Id>> domains;
  /// Ids below this stay valid when the space is trimmed.
  std::size_t pinned = 0;

  int B() const { return params.index_bound; }
  int N() const { return params.level; }
  Label dim() const { return static_cast<Label>(m.dim()); }
  GradedClass e(Label l) const { return m.basis_class(l); }

  std::vector<Id> ids(const std::vector<Monomial>& ms) {
    std::vector<Id> out;
    out.reserve(ms.size());
    for (const auto& u : ms) out.push_back(space.id(u));
    return out;
  }

  FockVector apply(const Operator& f, const Monomial& u) { return space.to(ev.apply(f, space.id(u))); }
  FockVector apply(const Operator& f, const FockVector& v) { return space.to(ev.apply(f, space.from(v))); }

  bool expired() {
    if (params.time_limit <= 0) return false;
    if (std::chrono::duration<double>(Clock::now() - start).count() <= params.time_limit) return false;
    rep.status = Status::Incomplete;
    return true;
  }

  /// Generator on a basis class, shared across instances so that its images
  /// are cached once.
  Operator basis_gen(char kind, int k, int n, Label l) {
    auto key = std::make_tuple(kind, k, n, l);
    auto it = table.find(key);
    if (it != table.end()) return it->second;
    Operator f;
    switch (kind) {
      case 'q':
        f = q(n, e(l));
        break;
      case 'L':
        f = virasoro(n, e(l));
        break;
      case 'W':
        f = w(k, n, e(l));
        break;
      case 'D':
        f = derive(q(n, e(l)), k);
        ev.pin(f);
        break;
      default:
        throw std::logic_error("basis_gen: kind");
    }
    table.emplace(key, f);
    return f;
  }

  /// Linear extension of basis_gen to a class.
  Operator gen(char kind, int k, int n, const GradedClass& a) {
    std::vector<Operator> parts;
    for (const auto& [l, c] : a.terms()) parts.push_back(scale(c, basis_gen(kind, k, n, l)));
    return parts.empty() ? zero_operator(model) : sum(parts);
  }

  Operator qg(int n, const GradedClass& a) { return gen('q', 0, n, a); }
  Operator Lg(int n, const GradedClass& a) { return gen('L', 0, n, a); }
  Operator Wg(int k, int n, const GradedClass& a) { return gen('W', k, n, a); }
  Operator qk(int k, int n, const GradedClass& a) { return gen('D', k, n, a); }

  void fail(std::string instance, std::optional<Mismatch> mm) {
    rep.status = Status::Fail;
    rep.instance = std::move(instance);
    rep.mismatch = std::move(mm);
  }

  /// Returns false when the check must stop (failure or time limit).
  bool compare(const Operator& lhs, const Operator& rhs) {
    if (expired()) return false;
    if (space.size() > kSpaceCap) {
      ev.flush();
      space.truncate(pinned);
    }
    for (Id u : domain) {
      SVec a = ev.apply(lhs, u);
      SVec b = ev.apply(rhs, u);
      if (a != b) {
        fail(lhs.str() + " = " + rhs.str(), Mismatch{space.mono(u), space.to(a), space.to(b)});
        return false;
      }
    }
    ++rep.instances;
    return true;
  }

  const std::vector<Id>& domain_up_to(int level) {
    auto it = domains.find(level);
    if (it == domains.end()) {
      it = domains.emplace(level, ids(basis_up_to(level, m))).first;
      pinned = space.size();
    }
    return it->second;
  }

  std::size_t domain_size(int level) {
    std::size_t s = 0;
    for (auto x : level_dimensions(level, m)) s += x;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Nested commutator chains [...[[C0, q_{n1}(a1)], q_{n2}(a2)], ..., q_{nK}(aK)]

struct ChainSpec {
  int brackets = 0;
  std::vector<int> base_indices;
  std::function<Operator(int, Label)> base;
  std::function<Expected(const std::vector<int>&, const std::vector<Label>&)> expected;
  std::function<std::string(const std::vector<int>&, const std::vector<Label>&)> describe;
};

class Chain {
 public:
  Chain(Context& ctx, const ChainSpec& spec)
      : ctx_(ctx), spec_(spec), K_(spec.brackets), memo_(static_cast<std::size_t>(K_) + 1),
        ns_(static_cast<std::size_t>(K_) + 1), as_(static_cast<std::size_t>(K_) + 1),
        odd_(static_cast<std::size_t>(K_) + 1), prod_(static_cast<std::size_t>(K_) + 1, ctx.m.zero()),
        brs_(static_cast<std::size_t>(K_) + 1) {
    for (int n : nonzero_range(ctx_.B())) {
      for (Label a = 0; a < ctx_.dim(); ++a) choices_.emplace_back(n, a);
    }
  }

  /// Returns false when the check must stop.
  bool run() {
    for (int n0 : spec_.base_indices) {
      for (Label a0 = 0; a0 < ctx_.dim(); ++a0) {
        if (ctx_.expired()) return false;
        ns_[0] = n0;
        as_[0] = a0;
        odd_[0] = ctx_.m.odd(a0);
        prod_[0] = ctx_.e(a0);
        base_ = spec_.base(n0, a0);
        clear_from(0);
        if (!descend(1)) return false;
      }
    }
    return true;
  }

 private:
  void clear_from(int j) {
    for (int i = j; i <= K_; ++i) memo_[static_cast<std::size_t>(i)].clear();
  }

  std::size_t total_stored() const {
    std::size_t t = 0;
    for (const auto& m : memo_) t += m.stored();
    return t;
  }

  const SVec& eval(int j, Id u) {
    auto& memo = memo_[static_cast<std::size_t>(j)];
    if (const SVec* hit = memo.find(u)) return *hit;
    if (total_stored() > kChainTermCap) clear_from(0);
    SVec out;
    if (j == 0) {
      out = ctx_.ev.apply(base_, u);
    } else {
      const Operator& qj = brs_[static_cast<std::size_t>(j)];
      detail::SAccumulator acc;
      const SVec qu = ctx_.ev.apply(qj, u);
      for (const auto& [v, c] : qu) acc.add(eval(j - 1, v), c);
      const bool both_odd = odd_[static_cast<std::size_t>(j - 1)] && ctx_.m.odd(as_[static_cast<std::size_t>(j)]);
      const SVec cu = eval(j - 1, u);
      for (const auto& [v, c] : cu) ctx_.ev.apply_to(qj, v, both_odd ? c : -c, acc);
      out = acc.finish();
    }
    return memo.put(u, std::move(out));
  }

  std::size_t subtree_leaves(int depth_done) const {
    std::size_t r = 1;
    for (int i = depth_done + 1; i <= K_; ++i) r *= choices_.size();
    return r;
  }

  bool vanishes_on(int j, int level) {
    for (Id u : ctx_.domain_up_to(level)) {
      if (!eval(j, u).empty()) return false;
    }
    return true;
  }

  bool descend(int j) {
    if (j > K_) return leaf();
    for (const auto& [n, a] : choices_) {
      if (ctx_.expired()) return false;
      const auto sj = static_cast<std::size_t>(j);
      ns_[sj] = n;
      as_[sj] = a;
      odd_[sj] = odd_[sj - 1] != ctx_.m.odd(a);
      prod_[sj] = mul(prod_[sj - 1], ctx_.e(a));
      brs_[sj] = ctx_.basis_gen('q', 0, n, a);
      clear_from(j);
      if (j < K_ && prod_[sj].is_zero()) {
        const int level = ctx_.N() + (K_ - j) * ctx_.B();
        if (ctx_.domain_size(level) <= kPruneDomainCap && vanishes_on(j, level)) {
          const std::size_t leaves = subtree_leaves(j);
          ctx_.rep.instances += leaves;
          ctx_.rep.pruned += leaves;
          continue;
        }
      }
      if (!descend(j + 1)) return false;
    }
    return true;
  }

  bool leaf() {
    Expected ex = spec_.expected(ns_, as_);
    std::optional<Rational> scalar;
    for (Id u : ctx_.domain) {
      const SVec& lhs = eval(K_, u);
      SVec rhs;
      if (ex.op) {
        rhs = ctx_.ev.apply(*ex.op, u);
      } else {
        if (!scalar) {
          scalar = Rational(0);
          if (!ex.zero_scalar) {
            for (const auto& [v, c] : lhs) {
              if (v == u) scalar = c;
            }
          }
        }
        if (!scalar->is_zero()) rhs.emplace_back(u, *scalar);
      }
      if (lhs != rhs) {
        std::string what = spec_.describe(ns_, as_);
        if (ex.op) {
          what += " = " + ex.op->str();
        } else {
          what += ex.zero_scalar ? " = 0" : " = c*1";
        }
        ctx_.fail(what, Mismatch{ctx_.space.mono(u), ctx_.space.to(lhs), ctx_.space.to(rhs)});
        return false;
      }
    }
    ++ctx_.rep.instances;
    return true;
  }

  Context& ctx_;
  const ChainSpec& spec_;
  int K_;
  std::vector<detail::IdTable> memo_;
  std::vector<int> ns_;
  std::vector<Label> as_;
  std::vector<bool> odd_;
  std::vector<GradedClass> prod_;
  std::vector<Operator> brs_;
  std::vector<std::pair<int, Label>> choices_;
  Operator base_;
};

std::string chain_str(const std::string& head, const std::vector<int>& ns, const std::vector<Label>& as,
                      const SurfaceModel& m) {
  std::string s = head;
  for (std::size_t i = 1; i < ns.size(); ++i) s = "[" + s + ",q(" + std::to_string(ns[i]) + "," + m.label(as[i]) + ")]";
  return s;
}

GradedClass product_of(const std::vector<Label>& as, const SurfaceModel& m) {
  GradedClass p = m.basis_class(as[0]);
  for (std::size_t i = 1; i < as.size(); ++i) p = mul(p, m.basis_class(as[i]));
  return p;
}

// ---------------------------------------------------------------------------
// Checks

void check_heisenberg(Context& c) {
  for (int n : nonzero_range(c.B())) {
    for (int mm : nonzero_range(c.B())) {
      for (Label a = 0; a < c.dim(); ++a) {
        for (Label b = 0; b < c.dim(); ++b) {
          Operator lhs = commutator(c.qg(n, c.e(a)), c.qg(mm, c.e(b)));
          Rational k = n + mm == 0 ? Rational(n) * c.m.pairing(a, b) : Rational(0);
          if (!c.compare(lhs, scale(k, identity(c.model)))) return;
        }
      }
    }
  }
}

void check_virasoro_q(Context& c) {
  for (int n : full_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      for (int mm : nonzero_range(c.B())) {
        for (Label b = 0; b < c.dim(); ++b) {
          Operator lhs = commutator(c.Lg(n, c.e(a)), c.qg(mm, c.e(b)));
          Operator rhs = scale(-mm, c.qg(n + mm, mul(c.e(a), c.e(b))));
          if (!c.compare(lhs, rhs)) return;
        }
      }
    }
  }
}

void check_virasoro_virasoro(Context& c) {
  const GradedClass euler = euler_class(c.m);
  for (int n : full_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      for (int mm : full_range(c.B())) {
        for (Label b = 0; b < c.dim(); ++b) {
          const GradedClass ab = mul(c.e(a), c.e(b));
          Operator lhs = commutator(c.Lg(n, c.e(a)), c.Lg(mm, c.e(b)));
          Rational central = n + mm == 0 ? Rational(n * n * n - n, 12) * integrate(mul(euler, ab)) : Rational(0);
          Operator rhs = scale(n - mm, c.Lg(n + mm, ab)) - scale(central, identity(c.model));
          if (!c.compare(lhs, rhs)) return;
        }
      }
    }
  }
  if (c.B() >= 2 && c.rep.status == Status::Pass) {
    Rational central = Rational(6, 12) * integrate(euler);
    c.rep.note = "central[L(2,1),L(-2,1)]=" + (-central).str();
  }
}

Operator qprime_formula(Context& c, int n, const GradedClass& a) {
  const GradedClass ka = mul(c.m.canonical_class(), a);
  return scale(n, c.Lg(n, a)) + scale(Rational(n * (std::abs(n) - 1), 2), c.qg(n, ka));
}

void check_qprime_neg(Context& c) {
  for (int n = -c.B(); n <= -1; ++n) {
    for (Label a = 0; a < c.dim(); ++a) {
      if (!c.compare(commutator(c.d, c.qg(n, c.e(a))), qprime_formula(c, n, c.e(a)))) return;
    }
  }
}

void check_qprime_q(Context& c) {
  const GradedClass K = c.m.canonical_class();
  for (int n : nonzero_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      Operator qp = c.qk(1, n, c.e(a));
      for (int mm : nonzero_range(c.B())) {
        for (Label b = 0; b < c.dim(); ++b) {
          const GradedClass ab = mul(c.e(a), c.e(b));
          Operator lhs = commutator(qp, c.qg(mm, c.e(b)));
          Rational central = n + mm == 0 ? Rational(std::abs(n) - 1, 2) * integrate(mul(K, ab)) : Rational(0);
          Operator rhs = scale(-n * mm, c.qg(n + mm, ab) + scale(central, identity(c.model)));
          if (!c.compare(lhs, rhs)) return;
        }
      }
    }
  }
}

void run_chain(Context& c, const ChainSpec& spec) {
  Chain chain(c, spec);
  chain.run();
}

void check_nested_37(Context& c) {
  const GradedClass K = c.m.canonical_class();
  for (int k = 1; k <= c.params.depth; ++k) {
    ChainSpec s;
    s.brackets = k;
    s.base_indices = nonzero_range(c.B());
    s.base = [&c, k](int n0, Label a0) { return c.qk(k, n0, c.e(a0)); };
    s.expected = [&c, &K, k](const std::vector<int>& ns, const std::vector<Label>& as) {
      Expected ex;
      int total = 0;
      Rational coef = Rational(sign_pow(k)) * factorial(k) * pow_int(Rational(ns[0]), k);
      for (std::size_t i = 0; i < ns.size(); ++i) total += ns[i];
      for (std::size_t i = 1; i < ns.size(); ++i) coef *= ns[i];
      const GradedClass prod = product_of(as, c.m);
      if (total != 0) {
        ex.op = scale(coef, c.qg(total, prod));
      } else {
        ex.free_scalar = true;
        ex.zero_scalar = integrate(mul(K, prod)).is_zero();
      }
      return ex;
    };
    s.describe = [&c, k](const std::vector<int>& ns, const std::vector<Label>& as) {
      return chain_str("D^" + std::to_string(k) + "(q(" + std::to_string(ns[0]) + "," + c.m.label(as[0]) + "))", ns,
                       as, c.m);
    };
    run_chain(c, s);
    if (c.rep.status != Status::Pass) return;
  }
}

void check_nested_39(Context& c) {
  for (int k = 0; k <= c.params.depth; ++k) {
    ChainSpec s;
    s.brackets = k + 1;
    s.base_indices = nonzero_range(c.B());
    s.base = [&c, k](int n0, Label a0) { return c.qk(k, n0, c.e(a0)); };
    s.expected = [&c, k](const std::vector<int>& ns, const std::vector<Label>& as) {
      Expected ex;
      int total = 0;
      for (int n : ns) total += n;
      Rational coef = factorial(k) * pow_int(Rational(ns[0]), k);
      for (std::size_t i = 1; i < ns.size(); ++i) coef *= -ns[i];
      coef = total == 0 ? coef * integrate(product_of(as, c.m)) : Rational(0);
      ex.op = scale(coef, identity(c.model));
      return ex;
    };
    s.describe = [&c, k](const std::vector<int>& ns, const std::vector<Label>& as) {
      return chain_str("D^" + std::to_string(k) + "(q(" + std::to_string(ns[0]) + "," + c.m.label(as[0]) + "))", ns,
                       as, c.m);
    };
    run_chain(c, s);
    if (c.rep.status != Status::Pass) return;
  }
}

void check_nested_w(Context& c, bool central) {
  for (int k = 1; k <= c.params.depth; ++k) {
    ChainSpec s;
    s.brackets = central ? k : k - 1;
    s.base_indices = full_range(c.B());
    s.base = [&c, k](int n0, Label a0) { return c.basis_gen('W', k, n0, a0); };
    s.expected = [&c, central](const std::vector<int>& ns, const std::vector<Label>& as) {
      Expected ex;
      int total = 0;
      for (int n : ns) total += n;
      Rational coef = 1;
      for (std::size_t i = 1; i < ns.size(); ++i) coef *= -ns[i];
      const GradedClass prod = product_of(as, c.m);
      if (central) {
        coef = total == 0 ? coef * integrate(prod) : Rational(0);
        ex.op = scale(coef, identity(c.model));
      } else {
        ex.op = scale(coef, c.qg(total, prod));
      }
      return ex;
    };
    s.describe = [&c, k](const std::vector<int>& ns, const std::vector<Label>& as) {
      return chain_str("W(" + std::to_string(k) + "," + std::to_string(ns[0]) + "," + c.m.label(as[0]) + ")", ns, as,
                       c.m);
    };
    run_chain(c, s);
    if (c.rep.status != Status::Pass) return;
  }
}

void check_transfer_317(Context& c) {
  for (int k = 0; k <= c.params.depth; ++k) {
    for (int n0 : nonzero_range(c.B())) {
      Operator base_one = c.qk(k, n0, c.one);
      for (Label a0 = 0; a0 < c.dim(); ++a0) {
        Operator base = c.qk(k, n0, c.e(a0));
        for (int n1 : nonzero_range(c.B())) {
          for (Label a1 = 0; a1 < c.dim(); ++a1) {
            const GradedClass prod = mul(c.e(a0), c.e(a1));
            Operator lhs = commutator(base, c.qg(n1, c.e(a1)));
            Operator mid = commutator(base_one, c.qg(n1, prod));
            Operator right = commutator(c.qk(k, n0, prod), c.qg(n1, c.one));
            if (!c.compare(lhs, mid) || !c.compare(mid, right)) return;
          }
        }
      }
    }
  }
}

void check_w_q_46(Context& c) {
  for (int k = 2; k <= c.params.depth; ++k) {
    for (int n : full_range(c.B())) {
      for (Label a = 0; a < c.dim(); ++a) {
        for (int mm : nonzero_range(c.B())) {
          for (Label b = 0; b < c.dim(); ++b) {
            Operator lhs = commutator(c.Wg(k, n, c.e(a)), c.qg(mm, c.e(b)));
            Operator rhs = scale(-mm, c.Wg(k - 1, n + mm, mul(c.e(a), c.e(b))));
            if (!c.compare(lhs, rhs)) return;
          }
        }
      }
    }
  }
}

void check_w1_eq_q(Context& c) {
  for (int n : full_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      if (!c.compare(w(1, n, c.e(a)), c.qg(n, c.e(a)))) return;
    }
  }
}

void check_w2_eq_L(Context& c) {
  for (int n : full_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      if (!c.compare(c.Wg(2, n, c.e(a)), c.Lg(n, c.e(a)))) return;
    }
  }
}

Operator level_times_identity(const ModelPtr& m) {
  return custom(
      m, [](const Monomial& u, const Rational& c, FockAccumulator& out) { out.add(u, c * u.level()); }, Bidegree{},
      false, "n*1");
}

void check_g0_unit(Context& c) {
  c.compare(scale(-1, c.Wg(2, 0, c.one)), level_times_identity(c.model));
}

void check_g0_is_minus_w2(Context& c) {
  for (Label g = 0; g < c.dim(); ++g) {
    Operator g0 = scale(-1, c.Wg(2, 0, c.e(g)));
    if (!c.compare(g0, scale(-1, c.Lg(0, c.e(g))))) return;
    for (int n : nonzero_range(c.B())) {
      for (Label a = 0; a < c.dim(); ++a) {
        Operator lhs = commutator(g0, c.qg(n, c.e(a)));
        Operator rhs = commutator(scale(-1, c.Lg(0, c.one)), c.qg(n, mul(c.e(g), c.e(a))));
        if (!c.compare(lhs, rhs)) return;
      }
    }
  }
}

void check_d_eq_minus_w03(Context& c) {
  if (!c.m.canonical_trivial()) {
    c.rep.status = Status::Skip;
    c.rep.note = "K_X != 0";
    return;
  }
  c.compare(c.d, scale(-1, c.Wg(3, 0, c.one)));
}

/// Monomial pairing nontrivially with u: every label replaced by a partner
/// with nonzero Gram entry (the first one).
std::optional<Monomial> partner(const Monomial& u, const SurfaceModel& m) {
  std::vector<Part> parts;
  for (const auto& p : u.parts()) {
    std::optional<Label> b;
    for (Label l = 0; l < m.dim() && !b; ++l) {
      if (!m.pairing(p.label, l).is_zero()) b = l;
    }
    if (!b) return std::nullopt;
    parts.push_back(Part{p.n, *b});
  }
  auto [sign, mono] = normalize(parts, m);
  if (sign == 0) return std::nullopt;
  return mono;
}

void check_adjoint(Context& c) {
  std::vector<Operator> ops;
  for (int n : full_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      if (n != 0) ops.push_back(q(n, c.e(a)));
      ops.push_back(c.Lg(n, c.e(a)));
      ops.push_back(c.Wg(3, n, c.e(a)));
    }
  }
  ops.push_back(c.d);
  for (int n : nonzero_range(c.B())) {
    for (Label a = 0; a < c.dim(); ++a) {
      ops.push_back(c.qk(1, n, c.e(a)));
      for (Label b = 0; b < c.dim(); ++b) {
        ops.push_back(q(n, c.e(a)) * q(-1, c.e(b)));
        ops.push_back(commutator(c.Lg(n, c.e(a)), q(1, c.e(b))));
      }
    }
  }
  std::vector<std::vector<Monomial>> by_level;
  for (int l = 0; l <= c.N(); ++l) by_level.push_back(basis(l, c.m));
  constexpr int kSamples = 6;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (c.expired()) return;
    const Operator& f = ops[i];
    const Operator fa = adjoint(f);
    const bool f_odd = *f.odd();
    const int shift = f.bidegree()->level;
    std::mt19937 rng(static_cast<std::uint32_t>(7919 * i + 17));
    std::uniform_int_distribution<std::size_t> pick(0, c.domain.size() - 1);
    for (int s = 0; s < kSamples; ++s) {
      const Monomial u = c.space.mono(c.domain[pick(rng)]);
      const int target = u.level() + shift;
      if (target < 0) continue;
      const FockVector fu = c.apply(f, u);
      std::vector<Monomial> vs;
      for (std::size_t t = 0; t < fu.terms().size() && t < 3; ++t) {
        if (auto p = partner(fu.terms()[t].first, c.m)) vs.push_back(*p);
      }
      if (target <= c.N() && !by_level[static_cast<std::size_t>(target)].empty()) {
        const auto& pool = by_level[static_cast<std::size_t>(target)];
        std::uniform_int_distribution<std::size_t> pv(0, pool.size() - 1);
        vs.push_back(pool[pv(rng)]);
      }
      for (const auto& v : vs) {
        const Rational lhs = pair_fock(fu, FockVector::of(v), c.m);
        Rational rhs = pair_fock(FockVector::of(u), c.apply(fa, v), c.m);
        if (f_odd && u.odd(c.m)) rhs = -rhs;
        if (!(lhs == rhs)) {
          c.fail("<" + f.str() + " u, v> = <u, " + fa.str() + " v> with v = " + v.str(c.m),
                 Mismatch{u, FockVector::of(Monomial{}, lhs), FockVector::of(Monomial{}, rhs)});
          return;
        }
      }
    }
    ++c.rep.instances;
  }
}

/// Rows of the pairing on one level: for each basis monomial u, the nonzero
/// values <u, v>.
std::vector<std::vector<std::pair<std::size_t, Rational>>> pairing_rows(const std::vector<Monomial>& b,
                                                                         const SurfaceModel& m) {
  std::unordered_map<Monomial, std::size_t, MonomialHash> index;
  for (std::size_t i = 0; i < b.size(); ++i) index.emplace(b[i], i);
  std::vector<std::vector<Label>> partners(m.dim());
  for (Label a = 0; a < m.dim(); ++a) {
    for (Label l = 0; l < m.dim(); ++l) {
      if (!m.pairing(a, l).is_zero()) partners[a].push_back(l);
    }
  }
  std::vector<std::vector<std::pair<std::size_t, Rational>>> rows(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& parts = b[i].parts();
    std::vector<Part> word(parts.begin(), parts.end());
    std::map<std::size_t, bool> seen;
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == parts.size()) {
        auto [sign, mono] = normalize(word, m);
        if (sign == 0) return;
        auto it = index.find(mono);
        if (it == index.end() || seen.count(it->second)) return;
        seen[it->second] = true;
        Rational v = pair_fock(b[i], FockVector::of(mono), m);
        if (!v.is_zero()) rows[i].emplace_back(it->second, v);
        return;
      }
      for (Label l : partners[parts[pos].label]) {
        word[pos].label = l;
        self(self, pos + 1);
      }
    };
    rec(rec, 0);
    std::sort(rows[i].begin(), rows[i].end());
  }
  return rows;
}

void check_d_selfadjoint(Context& c) {
  for (int l = 0; l <= c.N(); ++l) {
    if (c.expired()) return;
    const auto b = basis(l, c.m);
    std::unordered_map<Monomial, std::size_t, MonomialHash> index;
    for (std::size_t i = 0; i < b.size(); ++i) index.emplace(b[i], i);
    const auto P = pairing_rows(b, c.m);
    std::vector<std::vector<std::pair<std::size_t, Rational>>> M(b.size());   // M[u] = d u
    std::vector<std::vector<std::pair<std::size_t, Rational>>> Mt(b.size());  // Mt[w] = {(v, coef of w in d v)}
    for (std::size_t v = 0; v < b.size(); ++v) {
      const FockVector dv = c.apply(c.d, b[v]);
      for (const auto& [w, x] : dv.terms()) {
        const std::size_t wi = index.at(w);
        M[v].emplace_back(wi, x);
        Mt[wi].emplace_back(v, x);
      }
    }
    for (std::size_t u = 0; u < b.size(); ++u) {
      std::map<std::size_t, Rational> left;   // v -> <d u, v>
      std::map<std::size_t, Rational> right;  // v -> <u, d v>
      for (const auto& [w, x] : M[u]) {
        for (const auto& [v, p] : P[w]) left[v] += x * p;
      }
      for (const auto& [w, p] : P[u]) {
        for (const auto& [v, x] : Mt[w]) right[v] += p * x;
      }
      std::erase_if(left, [](const auto& kv) { return kv.second.is_zero(); });
      std::erase_if(right, [](const auto& kv) { return kv.second.is_zero(); });
      if (left != right) {
        std::size_t v = b.size();
        for (const auto& [k, x] : left) {
          if (!right.count(k) || !(right[k] == x)) v = std::min(v, k);
        }
        for (const auto& [k, x] : right) {
          if (!left.count(k) || !(left[k] == x)) v = std::min(v, k);
        }
        c.fail("<d u, v> = <u, d v> with v = " + b[v].str(c.m),
               Mismatch{b[u], FockVector::of(Monomial{}, left.count(v) ? left[v] : Rational(0)),
                        FockVector::of(Monomial{}, right.count(v) ? right[v] : Rational(0))});
        return;
      }
      ++c.rep.instances;
    }
  }
}

void check_pairing_nondegenerate(Context& c) {
  for (int l = 0; l <= c.N(); ++l) {
    if (c.expired()) return;
    const auto b = basis(l, c.m);
    const auto P = pairing_rows(b, c.m);
    Echelon e;
    for (const auto& row : P) {
      SparseRow r;
      for (const auto& [j, x] : row) r.emplace(j, to_mpq(x));
      e.insert(std::move(r));
    }
    if (e.rank() != b.size()) {
      c.fail("rank of the pairing on level " + std::to_string(l) + " is " + std::to_string(e.rank()) + " < " +
                 std::to_string(b.size()),
             std::nullopt);
      return;
    }
    ++c.rep.instances;
  }
}

void check_coassoc(Context& c) {
  for (Label a = 0; a < c.dim(); ++a) {
    const TensorClass t2 = diag_push(c.e(a), 2);
    const TensorClass t3 = diag_push(c.e(a), 3);
    if (!(t2.swapped() == t2)) {
      c.fail("swap(tau2(" + c.m.label(a) + ")) = tau2(" + c.m.label(a) + ")", std::nullopt);
      return;
    }
    if (!(t2.push_leg(0) == t3) || !(t2.push_leg(1) == t3)) {
      c.fail("(tau2 x id) tau2(" + c.m.label(a) + ") = (id x tau2) tau2(" + c.m.label(a) + ")", std::nullopt);
      return;
    }
    ++c.rep.instances;
  }
}

struct CheckDef {
  const char* id;
  std::optional<int> depth;
  void (*run)(Context&);
};

const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> defs = {
      {"heisenberg", std::nullopt, check_heisenberg},
      {"virasoro_q", std::nullopt, check_virasoro_q},
      {"virasoro_virasoro", std::nullopt, check_virasoro_virasoro},
      {"qprime_neg", std::nullopt, check_qprime_neg},
      {"qprime_q", std::nullopt, check_qprime_q},
      {"nested_37", 3, check_nested_37},
      {"nested_39", 3, check_nested_39},
      {"transfer_317", 3, check_transfer_317},
      {"w_q_46", 4, check_w_q_46},
      {"nested_w_410a", 4, [](Context& c) { check_nested_w(c, false); }},
      {"nested_w_410b", 4, [](Context& c) { check_nested_w(c, true); }},
      {"w1_eq_q", std::nullopt, check_w1_eq_q},
      {"w2_eq_L", std::nullopt, check_w2_eq_L},
      {"g0_unit_56", std::nullopt, check_g0_unit},
      {"g0_is_minusW2_513iv", std::nullopt, check_g0_is_minus_w2},
      {"d_eq_minusW03_514", std::nullopt, check_d_eq_minus_w03},
      {"adjoint_28", std::nullopt, check_adjoint},
      {"d_selfadjoint", std::nullopt, check_d_selfadjoint},
      {"pairing_nondegenerate", std::nullopt, check_pairing_nondegenerate},
      {"coassoc_tau", std::nullopt, check_coassoc},
  };
  return defs;
}

const CheckDef& find_check(std::string_view id) {
  for (const auto& d : registry()) {
    if (id == d.id) return d;
  }
  throw UsageError("unknown check id '" + std::string(id) + "'");
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    case Status::Skip:
      return "SKIP";
    case Status::Incomplete:
      return "INCOMPLETE";
  }
  return "?";
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> r;
    for (const auto& d : registry()) r.emplace_back(d.id);
    return r;
  }();
  return ids;
}

std::optional<int> default_depth(std::string_view id) { return find_check(id).depth; }

std::string CheckReport::param_str() const {
  std::string s = "model=" + model + " N=" + std::to_string(params.level) + " B=" + std::to_string(params.index_bound);
  if (default_depth(id)) s += " k=" + std::to_string(params.depth);
  return s;
}

std::string CheckReport::line(const SurfaceModel& m) const {
  std::string s = "CHECK " + id + " " + param_str() + " " + std::string(status_name(status));
  if (status == Status::Fail) {
    if (mismatch) {
      s += " witness=" + mismatch->witness.str(m) + " instance=" + quote(instance) + " lhs=" + quote(mismatch->lhs.str(m)) +
           " rhs=" + quote(mismatch->rhs.str(m));
    } else {
      s += " witness=" + quote(instance);
    }
  } else if (status == Status::Skip) {
    s += " reason=" + quote(note);
  } else if (status == Status::Incomplete) {
    s += " checked=" + std::to_string(instances);
  }
  return s;
}

CheckReport run_check(std::string_view id, const ModelPtr& model, const CheckParams& params) {
  const CheckDef& def = find_check(id);
  if (params.level < 0) throw UsageError("level must be >= 0");
  if (params.index_bound < 1) throw UsageError("index bound must be >= 1");
  CheckReport rep;
  rep.id = def.id;
  rep.model = model->name();
  rep.params = params;
  if (def.depth) {
    if (rep.params.depth < 0) rep.params.depth = *def.depth;
    if (rep.params.depth > 8) throw UsageError("depth must be <= 8");
  } else {
    rep.params.depth = -1;
  }
  const auto t0 = Clock::now();
  Context ctx(model, rep.params, rep);
  def.run(ctx);
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

std::size_t SuiteReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [s](const CheckReport& r) { return r.status == s; }));
}

int SuiteReport::exit_code() const { return count(Status::Fail) > 0 ? 1 : 0; }

SuiteReport run_suite(const std::vector<std::string>& ids, const ModelPtr& model, const CheckParams& params) {
  for (const auto& id : ids) find_check(id);
  SuiteReport out;
  out.model = model->name();
  out.checks.resize(ids.size());
  std::exception_ptr error;
  const auto n = static_cast<long>(ids.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out.checks[static_cast<std::size_t>(i)] = run_check(ids[static_cast<std::size_t>(i)], model, params);
    } catch (...) {
#pragma omp critical(hv_suite_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::string to_text(const SuiteReport& r, const SurfaceModel& m) {
  std::string s;
  for (const auto& c : r.checks) s += c.line(m) + "\n";
  s += "SUMMARY model=" + r.model + " pass=" + std::to_string(r.count(Status::Pass)) +
       " fail=" + std::to_string(r.count(Status::Fail)) + " skip=" + std::to_string(r.count(Status::Skip)) +
       " incomplete=" + std::to_string(r.count(Status::Incomplete)) + "\n";
  return s;
}

std::string to_json(const SuiteReport& r, const SurfaceModel& m) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json x;
    x["id"] = c.id;
    x["level"] = c.params.level;
    x["index_bound"] = c.params.index_bound;
    if (c.params.depth >= 0) x["depth"] = c.params.depth;
    x["status"] = std::string(status_name(c.status));
    x["instances"] = c.instances;
    x["pruned"] = c.pruned;
    if (!c.note.empty()) x["note"] = c.note;
    if (c.status == Status::Fail) {
      x["instance"] = c.instance;
      if (c.mismatch) {
        x["witness"] = c.mismatch->witness.str(m);
        x["lhs"] = c.mismatch->lhs.str(m);
        x["rhs"] = c.mismatch->rhs.str(m);
      }
    }
    j["checks"].push_back(std::move(x));
  }
  j["summary"] = {{"pass", r.count(Status::Pass)},
                  {"fail", r.count(Status::Fail)},
                  {"skip", r.count(Status::Skip)},
                  {"incomplete", r.count(Status::Incomplete)}};
  return j.dump(2) + "\n";
}

}  // namespace hv
