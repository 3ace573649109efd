#include "hv/frobenius.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hv {

namespace {

/// Gauss-Jordan inverse of a small dense matrix. Returns nullopt if singular.
std::optional<std::vector<Rational>> invert(std::vector<Rational> a, std::size_t n) {
  std::vector<Rational> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv * n + col].is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    }
    Rational p = a[col * n + col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col * n + j] /= p;
      inv[col * n + j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r * n + col].is_zero()) continue;
      Rational f = a[r * n + col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

}  // namespace

// ---------------------------------------------------------------------------
// SurfaceModel

std::shared_ptr<const SurfaceModel> SurfaceModel::build(const ModelSpec& spec) {
  std::shared_ptr<SurfaceModel> m(new SurfaceModel());
  m->spec_ = spec;
  m->name_ = spec.name;
  if (spec.basis.empty()) throw ModelError("basis: must not be empty");
  if (spec.basis.size() > 255) throw ModelError("basis: more than 255 elements");
  for (std::size_t i = 0; i < spec.basis.size(); ++i) {
    const auto& b = spec.basis[i];
    if (b.label.empty()) throw ModelError("basis[" + std::to_string(i) + "].label: empty");
    if (b.degree < 0 || b.degree > 4) {
      throw ModelError("basis[" + std::to_string(i) + "].degree: must be in 0..4");
    }
    if (!m->by_label_.emplace(b.label, static_cast<Label>(i)).second) {
      throw ModelError("basis[" + std::to_string(i) + "].label: duplicate label '" + b.label + "'");
    }
    m->labels_.push_back(b.label);
    m->degrees_.push_back(b.degree);
  }
  const std::size_t n = m->dim();

  auto lookup = [&](const std::string& label, const std::string& field) -> Label {
    auto it = m->by_label_.find(label);
    if (it == m->by_label_.end()) throw ModelError(field + ": unknown label '" + label + "'");
    return it->second;
  };
  auto dense = [&](const LabeledCoeffs& lc, const std::string& field) {
    std::vector<Rational> v(n);
    for (std::size_t i = 0; i < lc.size(); ++i) {
      v[lookup(lc[i].first, field + "[" + std::to_string(i) + "].label")] += lc[i].second;
    }
    return v;
  };

  if (spec.unit.empty()) throw ModelError("unit: missing");
  m->unit_ = lookup(spec.unit, "unit");
  if (m->degrees_[m->unit_] != 0) throw ModelError("unit: '" + spec.unit + "' is not of degree 0");

  std::vector<std::vector<Rational>> table(n * n, std::vector<Rational>(n));
  std::set<std::pair<Label, Label>> seen;
  for (std::size_t p = 0; p < spec.products.size(); ++p) {
    const auto& e = spec.products[p];
    const std::string field = "products[" + std::to_string(p) + "]";
    Label l = lookup(e.left, field + ".left");
    Label r = lookup(e.right, field + ".right");
    if (l > r) throw ModelError(field + ": left must not come after right in basis order");
    if (!seen.emplace(l, r).second) throw ModelError(field + ": duplicate product entry");
    if (m->degrees_[l] + m->degrees_[r] > 4) continue;
    auto v = dense(e.result, field + ".result");
    table[l * n + r] = v;
    if (l != r) {
      int s = sign_pow(m->degrees_[l] * m->degrees_[r]);
      for (auto& c : v) c *= s;
      table[r * n + l] = v;
    }
  }
  m->products_.resize(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!table[i][k].is_zero()) m->products_[i].emplace_back(static_cast<Label>(k), table[i][k]);
    }
  }

  m->integral_ = dense(spec.integral, "integral");
  m->canonical_ = dense(spec.canonical, "canonical");

  m->gram_.assign(n * n, Rational(0));
  for (Label i = 0; i < n; ++i) {
    for (Label j = 0; j < n; ++j) {
      Rational s;
      for (const auto& [k, c] : m->product(i, j)) s += c * m->integral_[k];
      m->gram_[i * n + j] = s;
    }
  }
  if (auto inv = invert(m->gram_, n)) {
    // integral(e_i * dual_j) = delta_ij  <=>  G * D = I, dual_j = sum_l D[l][j] e_l.
    m->nondegenerate_ = true;
    m->dual_.assign(n, std::vector<Rational>(n));
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) m->dual_[j][l] = (*inv)[l * n + j];
    }
  }
  return m;
}

std::optional<Label> SurfaceModel::find(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

Label SurfaceModel::index(std::string_view label) const {
  auto l = find(label);
  if (!l) throw UsageError("unknown basis label '" + std::string(label) + "' in model " + name_);
  return *l;
}

const std::vector<Rational>& SurfaceModel::dual(Label j) const {
  if (!nondegenerate_) throw UsageError("model " + name_ + " has a degenerate pairing");
  return dual_[j];
}

GradedClass SurfaceModel::basis_class(Label i) const {
  std::vector<Rational> c(dim());
  c[i] = 1;
  return GradedClass(ptr(), std::move(c));
}

GradedClass SurfaceModel::zero() const { return GradedClass(ptr(), std::vector<Rational>(dim())); }

GradedClass SurfaceModel::canonical_class() const { return GradedClass(ptr(), canonical_); }

bool SurfaceModel::canonical_trivial() const {
  return std::all_of(canonical_.begin(), canonical_.end(), [](const Rational& c) { return c.is_zero(); });
}

// ---------------------------------------------------------------------------
// GradedClass

GradedClass::GradedClass(ModelPtr model, std::vector<Rational> coeffs)
    : model_(std::move(model)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != model_->dim()) throw UsageError("class size does not match model dimension");
}

bool GradedClass::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c.is_zero(); });
}

std::optional<int> GradedClass::degree() const {
  std::optional<int> d;
  for (Label i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    if (d && *d != model_->degree(i)) return std::nullopt;
    d = model_->degree(i);
  }
  return d;
}

std::optional<bool> GradedClass::odd() const {
  std::optional<bool> p;
  for (Label i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    if (p && *p != model_->odd(i)) return std::nullopt;
    p = model_->odd(i);
  }
  return p.value_or(false);
}

GradedClass GradedClass::component(int d) const {
  GradedClass r = *this;
  for (Label i = 0; i < coeffs_.size(); ++i) {
    if (model_->degree(i) != d) r.coeffs_[i] = 0;
  }
  return r;
}

std::vector<std::pair<Label, Rational>> GradedClass::terms() const {
  std::vector<std::pair<Label, Rational>> t;
  for (Label i = 0; i < coeffs_.size(); ++i) {
    if (!coeffs_[i].is_zero()) t.emplace_back(i, coeffs_[i]);
  }
  return t;
}

GradedClass& GradedClass::operator+=(const GradedClass& o) {
  if (model_ != o.model_) throw UsageError("classes from different models");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

GradedClass& GradedClass::operator-=(const GradedClass& o) {
  if (model_ != o.model_) throw UsageError("classes from different models");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

GradedClass& GradedClass::operator*=(const Rational& c) {
  for (auto& x : coeffs_) x *= c;
  return *this;
}

bool operator==(const GradedClass& a, const GradedClass& b) {
  return a.model_ == b.model_ && a.coeffs_ == b.coeffs_;
}

std::string GradedClass::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, c] : terms()) {
    if (!first) os << " + ";
    os << c << "*" << model_->label(i);
    first = false;
  }
  return first ? "0" : os.str();
}

GradedClass mul(const GradedClass& a, const GradedClass& b) {
  if (a.model() != b.model()) throw UsageError("mul: classes from different models");
  const auto& m = *a.model();
  std::vector<Rational> out(m.dim());
  for (const auto& [i, ci] : a.terms()) {
    for (const auto& [j, cj] : b.terms()) {
      Rational c = ci * cj;
      for (const auto& [k, ck] : m.product(i, j)) out[k] += c * ck;
    }
  }
  return GradedClass(a.model(), std::move(out));
}

Rational integrate(const GradedClass& a) {
  Rational s;
  for (const auto& [i, c] : a.terms()) s += c * a.model()->integral(i);
  return s;
}

// ---------------------------------------------------------------------------
// TensorClass

TensorClass::TensorClass(ModelPtr model, std::size_t k) : model_(std::move(model)), k_(k) {}

void TensorClass::add(const Key& key, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TensorClass TensorClass::decomposable(ModelPtr model, const Key& key, Rational c) {
  TensorClass t(std::move(model), key.size());
  t.add(key, c);
  return t;
}

TensorClass operator*(const TensorClass& a, const TensorClass& b) {
  if (a.model_ != b.model_ || a.k_ != b.k_) throw UsageError("tensor product of incompatible classes");
  const auto& m = *a.model_;
  TensorClass out(a.model_, a.k_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      // sign: b_l moves past a_m for every l < m
      int odd_a_after = 0;
      int sgn = 1;
      for (std::size_t l = a.k_; l-- > 0;) {
        if (m.odd(kb[l]) && (odd_a_after & 1)) sgn = -sgn;
        if (m.odd(ka[l])) ++odd_a_after;
      }
      // expand leg products
      std::vector<std::pair<TensorClass::Key, Rational>> partial{{{}, ca * cb * sgn}};
      for (std::size_t l = 0; l < a.k_ && !partial.empty(); ++l) {
        std::vector<std::pair<TensorClass::Key, Rational>> next;
        for (const auto& [key, c] : partial) {
          for (const auto& [r, cr] : m.product(ka[l], kb[l])) {
            auto k2 = key;
            k2.push_back(r);
            next.emplace_back(std::move(k2), c * cr);
          }
        }
        partial = std::move(next);
      }
      for (const auto& [key, c] : partial) out.add(key, c);
    }
  }
  return out;
}

TensorClass operator+(const TensorClass& a, const TensorClass& b) {
  if (a.model_ != b.model_ || a.k_ != b.k_) throw UsageError("sum of incompatible tensor classes");
  TensorClass out = a;
  for (const auto& [k, c] : b.terms_) out.add(k, c);
  return out;
}

bool operator==(const TensorClass& a, const TensorClass& b) {
  return a.model_ == b.model_ && a.k_ == b.k_ && a.terms_ == b.terms_;
}

Rational TensorClass::integrate() const {
  Rational s;
  for (const auto& [key, c] : terms_) {
    Rational p = c;
    for (Label l : key) {
      p *= model_->integral(l);
      if (p.is_zero()) break;
    }
    s += p;
  }
  return s;
}

TensorClass TensorClass::swapped() const {
  if (k_ != 2) throw UsageError("swapped() needs k = 2");
  TensorClass out(model_, 2);
  for (const auto& [key, c] : terms_) {
    int s = (model_->odd(key[0]) && model_->odd(key[1])) ? -1 : 1;
    out.add({key[1], key[0]}, c * s);
  }
  return out;
}

TensorClass TensorClass::push_leg(std::size_t pos) const {
  if (pos >= k_) throw UsageError("push_leg: leg out of range");
  TensorClass out(model_, k_ + 1);
  for (const auto& [key, c] : terms_) {
    TensorClass d = diag_push(model_->basis_class(key[pos]), 2);
    for (const auto& [dk, dc] : d.terms()) {
      Key k2(key.begin(), key.begin() + static_cast<long>(pos));
      k2.insert(k2.end(), dk.begin(), dk.end());
      k2.insert(k2.end(), key.begin() + static_cast<long>(pos) + 1, key.end());
      out.add(k2, c * dc);
    }
  }
  return out;
}

GradedClass TensorClass::multiply_legs() const {
  GradedClass out = model_->zero();
  for (const auto& [key, c] : terms_) {
    GradedClass p = model_->basis_class(key[0]);
    for (std::size_t l = 1; l < key.size(); ++l) p = mul(p, model_->basis_class(key[l]));
    out += c * p;
  }
  return out;
}

std::string TensorClass::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    if (!first) os << " + ";
    os << c << "*";
    for (std::size_t l = 0; l < key.size(); ++l) os << (l ? "(x)" : "") << model_->label(key[l]);
    first = false;
  }
  return first ? "0" : os.str();
}

// ---------------------------------------------------------------------------
// Diagonal pushforward

TensorClass diag_push(const GradedClass& a, std::size_t k) {
  if (k == 0) throw UsageError("diag_push: k must be positive");
  const auto& m = *a.model();
  const std::size_t n = m.dim();
  TensorClass out(a.model(), k);
  if (k == 1) {
    for (const auto& [i, c] : a.terms()) out.add({i}, c);
    return out;
  }
  std::vector<GradedClass> duals;
  for (Label j = 0; j < n; ++j) duals.emplace_back(a.model(), m.dual(j));

  // Coefficient of e_J is eps(J) * integral(a * dual(j1) ... dual(jk)), where
  // eps(J) is the Koszul sign of (e_J)(dual_J) -> prod (e_jl dual_jl).
  // Depth-first over J, pruning when the running product vanishes.
  TensorClass::Key key;
  std::vector<GradedClass> prefix{a};
  auto rec = [&](auto&& self, std::size_t depth) -> void {
    if (depth == k) {
      Rational v = integrate(prefix.back());
      if (v.is_zero()) return;
      int odd_e_after = 0;
      int s = 1;
      for (std::size_t l = k; l-- > 0;) {
        if (m.odd(key[l]) && (odd_e_after & 1)) s = -s;
        if (m.odd(key[l])) ++odd_e_after;
      }
      out.add(key, v * s);
      return;
    }
    for (Label j = 0; j < n; ++j) {
      GradedClass next = mul(prefix.back(), duals[j]);
      if (next.is_zero()) continue;
      key.push_back(j);
      prefix.push_back(std::move(next));
      self(self, depth + 1);
      prefix.pop_back();
      key.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

GradedClass euler_class(const SurfaceModel& model) {
  return diag_push(model.basis_class(model.unit()), 2).multiply_legs();
}

// ---------------------------------------------------------------------------
// Validation

bool ModelReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ModelCheck& c) { return c.pass; });
}

ModelReport validate_model(const SurfaceModel& m) {
  ModelReport rep;
  rep.model = m.name();
  const auto n = static_cast<Label>(m.dim());
  auto fail = [&](ModelCheck& c, std::vector<Label> ls) {
    if (!c.pass) return;
    c.pass = false;
    for (Label l : ls) c.witness.push_back(m.label(l));
  };
  auto elem = [&](Label i) { return m.basis_class(i); };

  ModelCheck unit{"unit", true, {}};
  int zero_degree = 0;
  for (Label i = 0; i < n; ++i) zero_degree += m.degree(i) == 0 ? 1 : 0;
  if (zero_degree != 1) fail(unit, {m.unit()});
  for (Label i = 0; i < n; ++i) {
    if (!(mul(elem(m.unit()), elem(i)) == elem(i)) || !(mul(elem(i), elem(m.unit())) == elem(i))) {
      fail(unit, {m.unit(), i});
    }
  }
  rep.checks.push_back(unit);

  ModelCheck degree{"degree_additivity", true, {}};
  for (Label i = 0; i < n; ++i) {
    for (Label j = 0; j < n; ++j) {
      for (const auto& [k, c] : m.product(i, j)) {
        if (m.degree(k) != m.degree(i) + m.degree(j)) fail(degree, {i, j, k});
      }
    }
  }
  rep.checks.push_back(degree);

  ModelCheck supercomm{"supercommutativity", true, {}};
  for (Label i = 0; i < n; ++i) {
    for (Label j = i; j < n; ++j) {
      GradedClass ab = mul(elem(i), elem(j));
      GradedClass ba = mul(elem(j), elem(i));
      if (!(ab == sign_pow(m.degree(i) * m.degree(j)) * ba)) fail(supercomm, {i, j});
    }
  }
  rep.checks.push_back(supercomm);

  ModelCheck assoc{"associativity", true, {}};
  for (Label i = 0; i < n && assoc.pass; ++i) {
    for (Label j = 0; j < n && assoc.pass; ++j) {
      GradedClass ij = mul(elem(i), elem(j));
      for (Label k = 0; k < n; ++k) {
        if (!(mul(ij, elem(k)) == mul(elem(i), mul(elem(j), elem(k))))) {
          fail(assoc, {i, j, k});
          break;
        }
      }
    }
  }
  rep.checks.push_back(assoc);

  ModelCheck nondeg{"nondegeneracy", true, {}};
  if (!m.nondegenerate()) {
    // Report a basis element whose Gram row vanishes, if any.
    Label witness = 0;
    for (Label i = 0; i < n; ++i) {
      bool zero_row = true;
      for (Label j = 0; j < n; ++j) zero_row = zero_row && m.pairing(i, j).is_zero();
      if (zero_row) {
        witness = i;
        break;
      }
    }
    fail(nondeg, {witness});
  }
  rep.checks.push_back(nondeg);

  ModelCheck top{"integral_top_degree", true, {}};
  for (Label i = 0; i < n; ++i) {
    if (m.degree(i) != 4 && !m.integral(i).is_zero()) fail(top, {i});
  }
  rep.checks.push_back(top);

  ModelCheck canon{"canonical_degree", true, {}};
  for (Label i = 0; i < n; ++i) {
    if (m.degree(i) != 2 && !m.canonical_class()[i].is_zero()) fail(canon, {i});
  }
  rep.checks.push_back(canon);
  return rep;
}

// ---------------------------------------------------------------------------
// Built-in models

namespace {

ModelSpec p2_spec() {
  ModelSpec s;
  s.name = "p2";
  s.basis = {{"one", 0}, {"h", 2}, {"x", 4}};
  s.unit = "one";
  s.products = {{"one", "one", {{"one", 1}}},
                {"one", "h", {{"h", 1}}},
                {"one", "x", {{"x", 1}}},
                {"h", "h", {{"x", 1}}}};
  s.integral = {{"x", 1}};
  s.canonical = {{"h", -3}};
  return s;
}

ModelSpec p1xp1_spec() {
  ModelSpec s;
  s.name = "p1xp1";
  s.basis = {{"one", 0}, {"f1", 2}, {"f2", 2}, {"pt", 4}};
  s.unit = "one";
  s.products = {{"one", "one", {{"one", 1}}}, {"one", "f1", {{"f1", 1}}}, {"one", "f2", {{"f2", 1}}},
                {"one", "pt", {{"pt", 1}}},   {"f1", "f2", {{"pt", 1}}}};
  s.integral = {{"pt", 1}};
  s.canonical = {{"f1", -2}, {"f2", -2}};
  return s;
}

/// Hyperbolic plane in H^2, trivial canonical class.
ModelSpec evenk0_spec() {
  ModelSpec s;
  s.name = "evenk0";
  s.basis = {{"one", 0}, {"a", 2}, {"b", 2}, {"pt", 4}};
  s.unit = "one";
  s.products = {{"one", "one", {{"one", 1}}}, {"one", "a", {{"a", 1}}}, {"one", "b", {{"b", 1}}},
                {"one", "pt", {{"pt", 1}}},   {"a", "b", {{"pt", 1}}}};
  s.integral = {{"pt", 1}};
  return s;
}

/// Exterior algebra on e1..e4 (the real 4-torus), pt = e1234.
ModelSpec torus_spec() {
  ModelSpec s;
  s.name = "torus";
  std::vector<unsigned> masks;
  for (int d = 0; d <= 4; ++d) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      if (__builtin_popcount(mask) == d) masks.push_back(mask);
    }
  }
  auto name = [](unsigned mask) -> std::string {
    if (mask == 0) return "one";
    if (mask == 15) return "pt";
    std::string r = "e";
    for (int b = 0; b < 4; ++b) {
      if (mask & (1u << b)) r += static_cast<char>('1' + b);
    }
    return r;
  };
  for (unsigned mask : masks) s.basis.push_back({name(mask), __builtin_popcount(mask)});
  s.unit = "one";
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (std::size_t j = i; j < masks.size(); ++j) {
      unsigned a = masks[i], b = masks[j];
      if (a & b) continue;
      // sign of concatenating the sorted generator lists of a and b
      int inversions = 0;
      for (int x = 0; x < 4; ++x) {
        if (!(a & (1u << x))) continue;
        for (int y = 0; y < x; ++y) {
          if (b & (1u << y)) ++inversions;
        }
      }
      s.products.push_back({name(a), name(b), {{name(a | b), sign_pow(inversions)}}});
    }
  }
  s.integral = {{"pt", 1}};
  return s;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names{"p2", "p1xp1", "torus", "evenk0"};
  return names;
}

ModelSpec builtin_model_spec(std::string_view name) {
  if (name == "p2") return p2_spec();
  if (name == "p1xp1") return p1xp1_spec();
  if (name == "torus") return torus_spec();
  if (name == "evenk0") return evenk0_spec();
  throw UsageError("unknown built-in model '" + std::string(name) + "'");
}

ModelPtr builtin_model(std::string_view name) { return SurfaceModel::build(builtin_model_spec(name)); }

}  // namespace hv
