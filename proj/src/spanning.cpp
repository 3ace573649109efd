#include "hv/spanning.hpp"

#include <exception>
#include <unordered_map>

#include "hv/linalg.hpp"
#include "json.hpp"

namespace hv {

namespace {

using Index = std::unordered_map<Monomial, std::size_t, MonomialHash>;

SparseRow to_row(const FockVector& v, const Index& index) {
  SparseRow r;
  for (const auto& [mono, c] : v.terms()) r.emplace(index.at(mono), to_mpq(c));
  return r;
}

}  // namespace

std::string SpanReport::str() const {
  return std::string(pass ? "PASS " : "FAIL ") + std::to_string(achieved) + "/" + std::to_string(ambient) +
         " n=" + std::to_string(n) + " generators=" + std::to_string(generators) + " rounds=" + std::to_string(rounds);
}

std::string SpanReport::json() const {
  nlohmann::ordered_json j{{"n", n},           {"generators", generators}, {"achieved", achieved},
                           {"ambient", ambient}, {"rounds", rounds},       {"status", pass ? "PASS" : "FAIL"}};
  return j.dump(2) + "\n";
}

FockVector unit_vector(int n, const SurfaceModel& m) {
  if (n < 0) throw UsageError("unit_vector: n must be >= 0");
  PartVec parts(static_cast<std::size_t>(n), Part{1, m.unit()});
  Rational inv = 1;
  for (int i = 2; i <= n; ++i) inv *= Rational(1, i);
  return FockVector::of(Monomial(std::move(parts)), inv);
}

std::vector<Operator> generators(int n, const ModelPtr& model) {
  if (n < 1) throw UsageError("generators: n must be >= 1");
  std::vector<Operator> ops;
  for (int k = 0; k < n; ++k) {
    for (Label g = 0; g < model->dim(); ++g) ops.push_back(scale(-1, w(k + 2, 0, model->basis_class(g))));
  }
  return ops;
}

SpanResult span_closure(const std::vector<FockVector>& seeds, const std::vector<Operator>& ops, int level,
                        const SurfaceModel& m) {
  for (const auto& s : seeds) {
    for (const auto& [mono, c] : s.terms()) {
      if (mono.level() != level) throw UsageError("span_closure: seed of level " + std::to_string(mono.level()));
    }
  }
  for (const auto& f : ops) {
    auto b = f.bidegree();
    if (!b || b->level != 0) throw UsageError("span_closure: operator " + f.str() + " changes the level");
  }
  const auto amb = basis(level, m);
  Index index;
  for (std::size_t i = 0; i < amb.size(); ++i) index.emplace(amb[i], i);

  SpanResult out;
  out.report.n = level;
  out.report.generators = ops.size();
  out.report.ambient = amb.size();
  Echelon ech;
  std::vector<FockVector> frontier;
  for (const auto& s : seeds) {
    if (ech.insert(to_row(s, index))) frontier.push_back(s);
  }
  out.basis = frontier;
  while (!frontier.empty() && ech.rank() < amb.size()) {
    ++out.report.rounds;
    const std::size_t jobs = frontier.size() * ops.size();
    std::vector<FockVector> imgs(jobs);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < static_cast<long>(jobs); ++j) {
      try {
        const auto ju = static_cast<std::size_t>(j);
        imgs[ju] = ops[ju % ops.size()].apply(frontier[ju / ops.size()]);
      } catch (...) {
#pragma omp critical(hv_span_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    std::vector<FockVector> next;
    for (auto& v : imgs) {
      if (v.is_zero()) continue;
      if (ech.insert(to_row(v, index))) next.push_back(std::move(v));
    }
    out.basis.insert(out.basis.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  out.report.achieved = ech.rank();
  out.report.pass = out.report.achieved == out.report.ambient;
  return out;
}

SpanReport check_generation(int n, const ModelPtr& model) {
  if (n < 1) throw UsageError("check_generation: n must be >= 1");
  return span_closure({unit_vector(n, *model)}, generators(n, model), n, *model).report;
}

}  // namespace hv
