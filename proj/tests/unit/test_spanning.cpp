#include <doctest.h>

#include <json.hpp>

#include "hv/spanning.hpp"
#include "support.hpp"

using namespace hvtest;

namespace {

long total_dimension(const SurfaceModel& m, int n) {
  const auto betti = generating_function_betti(m, n);
  long total = 0;
  for (long b : betti[static_cast<std::size_t>(n)]) total += b;
  return total;
}

}  // namespace

TEST_CASE("unit vector") {
  auto p2 = builtin_model("p2");
  CHECK(unit_vector(0, *p2) == vac());
  CHECK(unit_vector(1, *p2) == word(p2, {{1, "one"}}));
  CHECK(unit_vector(3, *p2) == word(p2, {{1, "one"}, {1, "one"}, {1, "one"}}, Rational(1, 6)));
}

TEST_CASE("generators") {
  auto torus = builtin_model("torus");
  const auto g = generators(3, torus);
  CHECK(g.size() == 3 * torus->dim());
  CHECK(equal_up_to(g[0], scale(-1, w(2, 0, torus->basis_class(0))), 2).equal);
}

TEST_CASE("the unit class is an eigenvector of -W^2_0(1)") {
  auto p2 = builtin_model("p2");
  for (int n = 0; n <= 4; ++n) {
    const FockVector u = unit_vector(n, *p2);
    CHECK(scale(-1, w(2, 0, p2->basis_class(0))).apply(u) == Rational(n) * u);
  }
}

TEST_CASE("closure without operators is the seed span") {
  auto p2 = builtin_model("p2");
  const auto r = span_closure({unit_vector(2, *p2)}, {}, 2, *p2);
  CHECK(r.basis.size() == 1);
  CHECK(r.report.achieved == 1);
  CHECK(r.report.ambient == 9);
  CHECK(!r.report.pass);
}

TEST_CASE("closure rejects inhomogeneous input") {
  auto p2 = builtin_model("p2");
  CHECK_THROWS_AS(span_closure({unit_vector(1, *p2)}, {}, 2, *p2), UsageError);
  CHECK_THROWS_AS(span_closure({unit_vector(2, *p2)}, {q(1, p2->basis_class(0))}, 2, *p2), UsageError);
}

TEST_CASE("closure is monotone in the operator set") {
  auto p2 = builtin_model("p2");
  const auto all = generators(3, p2);
  std::size_t last = 0;
  for (std::size_t k = 0; k <= all.size(); ++k) {
    const std::vector<Operator> ops(all.begin(), all.begin() + static_cast<long>(k));
    const auto r = span_closure({unit_vector(3, *p2)}, ops, 3, *p2);
    CHECK(r.report.achieved >= last);
    last = r.report.achieved;
  }
  CHECK(last == 22);
}

TEST_CASE("generation reaches the full dimension") {
  auto p2 = builtin_model("p2");
  CHECK(total_dimension(*p2, 2) == 9);
  CHECK(total_dimension(*p2, 3) == 22);
  for (int n = 1; n <= 3; ++n) {
    for (const auto& name : {"p2", "p1xp1", "evenk0"}) {
      auto m = builtin_model(name);
      CAPTURE(name);
      CAPTURE(n);
      const SpanReport r = check_generation(n, m);
      CHECK(r.ambient == static_cast<std::size_t>(total_dimension(*m, n)));
      CHECK(r.achieved == r.ambient);
      CHECK(r.pass);
    }
  }
  const SpanReport r = check_generation(3, p2);
  CHECK(r.str().rfind("PASS 22/22 n=3", 0) == 0);
  const auto j = nlohmann::json::parse(r.json());
  CHECK(j["achieved"] == 22);
}

TEST_CASE("torus at level 1") {
  auto torus = builtin_model("torus");
  const SpanReport r = check_generation(1, torus);
  CHECK(r.ambient == 16);
  CHECK(r.pass);
}
