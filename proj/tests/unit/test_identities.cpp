#include <doctest.h>

#include <json.hpp>

#include "hv/identities.hpp"
#include "support.hpp"

using namespace hvtest;

namespace {

CheckParams small(int level = 2, int bound = 1, int depth = 2) {
  CheckParams p;
  p.level = level;
  p.index_bound = bound;
  p.depth = depth;
  return p;
}

/// Alternating sum of Betti numbers, read off the basis degrees.
Rational euler_characteristic(const SurfaceModel& m) {
  Rational chi = 0;
  for (Label b = 0; b < m.dim(); ++b) chi += m.odd(b) ? Rational(-1) : Rational(1);
  return chi;
}

ModelPtr with_canonical(std::string_view name, LabeledCoeffs canonical) {
  ModelSpec spec = builtin_model_spec(name);
  spec.name += "_mutant";
  spec.canonical = std::move(canonical);
  return SurfaceModel::build(spec);
}

}  // namespace

TEST_CASE("every check passes on small bounds") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    for (const auto& id : check_ids()) {
      CAPTURE(name);
      CAPTURE(id);
      const CheckReport r = run_check(id, m, small());
      CHECK(r.status != Status::Fail);
      CHECK(r.status != Status::Incomplete);
      if (r.status == Status::Pass) CHECK(r.instances > 0);
    }
  }
}

TEST_CASE("euler class integrates to the euler characteristic") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    CAPTURE(name);
    CHECK(integrate(euler_class(*m)) == euler_characteristic(*m));
  }
  CHECK(euler_characteristic(*builtin_model("p2")) == 3);
  CHECK(euler_characteristic(*builtin_model("torus")) == 0);
}

TEST_CASE("virasoro central term") {
  for (const auto& name : builtin_model_names()) {
    auto m = builtin_model(name);
    CAPTURE(name);
    const CheckReport r = run_check("virasoro_virasoro", m, small(2, 2));
    REQUIRE(r.status == Status::Pass);
    const Rational expected = -Rational(2 * 2 * 2 - 2, 12) * euler_characteristic(*m);
    CHECK(r.note == "central[L(2,1),L(-2,1)]=" + expected.str());
  }
  CHECK(run_check("virasoro_virasoro", builtin_model("p2"), small(2, 2)).note == "central[L(2,1),L(-2,1)]=-3/2");
}

TEST_CASE("d = -W^3_0(1) only when K vanishes") {
  CHECK(run_check("d_eq_minusW03_514", builtin_model("p2"), small()).status == Status::Skip);
  CHECK(run_check("d_eq_minusW03_514", builtin_model("p1xp1"), small()).status == Status::Skip);
  CHECK(run_check("d_eq_minusW03_514", builtin_model("torus"), small(3)).status == Status::Pass);
  CHECK(run_check("d_eq_minusW03_514", builtin_model("evenk0"), small(3)).status == Status::Pass);
}

TEST_CASE("the identities hold for any canonical class") {
  auto shifted = with_canonical("p2", {{"h", Rational(-2)}});
  auto zero = with_canonical("p2", {});
  for (const auto& m : {shifted, zero}) {
    CAPTURE(m->name());
    REQUIRE(validate_model(*m).ok());
    for (const auto& id : {"qprime_neg", "qprime_q", "d_selfadjoint"}) {
      CHECK(run_check(id, m, small(3, 2)).status == Status::Pass);
    }
  }
  CHECK(run_check("d_eq_minusW03_514", shifted, small(3)).status == Status::Skip);
  CHECK(run_check("d_eq_minusW03_514", zero, small(3)).status == Status::Pass);
}

TEST_CASE("failure lines carry the witness") {
  auto m = builtin_model("p2");
  CheckReport r;
  r.id = "heisenberg";
  r.model = "p2";
  r.params = small();
  r.status = Status::Fail;
  r.instance = "[q(1,h),q(-1,h)]";
  r.mismatch = Mismatch{Monomial{}, vac(), FockVector::of(Monomial{}, 2)};
  CHECK(r.line(*m) == "CHECK heisenberg model=p2 N=2 B=1 FAIL witness=vac instance=\"[q(1,h),q(-1,h)]\" lhs=\"1*vac\" rhs=\"2*vac\"");
  SuiteReport s{"p2", {r}};
  CHECK(s.exit_code() != 0);
  const auto j = nlohmann::json::parse(to_json(s, *m));
  CHECK(j["checks"][0]["status"] == "FAIL");
}

TEST_CASE("parameters are validated") {
  auto m = builtin_model("p2");
  CHECK_THROWS_AS(run_check("no_such_check", m, small()), UsageError);
  CHECK_THROWS_AS(run_check("nested_37", m, small(2, 1, 9)), UsageError);
  CHECK_THROWS_AS(run_check("heisenberg", m, small(-1)), UsageError);
  CHECK_THROWS_AS(run_check("heisenberg", m, small(2, 0)), UsageError);
  CHECK(default_depth("nested_39") == 3);
  CHECK(default_depth("w_q_46") == 4);
  CHECK(!default_depth("heisenberg"));
}

TEST_CASE("time limit yields incomplete") {
  CheckParams p = small(4, 2, 3);
  p.time_limit = 1e-6;
  const CheckReport r = run_check("nested_39", builtin_model("p2"), p);
  CHECK(r.status == Status::Incomplete);
  CHECK(r.line(*builtin_model("p2")).find("INCOMPLETE") != std::string::npos);
}

TEST_CASE("suite reports") {
  auto m = builtin_model("p2");
  const std::vector<std::string> ids = {"heisenberg", "d_eq_minusW03_514", "w1_eq_q"};
  const SuiteReport r = run_suite(ids, m, small());
  REQUIRE(r.checks.size() == 3);
  for (std::size_t i = 0; i < ids.size(); ++i) CHECK(r.checks[i].id == ids[i]);
  CHECK(r.count(Status::Pass) == 2);
  CHECK(r.count(Status::Skip) == 1);
  CHECK(r.exit_code() == 0);

  const std::string text = to_text(r, *m);
  CHECK(text.find("CHECK heisenberg model=p2 N=2 B=1 PASS") != std::string::npos);
  CHECK(text.find("CHECK d_eq_minusW03_514 model=p2 N=2 B=1 SKIP reason=") != std::string::npos);
  CHECK(text.find("SUMMARY") != std::string::npos);

  const auto j = nlohmann::json::parse(to_json(r, *m));
  CHECK(j["checks"].size() == 3);
  CHECK(j["checks"][0]["id"] == "heisenberg");
  CHECK(j["checks"][0]["status"] == "PASS");
  CHECK(j["summary"]["pass"] == 2);
  CHECK(j["summary"]["skip"] == 1);
}
