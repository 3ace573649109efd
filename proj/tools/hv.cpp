#include <omp.h>

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hv/expr.hpp"
#include "hv/identities.hpp"
#include "hv/model_io.hpp"
#include "hv/spanning.hpp"

namespace {

using hv::ModelPtr;
using ojson = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kModel = 3;

struct ModelInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string surface = "builtin:p2";
  std::string format = "text";
  int jobs = 0;
  std::string suite = "all";
  int level = 3;
  int index_bound = 2;
  int depth = -1;
  double time_limit = 0;
  std::string expr;
  std::string state;
  std::string a;
  std::string b;
  std::string expect;
  int n = 0;
};

bool json_out(const Options& o) { return o.format == "json"; }

ModelPtr load_valid(const Options& o) {
  ModelPtr m = hv::load_model(o.surface);
  const auto rep = hv::validate_model(*m);
  if (!rep.ok()) {
    for (const auto& c : rep.checks) {
      if (!c.pass) throw ModelInvalid("model '" + m->name() + "' fails " + c.invariant);
    }
  }
  return m;
}

std::vector<std::string> suite_ids(const std::string& suite) {
  if (suite == "all") return hv::check_ids();
  std::vector<std::string> ids;
  std::stringstream ss(suite);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

int cmd_validate(const Options& o) {
  ModelPtr m = hv::load_model(o.surface);
  const auto rep = hv::validate_model(*m);
  if (json_out(o)) {
    ojson j;
    j["model"] = rep.model;
    j["checks"] = ojson::array();
    for (const auto& c : rep.checks) {
      j["checks"].push_back({{"invariant", c.invariant}, {"status", c.pass ? "PASS" : "FAIL"}, {"witness", c.witness}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& c : rep.checks) {
      std::cout << "VALIDATE " << c.invariant << " " << (c.pass ? "PASS" : "FAIL");
      if (!c.pass && !c.witness.empty()) {
        std::cout << " witness=";
        for (std::size_t i = 0; i < c.witness.size(); ++i) std::cout << (i ? "," : "") << c.witness[i];
      }
      std::cout << "\n";
    }
  }
  return rep.ok() ? kOk : kModel;
}

int cmd_check(const Options& o) {
  ModelPtr m = load_valid(o);
  hv::CheckParams p;
  p.level = o.level;
  p.index_bound = o.index_bound;
  p.depth = o.depth;
  p.time_limit = o.time_limit;
  const auto rep = hv::run_suite(suite_ids(o.suite), m, p);
  std::cout << (json_out(o) ? hv::to_json(rep, *m) : hv::to_text(rep, *m));
  return rep.exit_code() == 0 ? kOk : kFail;
}

void print_vector(const Options& o, const hv::FockVector& v, const hv::SurfaceModel& m) {
  if (json_out(o)) {
    std::cout << ojson{{"result", v.str(m)}}.dump(2) << "\n";
  } else {
    std::cout << v.str(m) << "\n";
  }
}

int cmd_apply(const Options& o) {
  ModelPtr m = load_valid(o);
  const hv::Operator f = hv::parse_operator(o.expr, m);
  const hv::FockVector v = hv::parse_state(o.state, *m);
  print_vector(o, f.apply(v), *m);
  return kOk;
}

int cmd_commutator(const Options& o) {
  ModelPtr m = load_valid(o);
  const hv::Operator c = hv::commutator(hv::parse_operator(o.a, m), hv::parse_operator(o.b, m));
  if (!o.state.empty()) {
    print_vector(o, c.apply(hv::parse_state(o.state, *m)), *m);
    return kOk;
  }
  if (!o.expect.empty()) {
    const auto cmp = hv::equal_up_to(c, hv::parse_operator(o.expect, m), o.level);
    if (json_out(o)) {
      ojson j{{"commutator", c.str()}, {"level", o.level}, {"status", cmp.equal ? "PASS" : "FAIL"}};
      if (cmp.mismatch) {
        j["witness"] = cmp.mismatch->witness.str(*m);
        j["lhs"] = cmp.mismatch->lhs.str(*m);
        j["rhs"] = cmp.mismatch->rhs.str(*m);
      }
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << (cmp.equal ? "PASS" : "FAIL");
      if (cmp.mismatch) {
        std::cout << " witness=" << cmp.mismatch->witness.str(*m) << " lhs=\"" << cmp.mismatch->lhs.str(*m)
                  << "\" rhs=\"" << cmp.mismatch->rhs.str(*m) << "\"";
      }
      std::cout << "\n";
    }
    return cmp.equal ? kOk : kFail;
  }
  const auto dom = hv::basis_up_to(o.level, *m);
  const auto imgs = hv::images(c, dom);
  if (json_out(o)) {
    ojson j{{"commutator", c.str()}, {"images", ojson::array()}};
    for (std::size_t i = 0; i < dom.size(); ++i) j["images"].push_back({{"state", dom[i].str(*m)}, {"image", imgs[i].str(*m)}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < dom.size(); ++i) std::cout << dom[i].str(*m) << " -> " << imgs[i].str(*m) << "\n";
  }
  return kOk;
}

int cmd_span(const Options& o) {
  ModelPtr m = load_valid(o);
  const auto rep = hv::check_generation(o.n, m);
  std::cout << (json_out(o) ? rep.json() : rep.str() + "\n");
  return rep.pass ? kOk : kFail;
}

int cmd_poincare(const Options& o) {
  ModelPtr m = load_valid(o);
  if (o.n < 0) throw hv::UsageError("--n must be >= 0");
  const auto coeffs = hv::poincare(o.n, *m);
  if (json_out(o)) {
    std::cout << ojson{{"n", o.n}, {"coefficients", coeffs}}.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < coeffs.size(); ++i) std::cout << (i ? "," : "") << coeffs[i];
    std::cout << "\n";
  }
  return kOk;
}

int cmd_basis(const Options& o) {
  ModelPtr m = load_valid(o);
  if (o.n < 0) throw hv::UsageError("--n must be >= 0");
  const auto b = hv::basis(o.n, *m);
  if (json_out(o)) {
    ojson j{{"n", o.n}, {"basis", ojson::array()}};
    for (const auto& mono : b) j["basis"].push_back(mono.str(*m));
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& mono : b) std::cout << mono.str(*m) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Heisenberg, Virasoro and W operators on the Fock space of a surface model"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--surface", o.surface, "model file or builtin:<name>");
    c->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    c->add_option("--jobs", o.jobs, "number of threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  };

  auto* validate = app.add_subcommand("validate", "check the algebra axioms of a model");
  common(validate);

  auto* check = app.add_subcommand("check", "run identity checks");
  common(check);
  check->add_option("--suite", o.suite, "check id, comma-separated ids, or all");
  check->add_option("--level", o.level, "level bound N");
  check->add_option("--index-bound", o.index_bound, "index bound B");
  check->add_option("--depth", o.depth, "k bound for nested and W checks");
  check->add_option("--time-limit", o.time_limit, "seconds per check; 0 means none");

  auto* apply = app.add_subcommand("apply", "apply an operator to a state");
  common(apply);
  apply->add_option("--expr", o.expr, "operator expression")->required();
  apply->add_option("--state", o.state, "state, e.g. q(1,h)*vac")->required();

  auto* comm = app.add_subcommand("commutator", "superbracket of two operators");
  common(comm);
  comm->add_option("--a", o.a, "first operator")->required();
  comm->add_option("--b", o.b, "second operator")->required();
  comm->add_option("--state", o.state, "apply the bracket to this state");
  comm->add_option("--expect", o.expect, "compare the bracket with this operator");
  comm->add_option("--level", o.level, "level bound for the images or the comparison");

  auto* span = app.add_subcommand("span", "closure of the unit class under the degree-zero W operators");
  common(span);
  span->add_option("--n", o.n, "level")->required();

  auto* poinc = app.add_subcommand("poincare", "Poincare polynomial of H_n");
  common(poinc);
  poinc->add_option("--n", o.n, "level")->required();

  auto* bas = app.add_subcommand("basis", "basis monomials of H_n");
  common(bas);
  bas->add_option("--n", o.n, "level")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (o.jobs > 0) omp_set_num_threads(o.jobs);
  try {
    if (*validate) return cmd_validate(o);
    if (*check) return cmd_check(o);
    if (*apply) return cmd_apply(o);
    if (*comm) return cmd_commutator(o);
    if (*span) return cmd_span(o);
    if (*poinc) return cmd_poincare(o);
    if (*bas) return cmd_basis(o);
  } catch (const hv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModel;
  } catch (const hv::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kModel;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
