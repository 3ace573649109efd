#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run hv(const std::string& args) {
  const std::string cmd = std::string(HV_BIN) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  Run r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp_file(const std::string& name, const std::string& text) {
  const std::string path = std::string(HV_TMP) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("apply") {
  auto r = hv("apply --expr 'L(2,x)' --state vac");
  CHECK(r.code == 0);
  CHECK(r.out == "1/2*q(1,x)*q(1,x)*vac\n");
  r = hv("apply --expr d --state vac --format json");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["result"] == "0");
}

TEST_CASE("commutator") {
  auto r = hv("commutator --a 'q(-1,h)' --b 'q(1,h)' --state vac");
  CHECK(r.code == 0);
  CHECK(r.out == "-1*vac\n");
  r = hv("commutator --a 'L(1,one)' --b 'q(-2,one)' --expect '2*q(-1,one)' --level 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS", 0) == 0);
  r = hv("commutator --a 'L(1,one)' --b 'q(-2,one)' --expect '3*q(-1,one)' --level 2");
  CHECK(r.code == 1);
  CHECK(r.out.rfind("FAIL witness=", 0) == 0);
}

TEST_CASE("check") {
  auto r = hv("check --suite heisenberg,d_eq_minusW03_514 --level 2 --index-bound 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("CHECK heisenberg model=p2 N=2 B=1 PASS") != std::string::npos);
  CHECK(r.out.find("SKIP") != std::string::npos);
  r = hv("check --suite w1_eq_q --surface builtin:torus --level 2 --index-bound 1 --format json");
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["checks"][0]["status"] == "PASS");
  CHECK(hv("check --suite no_such_check").code == 2);
  CHECK(hv("check --suite heisenberg --level -1").code == 2);
}

TEST_CASE("span, poincare and basis") {
  auto r = hv("span --n 2");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS 9/9 n=2", 0) == 0);
  r = hv("poincare --n 2");
  CHECK(r.code == 0);
  CHECK(r.out == "1,0,2,0,3,0,2,0,1\n");
  r = hv("basis --n 0");
  CHECK(r.code == 0);
  CHECK(r.out == "vac\n");
  r = hv("basis --n 2 --format json");
  CHECK(nlohmann::json::parse(r.out)["basis"].size() == 9);
}

TEST_CASE("usage and parse errors exit with 2") {
  CHECK(hv("").code == 2);
  CHECK(hv("frobnicate").code == 2);
  CHECK(hv("apply --expr d").code == 2);
  CHECK(hv("apply --expr 'q(1' --state vac").code == 2);
  CHECK(hv("apply --expr 'q(1,zz)' --state vac").code == 2);
  CHECK(hv("apply --expr d --state 'q(0,h)*vac'").code == 2);
  CHECK(hv("poincare --n 2 --format yaml").code == 2);
  CHECK(hv("span --n 2 --bogus").code == 2);
}

TEST_CASE("model errors exit with 3") {
  auto r = hv("validate --surface builtin:torus");
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);

  CHECK(hv("validate --surface " + tmp_file("broken.json", "{\"name\": 1}")).code == 3);

  const std::string degenerate = R"({
    "name": "degenerate",
    "basis": [{"label": "one", "degree": 0}, {"label": "pt", "degree": 4}],
    "unit": "one",
    "products": [
      {"left": "one", "right": "one", "result": [{"label": "one", "coeff": "1"}]},
      {"left": "one", "right": "pt", "result": [{"label": "pt", "coeff": "1"}]}
    ],
    "integral": [],
    "canonical": []
  })";
  const std::string path = tmp_file("degenerate.json", degenerate);
  r = hv("validate --surface " + path);
  CHECK(r.code == 3);
  CHECK(r.out.find("FAIL") != std::string::npos);
  CHECK(hv("poincare --n 1 --surface " + path).code == 3);
}
