#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hv/model_io.hpp"
#include "support.hpp"

using namespace hvtest;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string model_error(const std::string& text) {
  try {
    SurfaceModel::build(parse_model_json(text));
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

const char* kMini = R"({
  "name": "mini",
  "basis": [{"label": "one", "degree": 0}, {"label": "pt", "degree": 4}],
  "unit": "one",
  "products": [
    {"left": "one", "right": "one", "result": [{"label": "one", "coeff": "1"}]},
    {"left": "one", "right": "pt", "result": [{"label": "pt", "coeff": "1"}]}
  ],
  "integral": [{"label": "pt", "coeff": "1"}],
  "canonical": []
})";

}  // namespace

TEST_CASE("model files equal the built-in models") {
  for (const auto& name : builtin_model_names()) {
    CAPTURE(name);
    const std::string path = std::string(HV_MODELS) + "/" + name + ".json";
    ModelPtr file = load_model(path);
    ModelPtr builtin = load_model("builtin:" + name);
    CHECK(model_to_json(file->spec()) == model_to_json(builtin->spec()));
    CHECK(validate_model(*file).ok());
    for (Label i = 0; i < file->dim(); ++i) {
      for (Label j = 0; j < file->dim(); ++j) CHECK(file->pairing(i, j) == builtin->pairing(i, j));
    }
    CHECK(mul(file->canonical_class(), file->canonical_class()).coeffs() ==
          mul(builtin->canonical_class(), builtin->canonical_class()).coeffs());
  }
}

TEST_CASE("a minimal model parses") {
  ModelPtr m = SurfaceModel::build(parse_model_json(kMini));
  CHECK(m->dim() == 2);
  CHECK(integrate(m->basis_class(1)) == Rational(1));
  CHECK(validate_model(*m).ok());
}

TEST_CASE("schema errors name the field") {
  auto mutated = [](auto edit) {
    auto j = nlohmann::json::parse(kMini);
    edit(j);
    return model_error(j.dump());
  };
  CHECK(mutated([](auto& j) { j.erase("unit"); }).find("unit: missing") == 0);
  CHECK(mutated([](auto& j) { j["nom"] = "x"; }).find("nom: unknown field") == 0);
  CHECK(mutated([](auto& j) { j["basis"][1]["degree"] = "4"; }).find("basis[1].degree") == 0);
  CHECK(mutated([](auto& j) { j["products"][0]["result"][0]["coeff"] = "x"; })
            .find("products[0].result[0].coeff") == 0);
  CHECK(mutated([](auto& j) { j["integral"][0]["coeff"] = "2/2"; }).find("integral[0].coeff") == 0);
  CHECK(mutated([](auto& j) { j["integral"][0]["coeff"] = "1/-1"; }).find("integral[0].coeff") == 0);
  CHECK(mutated([](auto& j) { j["basis"] = 3; }).find("basis") == 0);
  CHECK(mutated([](auto& j) { j["basis"][1]["label"] = "one"; }) != "");
  CHECK(model_error("{").find("model file") == 0);
  CHECK_THROWS_AS(load_model("builtin:k3"), UsageError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), UsageError);
}
