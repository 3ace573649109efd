#include "hv/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hv {

namespace {

using nlohmann::json;

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + key + ": missing");
  return *it;
}

std::string text_field(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) throw ModelError(path + key + ": expected a string");
  return v.get<std::string>();
}

void exact_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ModelError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ModelError((where.empty() ? "" : where + ".") + k + ": unknown field");
  }
}

LabeledCoeffs coeffs(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ModelError(where + ": expected an array");
  LabeledCoeffs out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    exact_keys(arr[i], {"label", "coeff"}, at);
    const std::string label = text_field(arr[i], "label", at + ".");
    const std::string c = text_field(arr[i], "coeff", at + ".");
    try {
      out.emplace_back(label, Rational::parse_canonical(c));
    } catch (const std::exception&) {
      throw ModelError(at + ".coeff: not a rational in lowest terms: '" + c + "'");
    }
  }
  return out;
}

nlohmann::ordered_json coeffs_json(const LabeledCoeffs& cs) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (const auto& [l, c] : cs) a.push_back({{"label", l}, {"coeff", c.str()}});
  return a;
}

}  // namespace

ModelSpec parse_model_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
  exact_keys(j, {"name", "basis", "unit", "products", "integral", "canonical"}, "");
  ModelSpec s;
  s.name = text_field(j, "name", "");
  const json& basis = field(j, "basis", "");
  if (!basis.is_array()) throw ModelError("basis: expected an array");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string at = "basis[" + std::to_string(i) + "]";
    exact_keys(basis[i], {"label", "degree"}, at);
    ModelSpec::BasisEntry b;
    b.label = text_field(basis[i], "label", at + ".");
    const json& d = field(basis[i], "degree", at + ".");
    if (!d.is_number_integer()) throw ModelError(at + ".degree: expected an integer");
    b.degree = d.get<int>();
    s.basis.push_back(std::move(b));
  }
  s.unit = text_field(j, "unit", "");
  const json& products = field(j, "products", "");
  if (!products.is_array()) throw ModelError("products: expected an array");
  for (std::size_t i = 0; i < products.size(); ++i) {
    const std::string at = "products[" + std::to_string(i) + "]";
    exact_keys(products[i], {"left", "right", "result"}, at);
    ModelSpec::ProductEntry p;
    p.left = text_field(products[i], "left", at + ".");
    p.right = text_field(products[i], "right", at + ".");
    p.result = coeffs(field(products[i], "result", at + "."), at + ".result");
    s.products.push_back(std::move(p));
  }
  s.integral = coeffs(field(j, "integral", ""), "integral");
  s.canonical = coeffs(field(j, "canonical", ""), "canonical");
  return s;
}

std::string model_to_json(const ModelSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["basis"] = nlohmann::ordered_json::array();
  for (const auto& b : s.basis) j["basis"].push_back({{"label", b.label}, {"degree", b.degree}});
  j["unit"] = s.unit;
  j["products"] = nlohmann::ordered_json::array();
  for (const auto& p : s.products) {
    j["products"].push_back({{"left", p.left}, {"right", p.right}, {"result", coeffs_json(p.result)}});
  }
  j["integral"] = coeffs_json(s.integral);
  j["canonical"] = coeffs_json(s.canonical);
  return j.dump(2) + "\n";
}

ModelPtr load_model(const std::string& ref) {
  constexpr std::string_view prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) {
    const std::string name = ref.substr(prefix.size());
    for (const auto& b : builtin_model_names()) {
      if (b == name) return builtin_model(name);
    }
    throw UsageError("unknown built-in model '" + name + "'");
  }
  std::ifstream in(ref);
  if (!in) throw UsageError("cannot read model file '" + ref + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return SurfaceModel::build(parse_model_json(ss.str()));
}

}  // namespace hv
