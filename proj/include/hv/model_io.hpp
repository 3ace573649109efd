#pragma once

#include <string>
#include <string_view>

#include "hv/frobenius.hpp"

namespace hv {

/// Parses a model file (JSON). Throws ModelError naming the offending field.
ModelSpec parse_model_json(std::string_view text);
std::string model_to_json(const ModelSpec& spec);

/// "builtin:<name>" or a path to a model file.
ModelPtr load_model(const std::string& ref);

}  // namespace hv
