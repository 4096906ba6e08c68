#pragma once

#include "tsolve/expsum.hpp"
#include "tsolve/growth.hpp"
#include "tsolve/scheme_exp.hpp"
#include "tsolve/separable_model.hpp"
#include "tsolve/spectral_pipeline.hpp"
#include "tsolve/tensor.hpp"
#include "tsolve/validation.hpp"

#include <json.hpp>

#include <functional>
#include <string>

namespace tsolve {

using json = nlohmann::json;

json expsum_json(const ExpSum& s);
ExpSum expsum_from_json(const json& j);

json tensor_json(const TensorSum& t);
TensorSum tensor_from_json(const json& j, const std::string& path);

json params_json(const SchemeParameters& p);
SchemeParameters params_from_json(const json& j, const std::string& path);

json growth_json(const GrowthClass& g);
GrowthClass growth_from_json(const json& j, const std::string& path);

SeparableOperator operator_from_json(const json& j, const std::string& path);

json report_json(const SolveReport& r);
json report_json(const SpectralReport& r);
json criterion_json(const CriterionResult& c);

// "const:c", "poly:<expression in x>", "gauss:m,s".
std::function<double(double)> parse_generator(const std::string& text, const std::string& path);

// Field accessors raising ConfigError with the full path.
const json& require(const json& j, const std::string& key, const std::string& path);
double require_number(const json& j, const std::string& key, const std::string& path);

} // namespace tsolve
