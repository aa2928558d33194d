#pragma once

#include <string>
#include <variant>

#include "hdfl/linear.hpp"
#include "hdfl/mlp.hpp"
#include "hdfl/tree.hpp"

namespace hdfl {

/// Any trained classifier. Models are immutable after training and safe to
/// share across threads.
using Model = std::variant<LinearModel, MlpModel, TreeModel>;

double decision_value(const Model& model, const Vec& x);
int predict(const Model& model, const Vec& x);
int model_input_dim(const Model& model);
std::string model_kind(const Model& model);

/// JSON with explicit shape fields. Every 64-bit float is stored as a
/// 17-significant-digit decimal string so the round-trip is bit-exact.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace hdfl
