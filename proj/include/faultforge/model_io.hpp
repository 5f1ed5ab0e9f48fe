#pragma once

#include <string>
#include <variant>

#include "faultforge/linear_model.hpp"
#include "faultforge/random_forest.hpp"
#include "faultforge/svm.hpp"

namespace faultforge::model_io {

using AnyModel = std::variant<classifiers::LinearModel, classifiers::ForestModel,
                              classifiers::SvmModel>;

// Versioned plain-text format: a "faultforge-model <version> <kind>" header
// line followed by kind-specific lines; doubles are printed with %.17g so a
// round trip is value-exact. Documented in the README.
std::string to_text(const AnyModel& m);
AnyModel from_text(const std::string& text);

void save_model(const AnyModel& m, const std::string& path);
AnyModel load_model(const std::string& path);

}  // namespace faultforge::model_io
