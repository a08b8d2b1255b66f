#pragma once

#include <string>

#include "stratlasso/workflow.hpp"

namespace stratlasso::serialize {

/// Model files are JSON: coefficients stored sparse as [index, value]
/// pairs, standardization records and group structures inline, doubles in
/// shortest exact form so a save/load cycle is value-identical.
void save_model(const workflow::ModelFile& model, const std::string& path);
workflow::ModelFile load_model(const std::string& path);

}  // namespace stratlasso::serialize
