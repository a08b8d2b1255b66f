#pragma once

#include <string>
#include <vector>

#include "stratlasso/types.hpp"

namespace stratlasso {

/// Shortest exact decimal form of a double (round-trips bit-for-bit).
std::string format_double(double v);

/// Splits one CSV line; no quoting, fields must not contain commas.
std::vector<std::string> split_csv_line(const std::string& line);

/// Sidecar schema, one line per feature: `name,kind,candidate_flag` with
/// kind `continuous`, `categorical` (levels inferred from data, sorted) or
/// `categorical:A|B|C` (explicit levels; unseen data levels are rejected).
std::vector<FeatureMeta> read_schema(const std::string& path);
void write_schema(const std::vector<FeatureMeta>& features, const std::string& path);

/// Reads a dataset from CSV + schema. The header must contain the outcome
/// column (0/1), the group column (non-empty strings) and exactly the schema
/// features. Missing cells and unknown categorical levels are rejected.
Dataset read_dataset(const std::string& data_path, const std::string& schema_path,
                     const std::string& outcome_col = "outcome",
                     const std::string& group_col = "group");

void write_dataset(const Dataset& dataset, const std::string& data_path,
                   const std::string& outcome_col = "outcome",
                   const std::string& group_col = "group");

}  // namespace stratlasso
