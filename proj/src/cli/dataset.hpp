#pragma once

#include <string>
#include <vector>

#include "rwt/core_data.hpp"
#include "rwt/ingest.hpp"

namespace rwt::cli {

// A prepared run directory: features.csv, scaler.json and split.json.
struct Dataset {
  FeatureTable table;
  std::vector<bool> is_test;  // per row
  Scaler scaler;

  std::vector<std::size_t> rows(bool test) const;
  FeatureTable part(bool test) const { return table.subset(rows(test)); }
};

void write_dataset(const std::string& dir, const FeatureTable& table, const SplitPlan& plan,
                   const Scaler& scaler, ScalerMode mode);

// Throws Error(kFileNotFound) for a missing file and Error(kSchemaMismatch)
// for malformed contents.
Dataset read_dataset(const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rwt::cli
