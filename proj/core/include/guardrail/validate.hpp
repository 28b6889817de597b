#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "guardrail/dataset.hpp"

namespace guardrail {

enum class Interpolation { linear };

struct ValidationPolicy {
  double max_missing_fraction = 0.05;
  Interpolation interpolation = Interpolation::linear;
};

enum class FillKind { interior, leading, trailing };

struct RemovedItem {
  std::string item_id;
  double missing_fraction;
};

struct FilledCell {
  std::string item_id;
  Date date;
  double value;
  FillKind kind;
};

struct ValidationReport {
  std::string dataset_id;
  std::vector<RemovedItem> removed;
  std::vector<FilledCell> filled;
};

struct ValidationResult {
  TimeSeriesDataset dataset;
  ValidationReport report;
};

// Removes items whose missing fraction exceeds the budget (fully masked items
// are always removed), fills interior gaps by linear interpolation on the
// calendar axis and leading/trailing gaps with the nearest observed value.
// The output has no masked cells. Throws Error(invalid_input) if every item is
// removed.
ValidationResult validate(const TimeSeriesDataset& ds, const ValidationPolicy& policy = {});

nlohmann::json to_json(const ValidationReport& report);

}  // namespace guardrail
