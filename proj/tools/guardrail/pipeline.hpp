#pragma once

#include <string>
#include <vector>

#include "guardrail/dataset.hpp"
#include "guardrail/validate.hpp"

namespace guardrail::cli {

struct PipelineStep {
  TransformKind kind;
  std::vector<std::string> args;  // anchor day, or window start/end
};

// Parses "per_million,window:2020-04-01..2021-08-31" style lists. Tokens:
//   resample_weekly[:day]  pct_change  per_million  window:START..END  validate
// A validate step is inserted before pct_change (its base value must be
// observed) or appended at the end when the list has none.
std::vector<PipelineStep> parse_pipeline(const std::string& text);

struct PipelineResult {
  TimeSeriesDataset dataset;
  ValidationReport report;
  std::vector<std::string> clipped_items;  // items dropped by window clipping
};

PipelineResult run_pipeline(const TimeSeriesDataset& raw, const std::vector<PipelineStep>& steps,
                            const ValidationPolicy& policy);

}  // namespace guardrail::cli
