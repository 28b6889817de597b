#pragma once

#include <optional>
#include <string>
#include <vector>

#include "guardrail/canonical.hpp"
#include "guardrail/dataset.hpp"
#include "guardrail/strategy.hpp"

namespace guardrail {

struct StrokeStyle {
  std::string color;
  double width = 1.0;
  std::optional<std::string> dash;  // SVG stroke-dasharray
};

// Focal: one saturated hue, slightly thicker stroke. Context: gray, dashed.
struct ChartStyle {
  StrokeStyle focal{"#d7263d", 2.5, std::nullopt};
  StrokeStyle context{"#9a9a9a", 1.25, std::string("5 4")};
};

struct FocalSeries {
  std::string item_id;
  std::string display_name;
  std::vector<double> values;
};

struct ChartAxes {
  std::vector<Date> x;
  std::string y_label;
  std::string y_units;
};

struct ChartSpec {
  std::string dataset_id;
  FocalSeries focal;
  std::optional<GuardrailSet> guardrails;  // nullopt renders the control view
  ChartStyle style;
  ChartAxes axes;
  std::optional<std::string> caption;
};

// Y label and units follow the dataset's transform log.
ChartSpec make_chart_spec(const TimeSeriesDataset& ds, const std::string& focal_id,
                          std::optional<GuardrailSet> guardrails,
                          std::optional<std::string> caption = std::nullopt);

Json to_json(const ChartSpec& spec);

// Static 720x405 SVG: context paths behind the focal path, end-of-line labels
// with collision nudging, percentile tags in context labels.
std::string render_svg(const ChartSpec& spec);

}  // namespace guardrail
