#include "guardrail/chart.hpp"

namespace guardrail {

namespace {

Json to_json(const StrokeStyle& s) {
  Json j = {{"color", s.color}, {"stroke_width", s.width}};
  j["dash"] = s.dash ? Json(*s.dash) : Json(nullptr);
  return j;
}

}  // namespace

ChartSpec make_chart_spec(const TimeSeriesDataset& ds, const std::string& focal_id,
                          std::optional<GuardrailSet> guardrails,
                          std::optional<std::string> caption) {
  ds.require_complete("chart");
  const auto& item = ds.item(focal_id);
  ChartSpec spec;
  spec.dataset_id = ds.id();
  spec.focal = {item.id, item.display_name, item.values};
  spec.guardrails = std::move(guardrails);
  spec.axes.x = ds.timesteps();
  spec.axes.y_label = "Value";
  if (ds.has_transform(TransformKind::percent_change_from_start)) {
    spec.axes.y_label = "Change since start";
    spec.axes.y_units = "%";
  } else if (ds.has_transform(TransformKind::per_million)) {
    spec.axes.y_label = "Cumulative count per million";
    spec.axes.y_units = "per million";
  }
  spec.caption = std::move(caption);
  return spec;
}

Json to_json(const ChartSpec& spec) {
  Json x = Json::array();
  for (const auto& d : spec.axes.x) x.push_back(d.iso());
  Json j = {{"dataset_id", spec.dataset_id},
            {"focal", {{"item_id", spec.focal.item_id},
                       {"display_name", spec.focal.display_name},
                       {"values", spec.focal.values},
                       {"color_role", "focal"}}},
            {"style", {{"focal", to_json(spec.style.focal)}, {"context", to_json(spec.style.context)}}},
            {"axes", {{"x", std::move(x)},
                      {"y", {{"label", spec.axes.y_label}, {"units", spec.axes.y_units}}}}}};
  j["guardrails"] = spec.guardrails ? to_json(*spec.guardrails) : Json(nullptr);
  j["caption"] = spec.caption ? Json(*spec.caption) : Json(nullptr);
  return j;
}

}  // namespace guardrail
