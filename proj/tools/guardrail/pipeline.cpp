#include "pipeline.hpp"

#include <optional>

#include "guardrail/error.hpp"
#include "guardrail/transforms.hpp"

namespace guardrail::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<PipelineStep> parse_pipeline(const std::string& text) {
  std::vector<PipelineStep> steps;
  if (text.empty()) return {{TransformKind::validate, {}}};
  bool has_validate = false;
  for (const auto& token : split(text, ',')) {
    if (token.empty()) continue;
    const auto colon = token.find(':');
    const auto name = token.substr(0, colon);
    const auto arg = colon == std::string::npos ? std::string() : token.substr(colon + 1);
    if (name == "resample_weekly") {
      if (!arg.empty() && !parse_weekday(arg)) {
        fail(ErrorKind::invalid_argument, "resample_weekly: unknown weekday '" + arg + "'");
      }
      steps.push_back({TransformKind::resample_weekly, arg.empty() ? std::vector<std::string>{}
                                                                   : std::vector<std::string>{arg}});
    } else if (name == "pct_change" || name == "percent_change_from_start") {
      if (!has_validate) {
        steps.push_back({TransformKind::validate, {}});
        has_validate = true;
      }
      steps.push_back({TransformKind::percent_change_from_start, {}});
    } else if (name == "per_million") {
      steps.push_back({TransformKind::per_million, {}});
    } else if (name == "window" || name == "window_clip") {
      const auto dots = arg.find("..");
      if (dots == std::string::npos) {
        fail(ErrorKind::invalid_argument, "window expects START..END, got '" + arg + "'");
      }
      const auto start = arg.substr(0, dots), end = arg.substr(dots + 2);
      if (!Date::parse(start) || !Date::parse(end)) {
        fail(ErrorKind::invalid_argument, "window dates must be YYYY-MM-DD, got '" + arg + "'");
      }
      steps.push_back({TransformKind::window_clip, {start, end}});
    } else if (name == "validate") {
      if (has_validate) fail(ErrorKind::invalid_argument, "validate listed twice");
      steps.push_back({TransformKind::validate, {}});
      has_validate = true;
    } else {
      fail(ErrorKind::invalid_argument,
           "unknown transform '" + token +
               "' (valid: resample_weekly[:day], pct_change, per_million, window:START..END, validate)");
    }
  }
  if (!has_validate) steps.push_back({TransformKind::validate, {}});
  return steps;
}

PipelineResult run_pipeline(const TimeSeriesDataset& raw, const std::vector<PipelineStep>& steps,
                            const ValidationPolicy& policy) {
  TimeSeriesDataset ds = raw;
  std::optional<ValidationReport> report;
  std::vector<std::string> clipped;
  for (const auto& step : steps) {
    switch (step.kind) {
      case TransformKind::resample_weekly:
        ds = step.args.empty() ? resample_weekly(ds) : resample_weekly(ds, *parse_weekday(step.args[0]));
        break;
      case TransformKind::percent_change_from_start:
        ds = percent_change_from_start(ds);
        break;
      case TransformKind::per_million:
        ds = per_million(ds);
        break;
      case TransformKind::window_clip: {
        auto r = window_clip(ds, Date::parse_or_throw(step.args[0]), Date::parse_or_throw(step.args[1]));
        clipped.insert(clipped.end(), r.dropped.begin(), r.dropped.end());
        ds = std::move(r.dataset);
        break;
      }
      case TransformKind::validate: {
        auto r = validate(ds, policy);
        ds = std::move(r.dataset);
        report = std::move(r.report);
        break;
      }
    }
  }
  if (!report) fail(ErrorKind::invalid_argument, "pipeline has no validate step");
  return {std::move(ds), std::move(*report), std::move(clipped)};
}

}  // namespace guardrail::cli
