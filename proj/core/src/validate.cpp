#include "guardrail/validate.hpp"

#include "guardrail/canonical.hpp"
#include "guardrail/error.hpp"

namespace guardrail {

namespace {

std::string_view to_string(FillKind k) {
  switch (k) {
    case FillKind::interior: return "interior";
    case FillKind::leading: return "leading";
    case FillKind::trailing: return "trailing";
  }
  return "unknown";
}

}  // namespace

ValidationResult validate(const TimeSeriesDataset& ds, const ValidationPolicy& policy) {
  if (!(policy.max_missing_fraction >= 0.0 && policy.max_missing_fraction <= 1.0)) {
    fail(ErrorKind::invalid_argument, "max_missing_fraction must lie in [0, 1]");
  }
  const auto& ts = ds.timesteps();
  const auto n = ts.size();
  ValidationReport report;
  report.dataset_id = ds.id();
  std::vector<ItemSeries> kept;

  for (const auto& src : ds.items()) {
    const auto missing = src.missing_count();
    const double fraction = n == 0 ? 1.0 : static_cast<double>(missing) / static_cast<double>(n);
    if (missing == n || fraction > policy.max_missing_fraction) {
      report.removed.push_back({src.id, fraction});
      continue;
    }
    ItemSeries out = src;
    const auto first = *src.first_observed();
    const auto last = *src.last_observed();
    for (std::size_t t = 0; t < first; ++t) {
      out.values[t] = src.values[first];
      report.filled.push_back({src.id, ts[t], out.values[t], FillKind::leading});
    }
    for (std::size_t t = last + 1; t < n; ++t) {
      out.values[t] = src.values[last];
      report.filled.push_back({src.id, ts[t], out.values[t], FillKind::trailing});
    }
    std::size_t prev = first;
    for (std::size_t t = first + 1; t <= last; ++t) {
      if (src.is_missing(t)) continue;
      if (t > prev + 1) {
        const double v0 = src.values[prev], v1 = src.values[t];
        const double span = static_cast<double>(ts[t] - ts[prev]);
        for (std::size_t g = prev + 1; g < t; ++g) {
          const double w = static_cast<double>(ts[g] - ts[prev]) / span;
          out.values[g] = v0 + (v1 - v0) * w;
          report.filled.push_back({src.id, ts[g], out.values[g], FillKind::interior});
        }
      }
      prev = t;
    }
    std::fill(out.missing.begin(), out.missing.end(), 0);
    kept.push_back(std::move(out));
  }
  if (kept.empty()) {
    fail(ErrorKind::invalid_input,
         "validation removed every item of dataset '" + ds.id() + "'");
  }

  auto log = ds.transform_log();
  log.push_back({TransformKind::validate,
                 {{"max_missing_fraction", shortest(policy.max_missing_fraction)},
                  {"interpolation", "linear"}}});
  return {TimeSeriesDataset(ds.id(), ds.direction(), ts, std::move(kept), std::move(log)),
          std::move(report)};
}

nlohmann::json to_json(const ValidationReport& report) {
  Json removed = Json::array();
  for (const auto& r : report.removed) {
    removed.push_back({{"item_id", r.item_id}, {"missing_fraction", r.missing_fraction}});
  }
  Json filled = Json::array();
  for (const auto& f : report.filled) {
    filled.push_back({{"item_id", f.item_id},
                      {"date", f.date.iso()},
                      {"value", f.value},
                      {"kind", std::string(to_string(f.kind))}});
  }
  return {{"dataset_id", report.dataset_id}, {"removed", removed}, {"filled", filled}};
}

}  // namespace guardrail
