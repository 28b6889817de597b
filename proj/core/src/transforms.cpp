#include "guardrail/transforms.hpp"

#include <cmath>
#include <map>

#include "guardrail/error.hpp"
#include "guardrail/validate.hpp"

namespace guardrail {

namespace {

std::vector<TransformDescriptor> extend_log(const TimeSeriesDataset& ds, TransformDescriptor d) {
  auto log = ds.transform_log();
  log.push_back(std::move(d));
  return log;
}

Date week_label(Date d, std::chrono::weekday anchor) {
  auto ahead = (anchor - d.weekday()).count();  // 0..6
  return d.plus_days(ahead);
}

double parse_param_double(const TransformDescriptor& d, const std::string& key) {
  auto it = d.params.find(key);
  if (it == d.params.end()) {
    fail(ErrorKind::invalid_input,
         std::string(to_string(d.kind)) + " descriptor is missing param '" + key + "'");
  }
  try {
    std::size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_input, "bad numeric param " + key + "='" + it->second + "'");
  }
}

const std::string& param(const TransformDescriptor& d, const std::string& key) {
  auto it = d.params.find(key);
  if (it == d.params.end()) {
    fail(ErrorKind::invalid_input,
         std::string(to_string(d.kind)) + " descriptor is missing param '" + key + "'");
  }
  return it->second;
}

}  // namespace

TimeSeriesDataset resample_weekly(const TimeSeriesDataset& ds, std::chrono::weekday anchor) {
  if (ds.has_transform(TransformKind::resample_weekly)) {
    fail(ErrorKind::invalid_argument, "dataset '" + ds.id() + "' is already weekly");
  }
  const auto& ts = ds.timesteps();
  for (std::size_t t = 1; t < ts.size(); ++t) {
    if (ts[t] - ts[t - 1] >= 7) {
      fail(ErrorKind::invalid_argument, "dataset '" + ds.id() +
                                            "' is already coarser than weekly (gap " +
                                            ts[t - 1].iso() + " .. " + ts[t].iso() + ")");
    }
  }
  if (ts.empty()) fail(ErrorKind::invalid_argument, "cannot resample an empty dataset");

  const Date first = week_label(ts.front(), anchor);
  const Date last = week_label(ts.back(), anchor);
  const auto weeks = static_cast<std::size_t>((last - first) / 7 + 1);
  std::vector<Date> labels;
  labels.reserve(weeks);
  for (std::size_t w = 0; w < weeks; ++w) labels.push_back(first.plus_days(7 * static_cast<long>(w)));

  std::vector<std::size_t> week_of(ts.size());
  for (std::size_t t = 0; t < ts.size(); ++t) {
    week_of[t] = static_cast<std::size_t>((week_label(ts[t], anchor) - first) / 7);
  }

  std::vector<ItemSeries> items;
  items.reserve(ds.item_count());
  for (const auto& src : ds.items()) {
    ItemSeries out{src.id, src.display_name, std::vector<double>(weeks, 0.0),
                   std::vector<std::uint8_t>(weeks, 1), src.population};
    // Timesteps are increasing, so the last write per week wins.
    for (std::size_t t = 0; t < ts.size(); ++t) {
      if (src.is_missing(t)) continue;
      out.values[week_of[t]] = src.values[t];
      out.missing[week_of[t]] = 0;
    }
    items.push_back(std::move(out));
  }
  return TimeSeriesDataset(ds.id(), ds.direction(), std::move(labels), std::move(items),
                           extend_log(ds, {TransformKind::resample_weekly,
                                           {{"anchor", weekday_name(anchor)}}}));
}

TimeSeriesDataset percent_change_from_start(const TimeSeriesDataset& ds) {
  if (ds.has_transform(TransformKind::percent_change_from_start)) {
    fail(ErrorKind::invalid_argument,
         "dataset '" + ds.id() + "' already has percent_change_from_start applied");
  }
  if (ds.timestep_count() == 0) fail(ErrorKind::invalid_argument, "empty dataset");
  std::vector<ItemSeries> items;
  items.reserve(ds.item_count());
  for (const auto& src : ds.items()) {
    if (src.is_missing(0)) {
      fail(ErrorKind::invalid_argument,
           "item '" + src.id + "' has no value at the first timestep " + ds.timesteps()[0].iso());
    }
    const double base = src.values[0];
    if (base == 0.0) {
      fail(ErrorKind::invalid_argument, "item '" + src.id + "' starts at zero");
    }
    ItemSeries out = src;
    for (std::size_t t = 0; t < out.values.size(); ++t) {
      if (!out.is_missing(t)) out.values[t] = 100.0 * (src.values[t] - base) / base;
    }
    out.values[0] = 0.0;
    items.push_back(std::move(out));
  }
  return TimeSeriesDataset(ds.id(), ds.direction(), ds.timesteps(), std::move(items),
                           extend_log(ds, {TransformKind::percent_change_from_start, {}}));
}

TimeSeriesDataset per_million(const TimeSeriesDataset& ds) {
  if (ds.has_transform(TransformKind::per_million)) {
    fail(ErrorKind::invalid_argument, "dataset '" + ds.id() + "' is already per million");
  }
  std::vector<ItemSeries> items;
  items.reserve(ds.item_count());
  for (const auto& src : ds.items()) {
    if (!src.population) {
      fail(ErrorKind::invalid_argument, "item '" + src.id + "' has no population");
    }
    ItemSeries out = src;
    for (std::size_t t = 0; t < out.values.size(); ++t) {
      if (!out.is_missing(t)) out.values[t] = src.values[t] * 1e6 / *src.population;
    }
    items.push_back(std::move(out));
  }
  return TimeSeriesDataset(ds.id(), ds.direction(), ds.timesteps(), std::move(items),
                           extend_log(ds, {TransformKind::per_million, {}}));
}

ClipResult window_clip(const TimeSeriesDataset& ds, Date start, Date end) {
  if (!(start < end)) {
    fail(ErrorKind::invalid_argument,
         "window start " + start.iso() + " must precede end " + end.iso());
  }
  const auto& ts = ds.timesteps();
  std::size_t lo = 0;
  while (lo < ts.size() && ts[lo] < start) ++lo;
  std::size_t hi = lo;
  while (hi < ts.size() && ts[hi] <= end) ++hi;
  if (lo == hi) {
    fail(ErrorKind::invalid_argument, "window " + start.iso() + ".." + end.iso() +
                                          " contains no timesteps of dataset '" + ds.id() + "'");
  }

  std::vector<Date> kept(ts.begin() + static_cast<long>(lo), ts.begin() + static_cast<long>(hi));
  std::vector<ItemSeries> items;
  std::vector<std::string> dropped;
  for (const auto& src : ds.items()) {
    ItemSeries out{src.id, src.display_name,
                   {src.values.begin() + static_cast<long>(lo), src.values.begin() + static_cast<long>(hi)},
                   {src.missing.begin() + static_cast<long>(lo), src.missing.begin() + static_cast<long>(hi)},
                   src.population};
    if (!out.first_observed()) {
      dropped.push_back(src.id);
      continue;
    }
    items.push_back(std::move(out));
  }
  if (items.empty()) {
    fail(ErrorKind::invalid_argument, "window " + start.iso() + ".." + end.iso() +
                                          " leaves no item with data");
  }
  TimeSeriesDataset out(ds.id(), ds.direction(), std::move(kept), std::move(items),
                        extend_log(ds, {TransformKind::window_clip,
                                        {{"start", start.iso()}, {"end", end.iso()}}}));
  return {std::move(out), std::move(dropped)};
}

TimeSeriesDataset apply_transform(const TimeSeriesDataset& ds, const TransformDescriptor& desc) {
  switch (desc.kind) {
    case TransformKind::resample_weekly: {
      auto wd = parse_weekday(param(desc, "anchor"));
      if (!wd) fail(ErrorKind::invalid_input, "bad weekday '" + param(desc, "anchor") + "'");
      return resample_weekly(ds, *wd);
    }
    case TransformKind::percent_change_from_start:
      return percent_change_from_start(ds);
    case TransformKind::per_million:
      return per_million(ds);
    case TransformKind::window_clip:
      return window_clip(ds, Date::parse_or_throw(param(desc, "start")),
                         Date::parse_or_throw(param(desc, "end")))
          .dataset;
    case TransformKind::validate: {
      ValidationPolicy policy;
      policy.max_missing_fraction = parse_param_double(desc, "max_missing_fraction");
      if (param(desc, "interpolation") != "linear") {
        fail(ErrorKind::invalid_input, "unknown interpolation '" + param(desc, "interpolation") + "'");
      }
      return validate(ds, policy).dataset;
    }
  }
  fail(ErrorKind::invalid_input, "unknown transform");
}

TimeSeriesDataset replay_transforms(const TimeSeriesDataset& raw,
                                    const std::vector<TransformDescriptor>& log) {
  if (!raw.transform_log().empty()) {
    fail(ErrorKind::invalid_argument, "replay expects raw ingest output with an empty log");
  }
  TimeSeriesDataset ds = raw;
  for (const auto& d : log) ds = apply_transform(ds, d);
  return ds;
}

}  // namespace guardrail
