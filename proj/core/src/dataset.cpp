#include "guardrail/dataset.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "guardrail/error.hpp"

namespace guardrail {

std::string_view to_string(Direction d) {
  return d == Direction::higher_is_better ? "higher_is_better" : "lower_is_better";
}

Direction parse_direction(std::string_view text) {
  if (text == "higher_is_better") return Direction::higher_is_better;
  if (text == "lower_is_better") return Direction::lower_is_better;
  fail(ErrorKind::invalid_argument, "unknown direction '" + std::string(text) +
                                        "' (expected higher_is_better or lower_is_better)");
}

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::resample_weekly: return "resample_weekly";
    case TransformKind::percent_change_from_start: return "percent_change_from_start";
    case TransformKind::per_million: return "per_million";
    case TransformKind::window_clip: return "window_clip";
    case TransformKind::validate: return "validate";
  }
  return "unknown";
}

TransformKind parse_transform_kind(std::string_view text) {
  for (auto k : {TransformKind::resample_weekly, TransformKind::percent_change_from_start,
                 TransformKind::per_million, TransformKind::window_clip, TransformKind::validate}) {
    if (to_string(k) == text) return k;
  }
  fail(ErrorKind::invalid_input, "unknown transform kind '" + std::string(text) + "'");
}

std::size_t ItemSeries::missing_count() const {
  std::size_t n = 0;
  for (auto m : missing) n += m != 0;
  return n;
}

std::optional<std::size_t> ItemSeries::first_observed() const {
  for (std::size_t t = 0; t < missing.size(); ++t) {
    if (!missing[t]) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> ItemSeries::last_observed() const {
  for (std::size_t t = missing.size(); t-- > 0;) {
    if (!missing[t]) return t;
  }
  return std::nullopt;
}

bool operator==(const ItemSeries& a, const ItemSeries& b) {
  if (a.id != b.id || a.display_name != b.display_name || a.missing != b.missing ||
      a.population != b.population || a.values.size() != b.values.size()) {
    return false;
  }
  // Bitwise so that NaN placeholders compare equal and -0.0 != 0.0.
  for (std::size_t t = 0; t < a.values.size(); ++t) {
    if (std::memcmp(&a.values[t], &b.values[t], sizeof(double)) != 0) return false;
  }
  return true;
}

TimeSeriesDataset::TimeSeriesDataset(std::string id, Direction direction,
                                     std::vector<Date> timesteps, std::vector<ItemSeries> items,
                                     std::vector<TransformDescriptor> transform_log)
    : id_(std::move(id)),
      direction_(direction),
      timesteps_(std::move(timesteps)),
      items_(std::move(items)),
      log_(std::move(transform_log)) {
  for (std::size_t t = 1; t < timesteps_.size(); ++t) {
    if (!(timesteps_[t - 1] < timesteps_[t])) {
      fail(ErrorKind::invalid_input, "timesteps must be strictly increasing (at " +
                                         timesteps_[t].iso() + ")");
    }
  }
  const auto n = timesteps_.size();
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& item = items_[i];
    if (item.missing.empty() && !item.values.empty()) item.missing.assign(item.values.size(), 0);
    if (item.values.size() != n || item.missing.size() != n) {
      fail(ErrorKind::invalid_input, "item '" + item.id + "' has " +
                                         std::to_string(item.values.size()) + " values for " +
                                         std::to_string(n) + " timesteps");
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (item.missing[t]) {
        item.values[t] = std::numeric_limits<double>::quiet_NaN();
      } else if (!std::isfinite(item.values[t])) {
        fail(ErrorKind::invalid_input, "item '" + item.id + "' has a non-finite value at " +
                                           timesteps_[t].iso());
      }
    }
    if (item.display_name.empty()) item.display_name = item.id;
    if (!index_.emplace(item.id, i).second) {
      fail(ErrorKind::invalid_input, "duplicate item id '" + item.id + "'");
    }
  }
}

std::optional<std::size_t> TimeSeriesDataset::index_of(std::string_view item_id) const {
  auto it = index_.find(item_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ItemSeries& TimeSeriesDataset::item(std::string_view item_id) const {
  auto idx = index_of(item_id);
  if (!idx) {
    fail(ErrorKind::not_found,
         "unknown item '" + std::string(item_id) + "' in dataset '" + id_ + "'");
  }
  return items_[*idx];
}

bool TimeSeriesDataset::has_masked_cells() const {
  for (const auto& item : items_) {
    if (item.missing_count() > 0) return true;
  }
  return false;
}

bool TimeSeriesDataset::has_transform(TransformKind kind) const {
  for (const auto& d : log_) {
    if (d.kind == kind) return true;
  }
  return false;
}

void TimeSeriesDataset::require_complete(std::string_view operation) const {
  for (const auto& item : items_) {
    if (item.missing_count() > 0) {
      fail(ErrorKind::invalid_argument, std::string(operation) +
                                            " requires a validated dataset; item '" + item.id +
                                            "' has masked cells");
    }
  }
}

bool operator==(const TimeSeriesDataset& a, const TimeSeriesDataset& b) {
  return a.id_ == b.id_ && a.direction_ == b.direction_ && a.timesteps_ == b.timesteps_ &&
         a.items_ == b.items_ && a.log_ == b.log_;
}

std::vector<std::vector<double>> value_rows(const TimeSeriesDataset& ds) {
  std::vector<std::vector<double>> rows;
  rows.reserve(ds.item_count());
  for (const auto& item : ds.items()) rows.push_back(item.values);
  return rows;
}

}  // namespace guardrail
