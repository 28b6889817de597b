#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardrail/date.hpp"

namespace guardrail {

enum class Direction { higher_is_better, lower_is_better };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

enum class TransformKind {
  resample_weekly,
  percent_change_from_start,
  per_million,
  window_clip,
  validate,
};

std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view text);

struct TransformDescriptor {
  TransformKind kind;
  std::map<std::string, std::string> params;

  friend bool operator==(const TransformDescriptor&, const TransformDescriptor&) = default;
};

struct ItemSeries {
  std::string id;
  std::string display_name;
  std::vector<double> values;          // NaN wherever `missing` is set
  std::vector<std::uint8_t> missing;   // 1 = masked
  std::optional<double> population;    // raw-count datasets only

  bool is_missing(std::size_t t) const { return missing[t] != 0; }
  std::size_t missing_count() const;
  // Index of the first/last unmasked cell.
  std::optional<std::size_t> first_observed() const;
  std::optional<std::size_t> last_observed() const;

  friend bool operator==(const ItemSeries&, const ItemSeries&);
};

// Aligned item x timestep matrix with per-item metadata and the ordered log of
// transforms applied since ingest. Immutable once constructed: every
// operation in core-data returns a new dataset.
class TimeSeriesDataset {
 public:
  // Throws Error(invalid_input) if the alignment invariants do not hold.
  // Masked cells are normalized to NaN.
  TimeSeriesDataset(std::string id, Direction direction, std::vector<Date> timesteps,
                    std::vector<ItemSeries> items, std::vector<TransformDescriptor> transform_log);

  const std::string& id() const { return id_; }
  Direction direction() const { return direction_; }
  const std::vector<Date>& timesteps() const { return timesteps_; }
  const std::vector<ItemSeries>& items() const { return items_; }
  const std::vector<TransformDescriptor>& transform_log() const { return log_; }

  std::size_t item_count() const { return items_.size(); }
  std::size_t timestep_count() const { return timesteps_.size(); }

  std::optional<std::size_t> index_of(std::string_view item_id) const;
  // Throws Error(not_found).
  const ItemSeries& item(std::string_view item_id) const;
  bool contains(std::string_view item_id) const { return index_of(item_id).has_value(); }

  bool has_masked_cells() const;
  bool has_transform(TransformKind kind) const;

  // Throws Error(invalid_argument) naming `operation` when any cell is masked.
  void require_complete(std::string_view operation) const;

  friend bool operator==(const TimeSeriesDataset&, const TimeSeriesDataset&);

 private:
  std::string id_;
  Direction direction_;
  std::vector<Date> timesteps_;
  std::vector<ItemSeries> items_;
  std::vector<TransformDescriptor> log_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Row-major copy of all item values; rows follow dataset item order.
std::vector<std::vector<double>> value_rows(const TimeSeriesDataset& ds);

}  // namespace guardrail
