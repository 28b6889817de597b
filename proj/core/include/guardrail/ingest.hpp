#pragma once

#include <istream>
#include <optional>
#include <string>

#include "guardrail/dataset.hpp"

namespace guardrail {

// Column mapping for long-format CSV (one observation per row).
struct LongSchema {
  std::string item_id = "item_id";
  std::string date = "date";
  std::string value = "value";
  std::optional<std::string> population;    // raw counts; pair with per_million
  std::optional<std::string> display_name;
};

// Wide format: one date column, every other column is an item.
struct WideSchema {
  std::string date = "date";
};

struct DatasetMeta {
  std::string dataset_id;
  Direction direction = Direction::higher_is_better;
};

// Items come out sorted by id; timesteps are the sorted union of observed
// dates and unobserved cells are masked. Rows with an empty value cell are
// treated as unobserved. Throws Error(invalid_input) on malformed rows (with
// the row number), duplicate (item, date) pairs, or empty input.
TimeSeriesDataset ingest_long_csv(std::istream& source, const LongSchema& schema,
                                  const DatasetMeta& meta);

// Converts wide rows into long observations and builds the dataset with the
// same rules as ingest_long_csv.
TimeSeriesDataset ingest_wide_csv(std::istream& source, const WideSchema& schema,
                                  const DatasetMeta& meta);

}  // namespace guardrail
