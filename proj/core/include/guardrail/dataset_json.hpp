#pragma once

#include <string>

#include "guardrail/canonical.hpp"
#include "guardrail/dataset.hpp"

namespace guardrail {

// Canonical dataset interchange:
//   {dataset_id, direction, timesteps: [ISO date], transform_log: [{kind, params}],
//    items: [{id, name, values: [number|null], population?}]}
// Masked cells serialize as null.
Json to_json(const TimeSeriesDataset& ds);
Json to_json(const TransformDescriptor& d);

// Throws Error(invalid_input) on schema violations.
TimeSeriesDataset dataset_from_json(const Json& j);

TimeSeriesDataset load_dataset(const std::string& path);
void save_dataset(const TimeSeriesDataset& ds, const std::string& path);

// SHA-256 of the canonical dataset JSON.
std::string dataset_digest(const TimeSeriesDataset& ds);

}  // namespace guardrail
