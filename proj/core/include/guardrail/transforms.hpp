#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "guardrail/dataset.hpp"

namespace guardrail {

// Collapses daily (or finer) data to one timestep per week. A week is the
// seven days ending on `anchor` and is labeled with that date; each item keeps
// its last unmasked observation in the week (closing value). Weeks with no
// observation stay masked.
TimeSeriesDataset resample_weekly(const TimeSeriesDataset& ds,
                                  std::chrono::weekday anchor = std::chrono::Friday);

// value'(t) = 100 * (value(t) - value(0)) / value(0). Refuses a dataset that
// already carries this transform.
TimeSeriesDataset percent_change_from_start(const TimeSeriesDataset& ds);

// value * 1e6 / population. Every item needs a population.
TimeSeriesDataset per_million(const TimeSeriesDataset& ds);

struct ClipResult {
  TimeSeriesDataset dataset;
  std::vector<std::string> dropped;  // items with no observation inside the window
};

// Keeps timesteps in [start, end] (inclusive).
ClipResult window_clip(const TimeSeriesDataset& ds, Date start, Date end);

// Applies one logged transform; used for replay.
TimeSeriesDataset apply_transform(const TimeSeriesDataset& ds, const TransformDescriptor& desc);

// Replays `log` on raw ingest output. Raw input must carry an empty log.
TimeSeriesDataset replay_transforms(const TimeSeriesDataset& raw,
                                    const std::vector<TransformDescriptor>& log);

}  // namespace guardrail
