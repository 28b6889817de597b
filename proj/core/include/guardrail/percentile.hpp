#pragma once

#include <span>
#include <vector>

#include "guardrail/dataset.hpp"

namespace guardrail {

// Inclusive linear interpolation between closest order statistics:
// h = (N-1) * p/100, result = x[floor h] + frac(h) * (x[floor h + 1] - x[floor h]).
// `sorted` must be ascending and non-empty; p in [0, 100].
double percentile_of_sorted(std::span<const double> sorted, double p);

// One line per requested percentile, evaluated across all items at every
// timestep. Dataset must have no masked cells.
std::vector<std::vector<double>> percentile_lines(const TimeSeriesDataset& ds,
                                                  std::span<const double> percentiles);

}  // namespace guardrail
