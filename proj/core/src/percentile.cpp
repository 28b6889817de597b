#include "guardrail/percentile.hpp"

#include <algorithm>
#include <cmath>

#include "guardrail/error.hpp"

namespace guardrail {

double percentile_of_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(ErrorKind::invalid_argument, "percentile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::vector<double>> percentile_lines(const TimeSeriesDataset& ds,
                                                  std::span<const double> percentiles) {
  ds.require_complete("percentile lines");
  const auto steps = ds.timestep_count();
  std::vector<std::vector<double>> lines(percentiles.size(), std::vector<double>(steps));
  std::vector<double> column(ds.item_count());
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t i = 0; i < ds.item_count(); ++i) column[i] = ds.items()[i].values[t];
    std::sort(column.begin(), column.end());
    for (std::size_t p = 0; p < percentiles.size(); ++p) {
      lines[p][t] = percentile_of_sorted(column, percentiles[p]);
    }
  }
  return lines;
}

}  // namespace guardrail
