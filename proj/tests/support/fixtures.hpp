#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "guardrail/dataset.hpp"

namespace guardrail::testing {

// Item ids "I00", "I01", ... so lexicographic and index order agree.
inline std::string item_name(std::size_t i) {
  return (i < 10 ? "I0" : "I") + std::to_string(i);
}

// Complete dataset with daily timesteps from 2024-01-01.
inline TimeSeriesDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                      std::vector<std::string> ids = {},
                                      Direction direction = Direction::higher_is_better,
                                      std::string dataset_id = "test") {
  const std::size_t steps = rows.empty() ? 0 : rows.front().size();
  std::vector<Date> dates;
  for (std::size_t t = 0; t < steps; ++t) dates.push_back(Date(2024, 1, 1).plus_days(static_cast<long>(t)));
  std::vector<ItemSeries> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto id = ids.empty() ? item_name(i) : ids[i];
    items.push_back({id, "Item " + id, rows[i], std::vector<std::uint8_t>(steps, 0), std::nullopt});
  }
  return TimeSeriesDataset(std::move(dataset_id), direction, std::move(dates), std::move(items), {});
}

inline std::vector<std::vector<double>> random_rows(std::mt19937_64& gen, std::size_t items,
                                                    std::size_t steps, double lo = -100.0,
                                                    double hi = 100.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> rows(items, std::vector<double>(steps));
  for (auto& r : rows) {
    for (auto& v : r) v = u(gen);
  }
  return rows;
}

// Random walks, closer to real series than white noise.
inline std::vector<std::vector<double>> random_walks(std::mt19937_64& gen, std::size_t items,
                                                     std::size_t steps) {
  std::normal_distribution<double> step(0.3, 2.0);
  std::uniform_real_distribution<double> start(-20.0, 20.0);
  std::vector<std::vector<double>> rows(items, std::vector<double>(steps));
  for (auto& r : rows) {
    double v = start(gen);
    for (auto& x : r) x = (v += step(gen));
  }
  return rows;
}

inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(gen);
}

}  // namespace guardrail::testing
