#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace guardrail {

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
};

struct KMeansResult {
  std::vector<std::size_t> assignments;       // cluster index per row
  std::vector<std::vector<double>> centroids;  // k x dim
  double inertia = 0.0;                        // sum of squared distances to assigned centroid
};

// Lloyd's algorithm over full-length row vectors with squared Euclidean
// distance and k-means++ seeding. Keeps the restart with the lowest inertia
// (earliest wins ties). Stops when assignments repeat or after
// max_iterations. A cluster that empties is re-seeded with the point farthest
// from its own centroid, taken from a cluster with more than one member.
// Deterministic for fixed (rows, k, seed, options).
KMeansResult kmeans_timeseries(const std::vector<std::vector<double>>& rows, std::size_t k,
                               std::uint64_t seed, const KMeansOptions& options = {});

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace guardrail
