#include "guardrail/kmeans.hpp"

#include <cmath>
#include <limits>

#include "guardrail/error.hpp"
#include "guardrail/random.hpp"

namespace guardrail {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix seed_plus_plus(const Matrix& rows, std::size_t k, Rng& rng) {
  const auto n = rows.size();
  Matrix centers;
  centers.reserve(k);
  std::vector<char> chosen(n, 0);
  auto first = static_cast<std::size_t>(rng.below(n));
  centers.push_back(rows[first]);
  chosen[first] = 1;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(rows[i], centers[0]);

  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform01() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    } else {
      // Every remaining point coincides with a center: pick uniformly among
      // the unchosen ones.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[rng.below(free.size())];
    }
    chosen[pick] = 1;
    centers.push_back(rows[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(rows[i], centers.back()));
    }
  }
  return centers;
}

std::size_t nearest(const std::vector<double>& row, const Matrix& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared_distance(row, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult lloyd(const Matrix& rows, Matrix centers, std::size_t max_iterations) {
  const auto n = rows.size();
  const auto k = centers.size();
  const auto dim = rows.front().size();
  std::vector<std::size_t> assign(n), previous;

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = nearest(rows[i], centers);
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] < 2) continue;
        const double d = squared_distance(rows[i], centers[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      centers[c] = rows[far];
    }
    for (std::size_t c = 0; c < k; ++c) centers[c].assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& ctr = centers[assign[i]];
      for (std::size_t j = 0; j < dim; ++j) ctr[j] += rows[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (auto& v : centers[c]) v /= static_cast<double>(counts[c]);
    }
    if (assign == previous) break;
    previous = assign;
  }

  KMeansResult result{std::move(assign), std::move(centers), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += squared_distance(rows[i], result.centroids[result.assignments[i]]);
  }
  return result;
}

}  // namespace

KMeansResult kmeans_timeseries(const Matrix& rows, std::size_t k, std::uint64_t seed,
                               const KMeansOptions& options) {
  if (k == 0) fail(ErrorKind::invalid_argument, "k-means needs k >= 1");
  if (k > rows.size()) {
    fail(ErrorKind::invalid_argument, "k-means with k=" + std::to_string(k) + " exceeds " +
                                          std::to_string(rows.size()) + " rows");
  }
  const auto dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) fail(ErrorKind::invalid_argument, "k-means rows differ in length");
    for (double v : r) {
      if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "k-means input is not finite");
    }
  }

  Rng rng(seed);
  const auto restarts = std::max<std::size_t>(options.restarts, 1);
  KMeansResult best;
  bool have_best = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto result = lloyd(rows, seed_plus_plus(rows, k, rng), options.max_iterations);
    if (!have_best || result.inertia < best.inertia) {
      best = std::move(result);
      have_best = true;
    }
  }
  return best;
}

}  // namespace guardrail
