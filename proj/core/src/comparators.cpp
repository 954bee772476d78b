#include "affinest/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace affinest {

Vector coordinate_median(const Sample& s) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();
  Vector med(p);
  std::vector<double> column(n);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = s.data()(i, c);
    std::sort(column.begin(), column.end());
    med[c] = (n % 2 == 1) ? column[n / 2]
                          : 0.5 * (column[n / 2 - 1] + column[n / 2]);
  }
  return med;
}

Vector sample_mean(const Sample& s) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();
  Vector mean(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) mean[a] += row[a];
  }
  mean *= 1.0 / static_cast<double>(n);
  return mean;
}

Vector spatial_median(const Sample& s, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error("spatial_median: tol must be > 0");
  const std::size_t n = s.n();
  const std::size_t p = s.p();

  Vector x = sample_mean(s);
  std::vector<double> dist(n);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t nearest = 0;
    double min_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      const auto row = s.row(i);
      for (std::size_t a = 0; a < p; ++a) {
        const double d = x[a] - row[a];
        sq += d * d;
      }
      dist[i] = std::sqrt(sq);
      if (dist[i] < min_dist) {
        min_dist = dist[i];
        nearest = i;
      }
    }

    // Weiszfeld step over the points the iterate is not sitting on
    Vector weighted_sum(p);
    double weight_total = 0.0;
    Vector residual(p);  // sum of unit directions toward the far points
    std::size_t near_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] <= tol) {
        ++near_count;
        continue;
      }
      const double w = 1.0 / dist[i];
      const auto row = s.row(i);
      for (std::size_t a = 0; a < p; ++a) {
        weighted_sum[a] += w * row[a];
        residual[a] += w * (row[a] - x[a]);
      }
      weight_total += w;
    }

    if (near_count > 0) {
      // at (or touching) a data point: subgradient optimality test
      if (residual.two_norm() <= static_cast<double>(near_count)) {
        return s.row_vector(nearest);
      }
      // push off the data point along the pull direction (Vardi-Zhang)
      const double r = residual.two_norm();
      const double eta = static_cast<double>(near_count);
      Vector next(p);
      for (std::size_t a = 0; a < p; ++a) {
        next[a] = (1.0 - eta / r) * (weighted_sum[a] / weight_total) +
                  (eta / r) * x[a];
      }
      const double step = (next - x).inf_norm();
      x = std::move(next);
      if (step <= tol) return x;
      continue;
    }

    Vector next(p);
    for (std::size_t a = 0; a < p; ++a) next[a] = weighted_sum[a] / weight_total;
    const double step = (next - x).inf_norm();
    x = std::move(next);
    if (step <= tol) return x;
  }
  throw NoConvergence("spatial_median: no convergence after " +
                      std::to_string(max_iter) + " iterations");
}

double rank_weighted_mean_1d(const Vector& x, std::size_t k) {
  const std::size_t n = x.dim();
  if (n == 0) throw EmptyInput("rank_weighted_mean_1d: empty input");
  const std::size_t k_max = (n + 1) / 2;
  if (k > k_max) {
    throw InvalidK("rank_weighted_mean_1d: k=" + std::to_string(k) +
                   " exceeds floor((n+1)/2)=" + std::to_string(k_max));
  }
  if (k == 0) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(n);
  }

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  if (2 * k + 1 > n) {
    // boundary k: the binomial mass degenerates; this endpoint is the median
    return (n % 2 == 1) ? sorted[n / 2]
                        : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }

  const double norm = binomial_coefficient(n, 2 * k + 1);
  double acc = 0.0;
  for (std::size_t i = k + 1; i <= n - k; ++i) {
    acc += binomial_coefficient(i - 1, k) * binomial_coefficient(n - i, k) *
           sorted[i - 1];
  }
  return acc / norm;
}

}  // namespace affinest
