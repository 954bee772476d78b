#ifndef AFFINEST_ORACLE_LSTEP_HPP
#define AFFINEST_ORACLE_LSTEP_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "affinest/estimators.hpp"

// Brute-force re-derivation of one estimation step for p <= 2, kept
// deliberately naive: explicit matrix inverses and ranks from sorted
// (distance, index) pairs.  Used as an oracle against the library path.

namespace oracle {

using affinest::Sample;
using affinest::Vector;

struct BruteState {
  Vector center;
  Vector distances;
  std::vector<int> ranks;
};

inline BruteState brute_state(const Sample& s, const Vector& center) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();

  double a00 = 0.0, a01 = 0.0, a11 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d0 = s.data()(i, 0) - center[0];
    a00 += d0 * d0;
    if (p == 2) {
      const double d1 = s.data()(i, 1) - center[1];
      a01 += d0 * d1;
      a11 += d1 * d1;
    }
  }

  BruteState out;
  out.center = center;
  out.distances = Vector(n);
  if (p == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = s.data()(i, 0) - center[0];
      out.distances[i] = d0 * d0 / a00;
    }
  } else {
    const double det = a00 * a11 - a01 * a01;
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = s.data()(i, 0) - center[0];
      const double d1 = s.data()(i, 1) - center[1];
      out.distances[i] = (a11 * d0 * d0 - 2.0 * a01 * d0 * d1 + a00 * d1 * d1) / det;
    }
  }

  std::vector<std::pair<double, std::size_t>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(out.distances[i], i);
  std::sort(pairs.begin(), pairs.end());
  out.ranks.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) {
    out.ranks[pairs[pos].second] = static_cast<int>(pos + 1);
  }
  return out;
}

inline Vector brute_mean(const Sample& s) {
  Vector c(s.p());
  for (std::size_t i = 0; i < s.n(); ++i) {
    for (std::size_t a = 0; a < s.p(); ++a) c[a] += s.data()(i, a);
  }
  c *= 1.0 / static_cast<double>(s.n());
  return c;
}

/// Next center from rank weights, accumulated in observation order.
inline Vector brute_l_center(const Sample& s, const std::vector<int>& ranks,
                             const Vector& weights) {
  Vector c(s.p());
  for (std::size_t i = 0; i < s.n(); ++i) {
    const double w = weights[static_cast<std::size_t>(ranks[i]) - 1];
    for (std::size_t a = 0; a < s.p(); ++a) c[a] += w * s.data()(i, a);
  }
  return c;
}

/// Trimmed weights 1/k on ranks 1..k, written independently of the library.
inline Vector brute_trimmed_weights(std::size_t n, std::size_t k) {
  Vector w(n);
  for (std::size_t i = 0; i < k; ++i) w[i] = 1.0 / static_cast<double>(k);
  return w;
}

}  // namespace oracle

#endif  // AFFINEST_ORACLE_LSTEP_HPP
