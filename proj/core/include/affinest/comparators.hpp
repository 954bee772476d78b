#ifndef AFFINEST_COMPARATORS_HPP
#define AFFINEST_COMPARATORS_HPP

#include <cstddef>

#include "affinest/estimators.hpp"

// Baseline location estimators used for comparison runs.

namespace affinest {

/// Per-coordinate median; even n takes the midpoint of the two central order
/// statistics.
Vector coordinate_median(const Sample& s);

/// Sample mean vector.
Vector sample_mean(const Sample& s);

/// Spatial median: minimizer of the summed Euclidean distances, computed by
/// Weiszfeld-type reweighting.  When an iterate lands within tol of a data
/// point, that point's subgradient optimality is checked and the point is
/// returned if optimal.  Throws NoConvergence after max_iter sweeps.
Vector spatial_median(const Sample& s, double tol = 1e-9, std::size_t max_iter = 500);

/// Univariate k-order rank-weighted mean over the order statistics:
/// binomially weighted average trimming k observations from each end.
/// k = 0 gives the sample mean, k = floor((n+1)/2) the median.
double rank_weighted_mean_1d(const Vector& x, std::size_t k);

}  // namespace affinest

#endif  // AFFINEST_COMPARATORS_HPP
