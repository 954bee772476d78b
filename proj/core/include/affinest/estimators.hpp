#ifndef AFFINEST_ESTIMATORS_HPP
#define AFFINEST_ESTIMATORS_HPP

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "affinest/linalg.hpp"

// Iterated rank-weighted L-estimation of multivariate location.
//
// Observations are ordered by their Mahalanobis distances taken against the
// current center/scatter estimate; rank-based weights produce the next
// center; the scheme is iterated.  Every step is affine equivariant because
// the distances (and hence the ranks) are affine invariant.

namespace affinest {

/// An n x p data matrix, row i = observation i.  Requires n > p >= 1 and
/// finite entries.
class Sample {
 public:
  explicit Sample(Matrix data);

  std::size_t n() const noexcept { return data_.rows(); }
  std::size_t p() const noexcept { return data_.cols(); }
  const Matrix& data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const { return data_.row(i); }
  Vector row_vector(std::size_t i) const;

 private:
  Matrix data_;
};

/// One step of the iteration: center estimate, the unnormalized scatter
/// A = sum_i (X_i - center)(X_i - center)^T about it, Mahalanobis distances
/// d_i = (X_i - center)^T A^{-1} (X_i - center), and their ranks.
///
/// The d_i always lie in [0, 1] and sum to p, for any center.
struct EstimatorState {
  int step = 0;
  Vector center;            // p
  Matrix scatter;           // p x p, raw sum of outer products
  Vector distances;         // n
  std::vector<int> ranks;   // n, 1-based; permutation of 1..n
};

// ---------------------------------------------------------------------------
// Weight schemes: a rule mapping ranks 1..n to nonnegative, nonincreasing
// weights summing to 1.

/// Equal weight 1/k_n on the k_n observations of smallest rank.
struct TrimmedL1 {
  std::size_t k_n;
};

/// Linearly decreasing weights (k_n - i) / C(k_n, 2) on ranks i <= k_n.
struct RankWeightedL2 {
  std::size_t k_n;
};

/// Order-k scheme: w_i = C(k_n - i, k - 1) / C(k_n, k) on ranks i <= k_n.
/// k = 1 reduces to TrimmedL1, k = 2 to RankWeightedL2.
struct GeneralLk {
  std::size_t k_n;
  std::size_t k;
};

/// Smooth untrimmed weights proportional to lambda^i / i!, renormalized so
/// the weights over ranks 1..n sum to exactly 1.  Requires 0 < lambda < 1.
struct PoissonWeights {
  double lambda;
};

/// User-supplied nonincreasing nonnegative scores a_1 >= ... >= a_n >= 0,
/// renormalized to unit sum.
struct CustomScores {
  Vector scores;
};

using WeightScheme =
    std::variant<TrimmedL1, RankWeightedL2, GeneralLk, PoissonWeights, CustomScores>;

/// Realize a scheme as a length-n weight vector over ranks 1..n.
/// Throws InvalidScheme on out-of-range parameters.
Vector weights_for(const WeightScheme& scheme, std::size_t n);

/// C(n, k) as a double: exact 64-bit integer arithmetic for n <= 60,
/// log-gamma beyond.  Returns 0 for k > n.
double binomial_coefficient(std::size_t n, std::size_t k);

// ---------------------------------------------------------------------------

/// Ranks R_i = #{j : d_j <= d_i}, ties broken by original index (the earlier
/// index gets the smaller rank).  Always a permutation of 1..n.
std::vector<int> ranks_of(const Vector& d);

/// Step-0 state: center = sample mean, scatter/distances/ranks about it.
EstimatorState mean_state(const Sample& s);

/// Starting point for the iteration.  NearestObservation takes the
/// observation ranked 1 in the mean state as the initial center, which tends
/// to need fewer steps to settle.
enum class Initializer { SampleMean, NearestObservation };

/// One L-estimation step: new center = sum_i w(R_i^{prev}) X_i, then a fresh
/// scatter, distances and ranks about the new center.
EstimatorState l_step(const Sample& s, const EstimatorState& prev,
                      const WeightScheme& scheme);

/// The r-step iteration record.  states[r] is the estimator after r steps
/// (states[0] the initial state); d_efficiency[r-1] = (|A^(r)|/|A^(0)|)^{1/p}.
struct IterationTrace {
  std::vector<EstimatorState> states;
  Vector d_efficiency;
  std::optional<std::size_t> converged_at;
};

/// Raised when a scatter degenerates mid-iteration; carries whatever part of
/// the trace was completed.
class IterationFailure : public DegenerateScatter {
 public:
  IterationFailure(const std::string& what, int step, IterationTrace partial)
      : DegenerateScatter(what, step), partial_(std::move(partial)) {}
  const IterationTrace& partial() const noexcept { return partial_; }

 private:
  IterationTrace partial_;
};

/// Run the full iteration: initial state, then l_step up to max_steps times.
///
/// Stops early (recording converged_at) once the center moves by at most tol
/// in the max norm; with the default tol = 0 that happens only at an exact
/// fixed point of the rank map.
IterationTrace iterate(const Sample& s, const WeightScheme& scheme,
                       std::size_t max_steps, double tol = 0.0,
                       Initializer init = Initializer::SampleMean);

/// (|a_r| / |a_0|)^{1/p}, evaluated through log-determinants.
double d_efficiency(const Matrix& a_r, const Matrix& a_0, std::size_t p);

/// The n-1 maximal-invariant distances taken against the last observation:
/// d~_i = (X_i - X_n)^T V~^{-1} (X_i - X_n) with V~ the raw scatter of the
/// differences.  Sums to p; unchanged under affine maps of the sample.
Vector reduced_invariant(const Sample& s);

}  // namespace affinest

#endif  // AFFINEST_ESTIMATORS_HPP
