#include "affinest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>

namespace affinest {

Sample::Sample(Matrix data) : data_(std::move(data)) {
  if (data_.cols() < 1 || data_.rows() <= data_.cols()) {
    throw DimensionMismatch("Sample: need n > p >= 1, got n=" +
                            std::to_string(data_.rows()) +
                            " p=" + std::to_string(data_.cols()));
  }
  if (!data_.all_finite()) {
    throw Error("Sample: non-finite entry in data");
  }
}

Vector Sample::row_vector(std::size_t i) const {
  auto r = data_.row(i);
  return Vector(std::vector<double>(r.begin(), r.end()));
}

double binomial_coefficient(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  if (k == 0) return 1.0;
  if (n <= 60) {
    // C(60,30) < 2^63, so the running product stays exact in 64 bits
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
      c = c * (n - k + i) / i;
    }
    return static_cast<double>(c);
  }
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0) -
                  std::lgamma(static_cast<double>(n - k) + 1.0));
}

namespace {

void check_k_n(std::size_t k_n, std::size_t n, const char* scheme) {
  if (k_n < 1 || k_n > n) {
    throw InvalidScheme(std::string(scheme) + ": k_n=" + std::to_string(k_n) +
                        " out of range 1.." + std::to_string(n));
  }
}

struct WeightBuilder {
  std::size_t n;

  Vector operator()(const TrimmedL1& s) const {
    check_k_n(s.k_n, n, "TrimmedL1");
    Vector w(n);
    const double wi = 1.0 / static_cast<double>(s.k_n);
    for (std::size_t i = 0; i < s.k_n; ++i) w[i] = wi;
    return w;
  }

  Vector operator()(const RankWeightedL2& s) const {
    check_k_n(s.k_n, n, "RankWeightedL2");
    if (s.k_n < 2) {
      throw InvalidScheme("RankWeightedL2: k_n must be >= 2 for nonzero weights");
    }
    Vector w(n);
    const double norm = binomial_coefficient(s.k_n, 2);
    for (std::size_t i = 1; i <= s.k_n; ++i) {
      w[i - 1] = static_cast<double>(s.k_n - i) / norm;
    }
    return w;
  }

  Vector operator()(const GeneralLk& s) const {
    check_k_n(s.k_n, n, "GeneralLk");
    if (s.k < 1 || s.k > s.k_n) {
      throw InvalidScheme("GeneralLk: k=" + std::to_string(s.k) +
                          " out of range 1..k_n=" + std::to_string(s.k_n));
    }
    Vector w(n);
    const double norm = binomial_coefficient(s.k_n, s.k);
    for (std::size_t i = 1; i <= s.k_n; ++i) {
      w[i - 1] = binomial_coefficient(s.k_n - i, s.k - 1) / norm;
    }
    return w;
  }

  Vector operator()(const PoissonWeights& s) const {
    if (!(s.lambda > 0.0) || !(s.lambda < 1.0)) {
      throw InvalidScheme("PoissonWeights: lambda=" + std::to_string(s.lambda) +
                          " outside (0,1)");
    }
    // w_i proportional to lambda^i / i!; the e^{-lambda} factor cancels in
    // the renormalization over ranks 1..n
    Vector w(n);
    double term = s.lambda;
    double sum = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      w[i - 1] = term;
      sum += term;
      term *= s.lambda / static_cast<double>(i + 1);
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= sum;
    return w;
  }

  Vector operator()(const CustomScores& s) const {
    if (s.scores.dim() != n) {
      throw InvalidScheme("CustomScores: expected " + std::to_string(n) +
                          " scores, got " + std::to_string(s.scores.dim()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = s.scores[i];
      if (!std::isfinite(a) || a < 0.0) {
        throw InvalidScheme("CustomScores: scores must be finite and nonnegative");
      }
      if (i + 1 < n && s.scores[i + 1] > a) {
        throw InvalidScheme("CustomScores: scores must be nonincreasing");
      }
      sum += a;
    }
    if (sum <= 0.0) throw InvalidScheme("CustomScores: all scores are zero");
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = s.scores[i] / sum;
    return w;
  }
};

}  // namespace

Vector weights_for(const WeightScheme& scheme, std::size_t n) {
  if (n == 0) throw InvalidScheme("weights_for: n must be >= 1");
  return std::visit(WeightBuilder{n}, scheme);
}

std::vector<int> ranks_of(const Vector& d) {
  const std::size_t n = d.dim();
  if (n == 0) throw EmptyInput("ranks_of: empty input");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&d](std::size_t a, std::size_t b) {
    if (d[a] != d[b]) return d[a] < d[b];
    return a < b;  // index tie-break keeps runs reproducible
  });
  std::vector<int> ranks(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    ranks[order[pos]] = static_cast<int>(pos + 1);
  }
  return ranks;
}

namespace {

struct StateWithLogDet {
  EstimatorState state;
  double log_det;
};

// Scatter, distances and ranks about a given center.
StateWithLogDet state_from_center(const Sample& s, Vector center, int step) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();

  Matrix scatter(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) {
      const double da = row[a] - center[a];
      for (std::size_t b = a; b < p; ++b) {
        scatter(a, b) += da * (row[b] - center[b]);
      }
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < a; ++b) scatter(a, b) = scatter(b, a);
  }

  SpdFactorization fact = [&] {
    try {
      return spd_factorize(scatter);
    } catch (const NotPositiveDefinite& e) {
      throw DegenerateScatter(
          "degenerate scatter at step " + std::to_string(step) + ": " + e.what(),
          step);
    }
  }();

  Vector distances(n);
  Vector dev(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) dev[a] = row[a] - center[a];
    distances[i] = quad_form(fact, dev);
  }

  EstimatorState st;
  st.step = step;
  st.center = std::move(center);
  st.scatter = std::move(scatter);
  st.ranks = ranks_of(distances);
  st.distances = std::move(distances);
  return {std::move(st), fact.log_det()};
}

StateWithLogDet mean_state_impl(const Sample& s) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();
  Vector center(p);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) center[a] += row[a];
  }
  center *= 1.0 / static_cast<double>(n);
  return state_from_center(s, std::move(center), 0);
}

StateWithLogDet l_step_impl(const Sample& s, const EstimatorState& prev,
                            const Vector& weights) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();
  Vector center(p);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[static_cast<std::size_t>(prev.ranks[i]) - 1];
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) center[a] += w * row[a];
  }
  return state_from_center(s, std::move(center), prev.step + 1);
}

}  // namespace

EstimatorState mean_state(const Sample& s) { return mean_state_impl(s).state; }

EstimatorState l_step(const Sample& s, const EstimatorState& prev,
                      const WeightScheme& scheme) {
  if (prev.ranks.size() != s.n() || prev.center.dim() != s.p()) {
    throw DimensionMismatch("l_step: state does not match sample");
  }
  return l_step_impl(s, prev, weights_for(scheme, s.n())).state;
}

IterationTrace iterate(const Sample& s, const WeightScheme& scheme,
                       std::size_t max_steps, double tol, Initializer init) {
  if (max_steps < 1) throw Error("iterate: max_steps must be >= 1");
  if (tol < 0.0) throw Error("iterate: tol must be >= 0");
  const Vector weights = weights_for(scheme, s.n());

  IterationTrace trace;
  std::vector<double> d_eff;
  double log_det0 = 0.0;

  auto fail = [&](const DegenerateScatter& e) -> IterationFailure {
    trace.d_efficiency = Vector(std::move(d_eff));
    return IterationFailure(e.what(), e.step(), std::move(trace));
  };

  try {
    StateWithLogDet initial = mean_state_impl(s);
    if (init == Initializer::NearestObservation) {
      const auto& ranks = initial.state.ranks;
      std::size_t nearest = 0;
      for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] == 1) {
          nearest = i;
          break;
        }
      }
      initial = state_from_center(s, s.row_vector(nearest), 0);
    }
    log_det0 = initial.log_det;
    trace.states.push_back(std::move(initial.state));
  } catch (const DegenerateScatter& e) {
    throw fail(e);
  }

  const double inv_p = 1.0 / static_cast<double>(s.p());
  for (std::size_t r = 1; r <= max_steps; ++r) {
    StateWithLogDet next = [&] {
      try {
        return l_step_impl(s, trace.states.back(), weights);
      } catch (const DegenerateScatter& e) {
        throw fail(e);
      }
    }();
    d_eff.push_back(std::exp((next.log_det - log_det0) * inv_p));
    const Vector delta = next.state.center - trace.states.back().center;
    trace.states.push_back(std::move(next.state));
    if (delta.inf_norm() <= tol) {
      trace.converged_at = r;
      break;
    }
  }
  trace.d_efficiency = Vector(std::move(d_eff));
  return trace;
}

double d_efficiency(const Matrix& a_r, const Matrix& a_0, std::size_t p) {
  if (a_r.rows() != p || a_0.rows() != p) {
    throw DimensionMismatch("d_efficiency: matrices must be p x p");
  }
  double ld_r = 0.0;
  double ld_0 = 0.0;
  try {
    ld_r = spd_factorize(a_r).log_det();
    ld_0 = spd_factorize(a_0).log_det();
  } catch (const NotPositiveDefinite& e) {
    throw DegenerateScatter(std::string("d_efficiency: ") + e.what());
  }
  return std::exp((ld_r - ld_0) / static_cast<double>(p));
}

Vector reduced_invariant(const Sample& s) {
  const std::size_t n = s.n();
  const std::size_t p = s.p();
  const Vector last = s.row_vector(n - 1);

  Matrix scatter(p, p);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) {
      const double da = row[a] - last[a];
      for (std::size_t b = a; b < p; ++b) {
        scatter(a, b) += da * (row[b] - last[b]);
      }
    }
  }
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < a; ++b) scatter(a, b) = scatter(b, a);
  }

  SpdFactorization fact = [&] {
    try {
      return spd_factorize(scatter);
    } catch (const NotPositiveDefinite& e) {
      throw DegenerateScatter(std::string("reduced_invariant: ") + e.what());
    }
  }();

  Vector out(n - 1);
  Vector dev(p);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto row = s.row(i);
    for (std::size_t a = 0; a < p; ++a) dev[a] = row[a] - last[a];
    out[i] = quad_form(fact, dev);
  }
  return out;
}

}  // namespace affinest
