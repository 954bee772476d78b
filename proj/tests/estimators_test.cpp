#include <cmath>
#include <cstddef>
#include <vector>

#include "doctest.h"

#include "affinest/estimators.hpp"
#include "oracle_lstep.hpp"
#include "test_support.hpp"

using affinest::CustomScores;
using affinest::EstimatorState;
using affinest::GeneralLk;
using affinest::InvalidScheme;
using affinest::IterationFailure;
using affinest::IterationTrace;
using affinest::Matrix;
using affinest::PoissonWeights;
using affinest::RankWeightedL2;
using affinest::Rng;
using affinest::Sample;
using affinest::TrimmedL1;
using affinest::Vector;
using affinest::WeightScheme;
using affinest::weights_for;

namespace {

Sample sample_1d(std::initializer_list<double> values) {
  Matrix m(values.size(), 1);
  std::size_t i = 0;
  for (double v : values) m(i++, 0) = v;
  return Sample(std::move(m));
}

Sample sample_2d(std::initializer_list<std::pair<double, double>> rows) {
  Matrix m(rows.size(), 2);
  std::size_t i = 0;
  for (const auto& [x, y] : rows) {
    m(i, 0) = x;
    m(i, 1) = y;
    ++i;
  }
  return Sample(std::move(m));
}

}  // namespace

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(Sample(Matrix(3, 3, 1.0)), affinest::DimensionMismatch);
  CHECK_THROWS_AS(Sample(Matrix(2, 0)), affinest::DimensionMismatch);
  Matrix with_nan(3, 1);
  with_nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(Sample(std::move(with_nan)), affinest::Error);
  const Sample ok = sample_1d({1.0, 2.0, 3.0});
  CHECK(ok.n() == 3);
  CHECK(ok.p() == 1);
  CHECK(ok.row_vector(2)[0] == 3.0);
}

TEST_CASE("binomial coefficients") {
  CHECK(affinest::binomial_coefficient(0, 0) == 1.0);
  CHECK(affinest::binomial_coefficient(5, 2) == 10.0);
  CHECK(affinest::binomial_coefficient(10, 10) == 1.0);
  CHECK(affinest::binomial_coefficient(4, 7) == 0.0);
  CHECK(affinest::binomial_coefficient(60, 30) == 118264581564861424.0);
  // beyond the exact range the log-gamma path takes over
  CHECK(affinest::binomial_coefficient(61, 30) ==
        doctest::Approx(232714176627630544.0).epsilon(1e-12));
  // Pascal rule across the exact/approximate boundary
  CHECK(affinest::binomial_coefficient(61, 30) ==
        doctest::Approx(affinest::binomial_coefficient(60, 29) +
                        affinest::binomial_coefficient(60, 30))
            .epsilon(1e-12));
}

TEST_CASE("ranks from distances") {
  CHECK(affinest::ranks_of(Vector{0.3, 0.1, 0.2}) == std::vector<int>{3, 1, 2});
  CHECK(affinest::ranks_of(Vector{0.5, 0.5}) == std::vector<int>{1, 2});
  CHECK(affinest::ranks_of(Vector{1.0, 0.5, 0.5, 0.2}) ==
        std::vector<int>{4, 2, 3, 1});
  CHECK_THROWS_AS(affinest::ranks_of(Vector{}), affinest::EmptyInput);
}

TEST_CASE("trimmed L1 weights") {
  const Vector w = weights_for(TrimmedL1{3}, 5);
  CHECK(w.dim() == 5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(1.0 / 3.0));
  CHECK(w[3] == 0.0);
  CHECK(w[4] == 0.0);
  // k_n = n: all observations weighted equally
  const Vector full = weights_for(TrimmedL1{5}, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(full[i] == doctest::Approx(0.2));
}

TEST_CASE("rank-weighted L2 weights") {
  const Vector w = weights_for(RankWeightedL2{3}, 5);
  CHECK(w[0] == doctest::Approx(2.0 / 3.0));
  CHECK(w[1] == doctest::Approx(1.0 / 3.0));
  CHECK(w[2] == 0.0);
  CHECK(w[3] == 0.0);
  // the largest-ranked of the k_n inner observations always gets weight zero
  const Vector w2 = weights_for(RankWeightedL2{5}, 5);
  CHECK(w2[4] == 0.0);
  CHECK(w2[0] == doctest::Approx(0.4));
}

TEST_CASE("general Lk weights") {
  const Vector w = weights_for(GeneralLk{4, 1}, 6);
  for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(0.25));
  CHECK(w[4] == 0.0);

  // k = k_n concentrates all mass on rank 1
  const Vector spike = weights_for(GeneralLk{4, 4}, 6);
  CHECK(spike[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < 6; ++i) CHECK(spike[i] == 0.0);
}

TEST_CASE("general Lk reduces to L1 and L2") {
  for (std::size_t n : {5u, 9u, 16u}) {
    for (std::size_t kn = 2; kn <= n; ++kn) {
      const Vector l1 = weights_for(TrimmedL1{kn}, n);
      const Vector lk1 = weights_for(GeneralLk{kn, 1}, n);
      const Vector l2 = weights_for(RankWeightedL2{kn}, n);
      const Vector lk2 = weights_for(GeneralLk{kn, 2}, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(lk1[i] == doctest::Approx(l1[i]).epsilon(1e-14));
        CHECK(lk2[i] == doctest::Approx(l2[i]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("poisson weights") {
  const Vector w = weights_for(PoissonWeights{0.5}, 6);
  // w_i proportional to lambda^i / i!: ratio w1/w2 = 2/lambda
  CHECK(w[0] / w[1] == doctest::Approx(4.0));
  CHECK(w[1] / w[2] == doctest::Approx(6.0));
  double sum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(w[i] > 0.0);
    sum += w[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("custom scores") {
  const Vector w = weights_for(CustomScores{Vector{4.0, 2.0, 2.0, 0.0}}, 4);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.25));
  CHECK(w[2] == doctest::Approx(0.25));
  CHECK(w[3] == 0.0);
}

TEST_CASE("invalid scheme parameters are rejected") {
  CHECK_THROWS_AS(weights_for(TrimmedL1{0}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(TrimmedL1{6}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(RankWeightedL2{1}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(GeneralLk{4, 0}, 6), InvalidScheme);
  CHECK_THROWS_AS(weights_for(GeneralLk{4, 5}, 6), InvalidScheme);
  CHECK_THROWS_AS(weights_for(PoissonWeights{0.0}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(PoissonWeights{1.0}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(PoissonWeights{-0.5}, 5), InvalidScheme);
  CHECK_THROWS_AS(weights_for(CustomScores{Vector{1.0, 2.0}}, 2), InvalidScheme);
  CHECK_THROWS_AS(weights_for(CustomScores{Vector{1.0, -1.0}}, 2), InvalidScheme);
  CHECK_THROWS_AS(weights_for(CustomScores{Vector{0.0, 0.0}}, 2), InvalidScheme);
  CHECK_THROWS_AS(weights_for(CustomScores{Vector{1.0, 0.5, 0.2}}, 2), InvalidScheme);
}

TEST_CASE("every scheme yields nonincreasing unit-sum weights") {
  const std::vector<WeightScheme> schemes{
      TrimmedL1{7},           RankWeightedL2{7},         GeneralLk{7, 3},
      GeneralLk{7, 7},        PoissonWeights{0.25},      PoissonWeights{0.9},
      CustomScores{Vector{5.0, 4.0, 3.0, 2.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}};
  for (const auto& scheme : schemes) {
    const Vector w = weights_for(scheme, 10);
    double sum = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(w[i] >= 0.0);
      if (i > 0) CHECK(w[i] <= w[i - 1] + 1e-15);
      sum += w[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mean state on a 1-d sample") {
  const Sample s = sample_1d({0.0, 0.0, 2.0, 2.0});
  const EstimatorState st = affinest::mean_state(s);
  CHECK(st.step == 0);
  CHECK(st.center[0] == doctest::Approx(1.0));
  CHECK(st.scatter(0, 0) == doctest::Approx(4.0));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(st.distances[i] == doctest::Approx(0.25));
  }
  CHECK(st.ranks == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("mean state on a 2-d simplex") {
  const Sample s = sample_2d({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  const EstimatorState st = affinest::mean_state(s);
  CHECK(st.center[0] == doctest::Approx(1.0 / 3.0));
  CHECK(st.center[1] == doctest::Approx(1.0 / 3.0));
  CHECK(st.scatter(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(st.scatter(0, 1) == doctest::Approx(-1.0 / 3.0));
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(st.distances[i] == doctest::Approx(2.0 / 3.0));
    sum += st.distances[i];
  }
  CHECK(sum == doctest::Approx(2.0));
}

TEST_CASE("one trimmed step averages the inner observations") {
  const Sample s = sample_1d({0.0, 1.0, 10.0});
  const EstimatorState st0 = affinest::mean_state(s);
  // mean 11/3: observation 1 is closest, then 0, then 10
  CHECK(st0.ranks == std::vector<int>{2, 1, 3});
  const EstimatorState st1 = affinest::l_step(s, st0, TrimmedL1{2});
  CHECK(st1.step == 1);
  CHECK(st1.center[0] == doctest::Approx(0.5));
}

TEST_CASE("iterate reaches a fixed point when k_n = n") {
  Rng rng(99);
  const Sample s = testsup::random_sample(rng, 12, 2);
  const IterationTrace trace = affinest::iterate(s, TrimmedL1{12}, 8);
  // step 1 re-averages everything; step 2 repeats it bit for bit
  REQUIRE(trace.converged_at.has_value());
  CHECK(*trace.converged_at == 2);
  CHECK(trace.states.size() == 3);
  CHECK(trace.d_efficiency.dim() == 2);
}

TEST_CASE("iterate records the trace and D-efficiencies") {
  Rng rng(1234);
  const Sample s = testsup::random_sample(rng, 40, 3);
  const IterationTrace trace = affinest::iterate(s, RankWeightedL2{10}, 5);
  CHECK(trace.states.size() <= 6);
  CHECK(trace.d_efficiency.dim() == trace.states.size() - 1);
  for (std::size_t r = 0; r < trace.states.size(); ++r) {
    CHECK(trace.states[r].step == static_cast<int>(r));
    CHECK(trace.states[r].center.all_finite());
  }
  for (double d : trace.d_efficiency) {
    CHECK(d > 0.0);
    CHECK(d < 2.0);
  }
  // the D-efficiency recomputed from the stored scatters matches
  const double d1 = affinest::d_efficiency(trace.states[1].scatter,
                                           trace.states[0].scatter, 3);
  CHECK(d1 == doctest::Approx(trace.d_efficiency[0]).epsilon(1e-10));
}

TEST_CASE("tolerance-based early stop") {
  Rng rng(777);
  const Sample s = testsup::random_sample(rng, 60, 2);
  const IterationTrace loose = affinest::iterate(s, TrimmedL1{20}, 50, 1e-3);
  REQUIRE(loose.converged_at.has_value());
  const std::size_t stop = *loose.converged_at;
  CHECK(stop < 50);
  const Vector delta =
      loose.states[stop].center - loose.states[stop - 1].center;
  CHECK(delta.inf_norm() <= 1e-3);
}

TEST_CASE("nearest-observation initializer starts on a data point") {
  Rng rng(2024);
  const Sample s = testsup::random_sample(rng, 25, 2);
  const IterationTrace trace = affinest::iterate(
      s, TrimmedL1{10}, 4, 0.0, affinest::Initializer::NearestObservation);
  const Vector& start = trace.states[0].center;
  bool on_data = false;
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (s.data()(i, 0) == start[0] && s.data()(i, 1) == start[1]) on_data = true;
  }
  CHECK(on_data);
  // distance invariants hold even with the center on an observation
  for (const auto& st : trace.states) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.n(); ++i) {
      CHECK(st.distances[i] >= 0.0);
      CHECK(st.distances[i] <= 1.0 + 1e-12);
      sum += st.distances[i];
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("degenerate data fails at step zero with a partial trace") {
  const Sample s = sample_2d({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}});
  try {
    affinest::iterate(s, TrimmedL1{2}, 5);
    FAIL("expected IterationFailure");
  } catch (const IterationFailure& e) {
    CHECK(e.step() == 0);
    CHECK(e.partial().states.empty());
  }
}

TEST_CASE("iterate argument validation") {
  Rng rng(5);
  const Sample s = testsup::random_sample(rng, 10, 2);
  CHECK_THROWS_AS(affinest::iterate(s, TrimmedL1{4}, 0), affinest::Error);
  CHECK_THROWS_AS(affinest::iterate(s, TrimmedL1{4}, 3, -1.0), affinest::Error);
  CHECK_THROWS_AS(affinest::iterate(s, TrimmedL1{40}, 3), InvalidScheme);
}

TEST_CASE("distance invariants across schemes and dimensions") {
  Rng rng(98765);
  const std::vector<WeightScheme> schemes{TrimmedL1{8}, RankWeightedL2{8},
                                          GeneralLk{8, 3}, PoissonWeights{0.5}};
  for (std::size_t p : {1u, 2u, 3u, 5u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Sample s = testsup::random_sample(rng, 20, p);
      for (const auto& scheme : schemes) {
        const IterationTrace trace = affinest::iterate(s, scheme, 3);
        for (const auto& st : trace.states) {
          double sum = 0.0;
          int max_rank = 0;
          for (std::size_t i = 0; i < s.n(); ++i) {
            CHECK(st.distances[i] >= -1e-15);
            CHECK(st.distances[i] <= 1.0 + 1e-12);
            sum += st.distances[i];
            max_rank = std::max(max_rank, st.ranks[i]);
          }
          CHECK(sum == doctest::Approx(static_cast<double>(p)).epsilon(1e-9));
          CHECK(max_rank == 20);
        }
      }
    }
  }
}

TEST_CASE("ranks are invariant under monotone distance maps") {
  Rng rng(31337);
  for (int rep = 0; rep < 20; ++rep) {
    Vector d(15);
    for (std::size_t i = 0; i < 15; ++i) d[i] = rng.uniform();
    const auto base = affinest::ranks_of(d);
    Vector expd(15), lind(15);
    for (std::size_t i = 0; i < 15; ++i) {
      expd[i] = std::exp(d[i]);
      lind[i] = 2.0 * d[i] + 1.0;
    }
    CHECK(affinest::ranks_of(expd) == base);
    CHECK(affinest::ranks_of(lind) == base);
  }
}

TEST_CASE("iteration is affine equivariant") {
  Rng rng(424242);
  for (int rep = 0; rep < 20; ++rep) {
    const Sample s = testsup::random_sample(rng, 30, 2);
    const Matrix b_mat = testsup::random_spd_conditioned(rng, 2);
    Vector b{rng.normal(), rng.normal()};
    const Sample mapped = testsup::affine_image(s, b_mat, b);

    for (const WeightScheme& scheme :
         {WeightScheme(TrimmedL1{10}), WeightScheme(RankWeightedL2{10})}) {
      const IterationTrace t0 = affinest::iterate(s, scheme, 4);
      const IterationTrace t1 = affinest::iterate(mapped, scheme, 4);
      REQUIRE(t0.states.size() == t1.states.size());
      for (std::size_t r = 0; r < t0.states.size(); ++r) {
        const Vector want =
            testsup::apply_affine(b_mat, b, t0.states[r].center);
        CHECK(testsup::max_rel_err(t1.states[r].center, want) < 1e-8);
        CHECK(t0.states[r].ranks == t1.states[r].ranks);
        for (std::size_t i = 0; i < s.n(); ++i) {
          CHECK(t1.states[r].distances[i] ==
                doctest::Approx(t0.states[r].distances[i]).epsilon(1e-8));
        }
      }
      for (std::size_t r = 0; r + 1 < t0.states.size(); ++r) {
        CHECK(t1.d_efficiency[r] ==
              doctest::Approx(t0.d_efficiency[r]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("l_step matches the brute-force oracle") {
  Rng rng(600613);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t p = 1 + rng.next_u64() % 2;
    const std::size_t n = p + 2 + rng.next_u64() % (7 - p);
    const Sample s = testsup::random_sample(rng, n, p);
    const std::size_t kn = 1 + rng.next_u64() % n;

    const EstimatorState st0 = affinest::mean_state(s);
    const oracle::BruteState b0 = oracle::brute_state(s, oracle::brute_mean(s));
    CHECK(st0.ranks == b0.ranks);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(st0.distances[i] == doctest::Approx(b0.distances[i]).epsilon(1e-9));
    }

    const EstimatorState st1 = affinest::l_step(s, st0, TrimmedL1{kn});
    const Vector want = oracle::brute_l_center(
        s, b0.ranks, oracle::brute_trimmed_weights(n, kn));
    for (std::size_t a = 0; a < p; ++a) CHECK(st1.center[a] == want[a]);
  }
}

TEST_CASE("d_efficiency closed forms") {
  CHECK(affinest::d_efficiency(Matrix::identity(3), Matrix::identity(3), 3) ==
        doctest::Approx(1.0));
  Matrix diag(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = 9.0;
  CHECK(affinest::d_efficiency(diag, Matrix::identity(2), 2) ==
        doctest::Approx(6.0));
  CHECK(affinest::d_efficiency(Matrix::identity(2), diag, 2) ==
        doctest::Approx(1.0 / 6.0));
}

TEST_CASE("reduced invariant on a 1-d sample") {
  const Sample s = sample_1d({0.0, 1.0, 2.0});
  const Vector d = affinest::reduced_invariant(s);
  REQUIRE(d.dim() == 2);
  CHECK(d[0] == doctest::Approx(0.8));
  CHECK(d[1] == doctest::Approx(0.2));
}

TEST_CASE("reduced invariant sums to p and ignores affine maps") {
  Rng rng(5150);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 1 + rng.next_u64() % 3;
    const Sample s = testsup::random_sample(rng, 15, p);
    const Vector d = affinest::reduced_invariant(s);
    REQUIRE(d.dim() == 14);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.dim(); ++i) sum += d[i];
    CHECK(sum == doctest::Approx(static_cast<double>(p)).epsilon(1e-9));

    const Matrix b_mat = testsup::random_spd_conditioned(rng, p);
    Vector b(p);
    for (std::size_t a = 0; a < p; ++a) b[a] = rng.normal();
    const Vector mapped = affinest::reduced_invariant(
        testsup::affine_image(s, b_mat, b));
    for (std::size_t i = 0; i < d.dim(); ++i) {
      CHECK(mapped[i] == doctest::Approx(d[i]).epsilon(1e-8));
    }
  }
}
