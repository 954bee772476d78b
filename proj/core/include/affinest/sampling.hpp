#ifndef AFFINEST_SAMPLING_HPP
#define AFFINEST_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "affinest/estimators.hpp"

// Seeded, reproducible multivariate normal and Student-t sampling.
//
// All randomness flows through Rng, a thin wrapper around std::mt19937_64
// with explicitly documented transforms, so that identical seeds give
// bit-identical samples on any build of this library:
//   uniform:  (next_u64() >> 11) * 2^-53, uniform on [0, 1)
//   normal:   Box-Muller pair from (1 - u1, u2), spare value cached
//   chi^2:    sum of df squared normals for integer df, gamma(df/2, 2)
//             via Marsaglia-Tsang otherwise

namespace affinest {

/// splitmix64 mix of (master_seed, stream_index); used to give each
/// simulation replication its own independent stream.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal (Box-Muller; consumes two uniforms per pair).
  double normal();

  /// Chi-squared with df > 0 degrees of freedom.
  double chi_squared(double df);

  /// Gamma(shape, scale), shape > 0 (Marsaglia-Tsang).
  double gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// The distribution a simulation draws from: N_p(theta, sigma) or the
/// elliptical Student-t with the same location/scatter parameters.
struct DistributionSpec {
  enum class Kind { Normal, StudentT };
  Kind kind = Kind::Normal;
  double df = 0.0;  // StudentT only; must be > 0
  Vector theta;
  Matrix sigma;

  std::size_t p() const noexcept { return theta.dim(); }
};

/// Draw an n x p sample.  Normal: X = theta + L z with L the Cholesky factor
/// of sigma and z iid standard normal.  StudentT: X = theta + L z /
/// sqrt(w/df) with one w ~ chi^2_df per observation, drawn after that
/// observation's normals.  Identical (spec, n, seed) triples give
/// bit-identical output.
Sample draw_sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace affinest

#endif  // AFFINEST_SAMPLING_HPP
