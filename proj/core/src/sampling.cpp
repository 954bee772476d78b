#include "affinest/sampling.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace affinest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^
                    (0x9E3779B97F4A7C15ull * (index + 1)));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the logarithm's argument in (0, 1]
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::chi_squared(double df) {
  if (!(df > 0.0)) throw Error("chi_squared: df must be > 0");
  if (df == std::floor(df) && df <= 1e6) {
    double sum = 0.0;
    const auto k = static_cast<std::uint64_t>(df);
    for (std::uint64_t i = 0; i < k; ++i) {
      const double z = normal();
      sum += z * z;
    }
    return sum;
  }
  return gamma(0.5 * df, 2.0);
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0)) throw Error("gamma: shape must be > 0");
  if (shape < 1.0) {
    // boost to shape + 1 and thin by u^{1/shape}
    const double u = 1.0 - uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

Sample draw_sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  const std::size_t p = spec.p();
  if (p == 0) throw Error("draw_sample: empty theta");
  if (spec.sigma.rows() != p || spec.sigma.cols() != p) {
    throw DimensionMismatch("draw_sample: sigma must be " + std::to_string(p) +
                            "x" + std::to_string(p));
  }
  if (n <= p) {
    throw DimensionMismatch("draw_sample: need n > p, got n=" + std::to_string(n) +
                            " p=" + std::to_string(p));
  }
  if (spec.kind == DistributionSpec::Kind::StudentT && !(spec.df > 0.0)) {
    throw Error("draw_sample: StudentT requires df > 0");
  }

  const Matrix lower = [&] {
    try {
      return spd_factorize(spec.sigma).lower();
    } catch (const NotPositiveDefinite& e) {
      throw DegenerateScatter(std::string("draw_sample: sigma not SPD: ") + e.what());
    }
  }();

  Rng rng(seed);
  Matrix data(n, p);
  Vector z(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) z[a] = rng.normal();
    double mix = 1.0;
    if (spec.kind == DistributionSpec::Kind::StudentT) {
      mix = 1.0 / std::sqrt(rng.chi_squared(spec.df) / spec.df);
    }
    for (std::size_t a = 0; a < p; ++a) {
      double lz = 0.0;
      for (std::size_t b = 0; b <= a; ++b) lz += lower(a, b) * z[b];
      data(i, a) = spec.theta[a] + mix * lz;
    }
  }
  return Sample(std::move(data));
}

}  // namespace affinest
