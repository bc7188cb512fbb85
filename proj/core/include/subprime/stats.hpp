#pragma once

// Numeric kernels for the credit-market simulator: the standard normal
// pdf/cdf/quantile, seeded random streams, Normal and Inverse-Gamma draws.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace subprime::stats {

/// Thrown when an Inverse-Gamma mean (or posterior variance estimate) is
/// requested for shape <= 1.
class UndefinedMeanError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// One reproducible stream of pseudo-random numbers.
///
/// A stream is identified by (seed, stream_id). Identical identifiers give
/// bit-identical sequences on every run; replication r of a Monte Carlo
/// study uses stream_id = r. Streams are movable values and must not be
/// shared between threads.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw on the open interval (0, 1) with 53 bits of resolution.
  double uniform();

  /// Fair coin.
  bool coin() { return (engine_() >> 63) != 0; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;

  bool operator==(const NormalParams&) const = default;
};

struct InvGammaParams {
  double shape = 2.0;
  double scale = 1.0;

  bool operator==(const InvGammaParams&) const = default;
};

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1). Round trip error is below 1e-10.
double normal_quantile(double p);

/// Draw from N(mean, variance). A zero variance returns mean exactly.
double sample_normal(const NormalParams& params, RandomStream& rng);

/// b / (a - 1); throws UndefinedMeanError when a <= 1.
double inv_gamma_mean(const InvGammaParams& params);

/// Gamma(shape, scale) draw (Marsaglia-Tsang).
double sample_gamma(double shape, double scale, RandomStream& rng);

/// Inverse-Gamma draw as the reciprocal of Gamma(a, 1/b).
double sample_inv_gamma(const InvGammaParams& params, RandomStream& rng);

}  // namespace subprime::stats
