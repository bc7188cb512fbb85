#pragma once

// Conjugate Inverse-Gamma beliefs about a group's payoff variance when the
// payoff mean is known.

#include <cstdint>

#include "subprime/stats.hpp"

namespace subprime::beliefs {

/// Historical credit data for one applicant group.
struct CreditFileSpec {
  double n = 0.0;                ///< historical applicants
  double completeness = 1.0;     ///< fraction p_i of complete files, in [0, 1]
  double sample_variance = 1.0;  ///< historical S^2_i

  /// Effective sample size n * p_i. May be non-integer.
  double effective_size() const noexcept { return n * completeness; }

  void validate() const;
};

/// One bank's posterior over one group's variance.
///
/// Shape and scale are always recomputed from the base prior, the credit
/// file contribution and the running sufficient statistics, so
///   shape = a0 + (n p + m) / 2
///   scale = b0 + (n p S^2 + ssd) / 2
/// holds exactly regardless of how the observations were fed in.
class BeliefState {
public:
  BeliefState() = default;
  BeliefState(stats::InvGammaParams base, double effective_size, double historical_variance,
              std::uint64_t observations, double sum_sq_dev);

  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  std::uint64_t observations() const noexcept { return observations_; }
  double sum_sq_dev() const noexcept { return sum_sq_dev_; }

  const stats::InvGammaParams& base() const noexcept { return base_; }
  double effective_size() const noexcept { return effective_size_; }
  double historical_variance() const noexcept { return historical_variance_; }

  stats::InvGammaParams posterior() const noexcept { return {shape_, scale_}; }

  bool operator==(const BeliefState&) const = default;

private:
  stats::InvGammaParams base_{};
  double effective_size_ = 0.0;
  double historical_variance_ = 1.0;
  std::uint64_t observations_ = 0;
  double sum_sq_dev_ = 0.0;
  double shape_ = 2.0;
  double scale_ = 1.0;
};

BeliefState prior_from_credit_file(const stats::InvGammaParams& base, const CreditFileSpec& file);

/// Posterior after observing one repayment with known mean.
BeliefState update_with_return(const BeliefState& belief, double observed_return,
                               double known_mean);

/// Posterior mean b / (a - 1).
double posterior_variance_estimate(const BeliefState& belief);

}  // namespace subprime::beliefs
