#include "subprime/beliefs.hpp"

#include <cmath>
#include <stdexcept>

namespace subprime::beliefs {

void CreditFileSpec::validate() const {
  if (!(n >= 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("credit file: n must be a finite count >= 0");
  }
  if (!(completeness >= 0.0 && completeness <= 1.0)) {
    throw std::invalid_argument("credit file: completeness must lie in [0, 1]");
  }
  if (!(sample_variance >= 0.0) || !std::isfinite(sample_variance)) {
    throw std::invalid_argument("credit file: sample_variance must be >= 0");
  }
}

BeliefState::BeliefState(stats::InvGammaParams base, double effective_size,
                         double historical_variance, std::uint64_t observations,
                         double sum_sq_dev)
    : base_(base),
      effective_size_(effective_size),
      historical_variance_(historical_variance),
      observations_(observations),
      sum_sq_dev_(sum_sq_dev) {
  shape_ = base_.shape + (effective_size_ + static_cast<double>(observations_)) / 2.0;
  scale_ = base_.scale + (effective_size_ * historical_variance_ + sum_sq_dev_) / 2.0;
}

BeliefState prior_from_credit_file(const stats::InvGammaParams& base, const CreditFileSpec& file) {
  if (!(base.shape > 1.0)) {
    throw stats::UndefinedMeanError("prior_from_credit_file: base shape must exceed 1");
  }
  if (!(base.scale > 0.0)) {
    throw std::invalid_argument("prior_from_credit_file: base scale must be positive");
  }
  file.validate();
  return BeliefState(base, file.effective_size(), file.sample_variance, 0, 0.0);
}

BeliefState update_with_return(const BeliefState& belief, double observed_return,
                               double known_mean) {
  if (!std::isfinite(observed_return) || !std::isfinite(known_mean)) {
    throw std::domain_error("update_with_return: non-finite return");
  }
  const double dev = observed_return - known_mean;
  return BeliefState(belief.base(), belief.effective_size(), belief.historical_variance(),
                     belief.observations() + 1, belief.sum_sq_dev() + dev * dev);
}

double posterior_variance_estimate(const BeliefState& belief) {
  return stats::inv_gamma_mean(belief.posterior());
}

}  // namespace subprime::beliefs
