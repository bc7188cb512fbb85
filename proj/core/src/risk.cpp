#include "subprime/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subprime/stats.hpp"

namespace subprime::risk {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("risk: alpha must lie in (0, 1)");
  }
}

void require_stdev(double stdev) {
  if (!(stdev >= 0.0)) {
    throw std::domain_error("risk: stdev must be >= 0");
  }
}

double squared_or_zero(double budget) { return budget > 0.0 ? budget * budget : 0.0; }

}  // namespace

std::string_view to_string(RiskMetric metric) noexcept {
  return metric == RiskMetric::VaR ? "VaR" : "ES";
}

std::string_view to_string(Aggregation aggregation) noexcept {
  return aggregation == Aggregation::SumOfStds ? "sum_of_stds" : "independent";
}

void RiskPolicy::validate() const {
  if (!std::isfinite(rho)) {
    throw std::invalid_argument("risk policy: rho must be finite");
  }
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("risk policy: alpha must lie in (0, 0.5)");
  }
}

double var_normal(double mean, double stdev, double alpha) {
  require_alpha(alpha);
  require_stdev(stdev);
  return -(mean + stdev * stats::normal_quantile(alpha));
}

double es_normal(double mean, double stdev, double alpha) {
  require_alpha(alpha);
  require_stdev(stdev);
  return mean - stdev * stats::normal_pdf(stats::normal_quantile(alpha)) / alpha;
}

double tail_multiplier(RiskMetric metric, double alpha) {
  require_alpha(alpha);
  const double z = stats::normal_quantile(alpha);
  return metric == RiskMetric::VaR ? z : -stats::normal_pdf(z) / alpha;
}

double combine_stdevs(Aggregation aggregation, double sigma_w, double sigma_b) noexcept {
  return aggregation == Aggregation::SumOfStds ? sigma_w + sigma_b
                                               : std::hypot(sigma_w, sigma_b);
}

double shortfall(const RiskPolicy& policy, double mean, double stdev) {
  require_stdev(stdev);
  const double level = mean + tail_multiplier(policy.metric, policy.alpha) * stdev;
  return policy.rho - level;
}

bool var_gate(const RiskPolicy& policy, double mean, double stdev, double subsidy) {
  return subsidy >= shortfall(policy, mean, stdev);
}

double threshold_unilateral(const RiskPolicy& policy, double mu, double premium) {
  const double z = tail_multiplier(RiskMetric::VaR, policy.alpha);
  // Largest admissible stdev: ((1 + premium) mu - rho) / |z|.
  return squared_or_zero((policy.rho - (1.0 + premium) * mu) / z);
}

double threshold_pooled(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                        double premium) {
  const double z = tail_multiplier(RiskMetric::VaR, policy.alpha);
  return squared_or_zero((policy.rho - ((1.0 + premium) * (mu_w + mu_b) + z * sigma_w)) / z);
}

double threshold_pooled_es(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w) {
  const double k = -tail_multiplier(RiskMetric::ES, policy.alpha);
  const double cap = (mu_w + mu_b - policy.rho) / k;
  if (!(cap > 0.0)) {
    return 0.0;
  }
  return std::max(0.0, cap * cap - sigma_w * sigma_w);
}

double pooled_gate_threshold(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                             double premium) {
  const double m = tail_multiplier(policy.metric, policy.alpha);
  // Gate: (1 + premium)(mu_W + mu_B) + m * combined >= rho, m < 0.
  const double cap = (policy.rho - (1.0 + premium) * (mu_w + mu_b)) / m;
  if (policy.aggregation == Aggregation::SumOfStds) {
    return squared_or_zero(cap - sigma_w);
  }
  if (!(cap > 0.0)) {
    return 0.0;
  }
  return std::max(0.0, cap * cap - sigma_w * sigma_w);
}

double optimal_subsidy(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                       double sigma_b_hat) {
  require_stdev(sigma_w);
  require_stdev(sigma_b_hat);
  const double stdev = combine_stdevs(policy.aggregation, sigma_w, sigma_b_hat);
  return std::max(0.0, shortfall(policy, mu_w + mu_b, stdev));
}

bool ThresholdSet::ordered() const noexcept {
  return 0.0 < sigma2_L_uni && sigma2_L_uni < sigma2_L_pool && sigma2_L_pool < sigma2_H_uni &&
         sigma2_H_uni < sigma2_H_pool;
}

ThresholdSet compute_thresholds(const RiskPolicy& bank_l, const RiskPolicy& bank_h, double mu_w,
                                double mu_b, double sigma_w, double premium) {
  ThresholdSet set;
  set.sigma2_L_uni = threshold_unilateral(bank_l, mu_b, 0.0);
  set.sigma2_H_uni = threshold_unilateral(bank_h, mu_b, premium);
  set.sigma2_L_pool = threshold_pooled(bank_l, mu_w, mu_b, sigma_w, 0.0);
  set.sigma2_H_pool = threshold_pooled(bank_h, mu_w, mu_b, sigma_w, premium);
  set.sigma2_L_pool_es = threshold_pooled_es(bank_l, mu_w, mu_b, sigma_w);
  return set;
}

}  // namespace subprime::risk
