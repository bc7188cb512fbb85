#pragma once

// Closed-form tail-risk evaluation for normally distributed bank profits:
// VaR and Expected Shortfall levels, the variance thresholds below which a
// bank's risk gate lets it lend, and the minimal subsidy that satisfies the
// gate.

#include <string_view>

namespace subprime::risk {

enum class RiskMetric { VaR, ES };

/// How the stdevs of two groups' payoffs combine into the stdev of profit.
enum class Aggregation {
  SumOfStds,    ///< sigma_W + sigma_B (comonotone, the default)
  Independent,  ///< sqrt(sigma_W^2 + sigma_B^2)
};

std::string_view to_string(RiskMetric metric) noexcept;
std::string_view to_string(Aggregation aggregation) noexcept;

/// A bank's tail constraint: P(profit < rho) <= alpha (VaR) or
/// ES_alpha(profit) >= rho (ES).
struct RiskPolicy {
  double rho = -1.0;
  double alpha = 0.05;
  RiskMetric metric = RiskMetric::VaR;
  Aggregation aggregation = Aggregation::SumOfStds;

  /// Throws std::invalid_argument unless 0 < alpha < 0.5 and rho is finite.
  void validate() const;

  /// The ordering of thresholds is only guaranteed for alpha < 0.1.
  bool ordering_guaranteed() const noexcept { return alpha < 0.1; }
};

/// VaR_alpha of N(mean, stdev^2): -(mean + stdev * Phi^-1(alpha)).
double var_normal(double mean, double stdev, double alpha);

/// Expected-shortfall profit level of N(mean, stdev^2):
/// mean - stdev * phi(Phi^-1(alpha)) / alpha. This is the quantity compared
/// against rho (higher is safer).
double es_normal(double mean, double stdev, double alpha);

/// Multiplier m with "metric level = mean + m * stdev": Phi^-1(alpha) for
/// VaR, -phi(Phi^-1(alpha))/alpha for ES. Always negative for alpha < 0.5.
double tail_multiplier(RiskMetric metric, double alpha);

double combine_stdevs(Aggregation aggregation, double sigma_w, double sigma_b) noexcept;

/// rho - (mean + m * stdev): the amount by which the metric level falls
/// short of the floor. The gate passes iff subsidy >= shortfall.
double shortfall(const RiskPolicy& policy, double mean, double stdev);

/// True iff the policy's metric is satisfied for profit N(mean, stdev^2)
/// plus a deterministic side payment.
bool var_gate(const RiskPolicy& policy, double mean, double stdev, double subsidy = 0.0);

/// Largest variance of a single group at which a bank with rate factor
/// (1 + premium) still meets its VaR constraint:
/// ((rho - (1 + premium) mu) / Phi^-1(alpha))^2, clamped to 0 when
/// rho >= (1 + premium) mu.
double threshold_unilateral(const RiskPolicy& policy, double mu, double premium);

/// Largest believed B variance at which the bank can lend to both groups
/// under VaR with summed stdevs:
/// ((rho - [(1 + premium)(mu_W + mu_B) + Phi^-1(alpha) sigma_W]) / Phi^-1(alpha))^2,
/// clamped to 0 when no B variance is acceptable.
double threshold_pooled(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                        double premium);

/// Expected-shortfall pooled threshold for the low-rate bank:
/// max{0, ((mu_W + mu_B - rho) / (phi(Phi^-1(alpha))/alpha))^2 - sigma_W^2}.
double threshold_pooled_es(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w);

/// Exact inversion of the pooled var_gate for the policy's own metric and
/// aggregation: sigma_B^2 <= result iff var_gate(pooled) passes without
/// subsidy. Coincides with threshold_pooled for (VaR, SumOfStds) and with
/// threshold_pooled_es for (ES, Independent).
double pooled_gate_threshold(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                             double premium);

/// Minimal s >= 0 with the pooled gate satisfied:
/// max{0, rho - (mu_W + mu_B) - m * combine(sigma_W, sigma_B_hat)}.
double optimal_subsidy(const RiskPolicy& policy, double mu_w, double mu_b, double sigma_w,
                       double sigma_b_hat);

/// The five headline thresholds for a low-rate bank L and a high-rate bank H.
struct ThresholdSet {
  double sigma2_L_uni = 0.0;
  double sigma2_H_uni = 0.0;
  double sigma2_L_pool = 0.0;
  double sigma2_H_pool = 0.0;
  double sigma2_L_pool_es = 0.0;

  /// 0 < L_uni < L_pool < H_uni < H_pool.
  bool ordered() const noexcept;
};

/// Thresholds at a common mean mu for both groups and H's premium.
ThresholdSet compute_thresholds(const RiskPolicy& bank_l, const RiskPolicy& bank_h, double mu_w,
                                double mu_b, double sigma_w, double premium);

}  // namespace subprime::risk
