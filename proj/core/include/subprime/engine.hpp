#pragma once

// Multi-period orchestration: baseline (trap) runs, adaptive-subsidy runs,
// generic guarantee schedules, escape-time detection and Monte Carlo
// aggregation over independent replications.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "subprime/market.hpp"

namespace subprime::engine {

enum class SubsidyMode { None, AdaptiveVar, AdaptiveEs, CustomGuarantee };

std::string_view to_string(SubsidyMode mode) noexcept;

/// Raised when a scenario violates a structural invariant or, for baseline
/// runs, one of the trap assumptions. The message names the violation.
class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a guarantee schedule leaves L's gate unsatisfied.
class GuaranteeError : public std::runtime_error {
public:
  GuaranteeError(std::uint64_t period, const std::string& what)
      : std::runtime_error(what), period_(period) {}
  std::uint64_t period() const noexcept { return period_; }

private:
  std::uint64_t period_;
};

struct ScenarioConfig {
  market::PerGroup<market::GroupProfile> groups{};
  market::PerBank<risk::RiskPolicy> policies{};
  market::PerBank<stats::InvGammaParams> priors{};
  market::PricingState pricing{};
  std::uint64_t horizon = 1000;
  SubsidyMode subsidy_mode = SubsidyMode::None;
  std::uint64_t replications = 1;
  std::uint64_t base_seed = 0;
  std::uint32_t cohort_size = 1;
  market::WVarianceSource w_variance = market::WVarianceSource::Known;
  bool allow_unequal_means = false;
  bool validate_assumptions = true;
  /// Horizons at which the Monte Carlo report tabulates escape probability.
  std::vector<std::uint64_t> checkpoints{};
};

/// Structural invariants (alpha range, variances, completeness, equal
/// means unless waived). Throws ScenarioError.
void validate_structure(const ScenarioConfig& config);

/// L's policy after applying the subsidy mode's metric override.
risk::RiskPolicy effective_policy_l(const ScenarioConfig& config);

struct AssumptionCheck {
  std::string name;
  bool holds = false;
  std::string detail;
};

/// Numerical check of the five trap assumptions at t = 0.
std::vector<AssumptionCheck> check_trap_assumptions(const ScenarioConfig& config);

/// Throws ScenarioError naming the first violated assumption.
void require_trap_assumptions(const ScenarioConfig& config);

/// Market state at t = 0 with priors built from the credit files.
market::MarketState initial_state(const ScenarioConfig& config);

/// L's pooled lending threshold under its effective policy.
double l_pooled_threshold(const ScenarioConfig& config);

struct TrajectoryRecord {
  std::vector<market::PeriodOutcome> outcomes;
  std::optional<std::uint64_t> escape_time;  ///< 1-based period index
  std::uint64_t recross_count = 0;
  double total_subsidy = 0.0;
  double threshold_l_pool = 0.0;
  double terminal_sigma2_bl = 0.0;  ///< L's estimate after the final update
  double terminal_sigma2_bh = 0.0;

  bool escaped() const noexcept { return escape_time.has_value(); }
};

struct GuaranteeContext {
  std::uint64_t t = 0;
  double sigma2_bl = 0.0;
  double optimal_subsidy = 0.0;
};

/// A temporary side-payment schedule G(t) for Bank L. The default
/// feasibility predicate is L's pooled gate with G(t) credited.
struct GuaranteePolicy {
  std::function<double(const GuaranteeContext&)> schedule;
  std::function<bool(const GuaranteeContext&, double guarantee)> feasible;

  static GuaranteePolicy optimal();
  static GuaranteePolicy optimal_plus(double offset);
  static GuaranteePolicy constant(double amount);
};

TrajectoryRecord run_baseline(const ScenarioConfig& config, std::uint64_t seed,
                              std::uint64_t stream_id = 0);
TrajectoryRecord run_adaptive_subsidy(const ScenarioConfig& config, std::uint64_t seed,
                                      std::uint64_t stream_id = 0);
TrajectoryRecord run_with_guarantee(const ScenarioConfig& config, const GuaranteePolicy& policy,
                                    std::uint64_t seed, std::uint64_t stream_id = 0);

/// Dispatch on config.subsidy_mode. CustomGuarantee uses `guarantee`, or
/// G = s* when none is given.
TrajectoryRecord run_scenario(const ScenarioConfig& config, std::uint64_t seed,
                              std::uint64_t stream_id = 0,
                              const GuaranteePolicy* guarantee = nullptr);

/// L never approves B and its belief about B never moves. An empty
/// trajectory is vacuously a trap.
bool detect_trap(const TrajectoryRecord& trajectory);

/// Per-replication summary retained by monte_carlo.
struct ReplicationSummary {
  std::optional<std::uint64_t> escape_time;
  std::uint64_t recross_count = 0;
  double total_subsidy = 0.0;
  double initial_sigma2_bl = 0.0;
  double terminal_sigma2_bl = 0.0;
  double mean_premium_pre = 0.0;   ///< mean premium paid by B per period before tau
  double mean_premium_post = 0.0;  ///< same, from tau on (0 when no such periods)
  std::uint64_t periods_pre = 0;
  std::uint64_t periods_post = 0;
  double h_withdrawal_rate = 0.0;  ///< share of periods H did not approve B
  bool trap = false;
};

ReplicationSummary summarize(const TrajectoryRecord& trajectory);

struct MonteCarloReport {
  std::uint64_t replications = 0;
  std::vector<std::pair<std::uint64_t, double>> escape_probability_by_horizon;
  double escape_probability = 0.0;
  std::optional<double> mean_tau;
  std::optional<double> median_tau;
  double mean_total_subsidy = 0.0;
  double mean_premium_pre = 0.0;
  double mean_premium_post = 0.0;
  double h_withdrawal_frequency = 0.0;
  double mean_initial_sigma2_bl = 0.0;
  double mean_terminal_sigma2_bl = 0.0;
  double trap_fraction = 0.0;
  std::vector<ReplicationSummary> per_replication;
};

/// Worker count from SUBPRIME_SIM_THREADS, else hardware concurrency.
unsigned default_thread_count();

/// R replications on streams (base_seed, r). The result does not depend on
/// the thread count.
MonteCarloReport monte_carlo(const ScenarioConfig& config, unsigned threads = 0,
                             const GuaranteePolicy* guarantee = nullptr);

}  // namespace subprime::engine
