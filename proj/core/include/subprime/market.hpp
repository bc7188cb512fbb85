#pragma once

// The stage game: both banks' approval decisions under their risk gates,
// applicants' choice of lender, payoff realization and censored belief
// updating.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "subprime/beliefs.hpp"
#include "subprime/risk.hpp"
#include "subprime/stats.hpp"

namespace subprime::market {

enum class Group : std::size_t { W = 0, B = 1 };
enum class Bank : std::size_t { L = 0, H = 1 };

/// Lender accepted by an applicant.
enum class Choice : std::uint8_t { None, L, H };

std::string_view to_string(Group group) noexcept;
std::string_view to_string(Bank bank) noexcept;
std::string_view to_string(Choice choice) noexcept;

constexpr std::size_t idx(Group g) noexcept { return static_cast<std::size_t>(g); }
constexpr std::size_t idx(Bank b) noexcept { return static_cast<std::size_t>(b); }

template <typename T>
using PerGroup = std::array<T, 2>;
template <typename T>
using PerBank = std::array<T, 2>;

struct GroupProfile {
  Group label = Group::W;
  double mean = 1.0;
  double true_variance = 1.0;
  beliefs::CreditFileSpec credit_file{};

  double stdev() const;
};

struct PricingState {
  double premium = 0.0;
  double nu_max = 0.0;

  void validate() const;
};

/// approvals[group][bank].
struct Approvals {
  PerGroup<PerBank<bool>> by{};

  bool operator()(Group g, Bank b) const noexcept { return by[idx(g)][idx(b)]; }
  bool& operator()(Group g, Bank b) noexcept { return by[idx(g)][idx(b)]; }
  bool operator==(const Approvals&) const = default;
};

/// Choices of every applicant in a group. `representative` is the first
/// applicant; counts cover the whole cohort.
struct GroupAcceptance {
  Choice representative = Choice::None;
  std::uint32_t accepted_l = 0;
  std::uint32_t accepted_h = 0;

  std::uint32_t accepted(Bank b) const noexcept { return b == Bank::L ? accepted_l : accepted_h; }
  bool operator==(const GroupAcceptance&) const = default;
};

using Acceptances = PerGroup<GroupAcceptance>;

/// Which of the two groups' payoffs feed the low-rate bank's pooled gate as
/// sigma_W: the true (common knowledge) value or the bank's own posterior.
enum class WVarianceSource { Known, Belief };

struct DecisionOptions {
  WVarianceSource w_variance = WVarianceSource::Known;
};

/// beliefs[bank][group].
using MarketBeliefs = PerBank<PerGroup<beliefs::BeliefState>>;

struct PeriodOutcome {
  std::uint64_t t = 0;
  Approvals approvals{};
  Acceptances acceptances{};
  PerGroup<double> payoff{};   ///< representative applicant's realized payoff
  double profit_l = 0.0;       ///< bank-only profit of L
  double profit_h = 0.0;       ///< kinked profit of H
  double premium = 0.0;
  double subsidy_offered = 0.0;
  double subsidy_paid = 0.0;
  bool l_needs_support = false;  ///< L's unsubsidized pooled gate failed
  double sigma2_bl = 0.0;        ///< L's estimate for B at the start of the period
  double sigma2_bh = 0.0;        ///< H's estimate for B at the start of the period

  bool operator==(const PeriodOutcome&) const = default;
};

/// (1 + premium) max{pi, 0} + min{pi, 0}.
double h_payoff(double pi, double premium);

/// Each bank tries, in order, lending to both groups, to W alone and to B
/// alone, approving the first configuration whose gate passes. H's mean is
/// scaled by (1 + premium); the subsidy offer is credited to L for any
/// configuration that includes B.
Approvals bank_decisions(const MarketBeliefs& beliefs, const PerBank<risk::RiskPolicy>& policies,
                         const PerGroup<GroupProfile>& groups, const PricingState& pricing,
                         double subsidy_offer, const DecisionOptions& options = {});

/// One applicant's choice: cheapest approving bank, fair coin on a price tie.
/// Always consumes exactly one coin from the stream.
Choice applicant_choice(bool approved_l, bool approved_h, const PricingState& pricing,
                        stats::RandomStream& rng);

/// Representative-applicant choices for both groups.
Acceptances applicant_choice(const Approvals& approvals, const PricingState& pricing,
                             stats::RandomStream& rng);

/// nu_max while L excludes B, 0 once L approved B in the previous period.
double h_pricing_rule(bool last_period_l_approved_b, const PricingState& pricing);

/// Full state of one market replication.
struct MarketState {
  PerGroup<GroupProfile> groups{};
  PerBank<risk::RiskPolicy> policies{};
  MarketBeliefs beliefs{};
  PricingState pricing{};
  bool last_period_l_approved_b = false;
  std::uint64_t period = 0;  ///< periods completed so far
  std::uint32_t cohort_size = 1;
  DecisionOptions options{};
};

/// Bank `bank`'s current estimate of group `group`'s variance.
double believed_variance(const MarketState& state, Bank bank, Group group);

/// sigma_W used in pooled gates for `bank`.
double gate_sigma_w(const MarketState& state, Bank bank);

/// Advance one period: pricing, decisions, acceptances, payoff draws,
/// profits and Bayesian updates for every (bank, group) pair with an
/// accepted loan. Banks that rejected or were declined learn nothing.
PeriodOutcome run_period(MarketState& state, double subsidy_offer, stats::RandomStream& rng);

}  // namespace subprime::market
