#include "subprime/market.hpp"

#include <cmath>
#include <stdexcept>

namespace subprime::market {

std::string_view to_string(Group group) noexcept { return group == Group::W ? "W" : "B"; }

std::string_view to_string(Bank bank) noexcept { return bank == Bank::L ? "L" : "H"; }

std::string_view to_string(Choice choice) noexcept {
  switch (choice) {
    case Choice::L:
      return "L";
    case Choice::H:
      return "H";
    case Choice::None:
      break;
  }
  return "none";
}

double GroupProfile::stdev() const { return std::sqrt(true_variance); }

void PricingState::validate() const {
  if (!(nu_max >= 0.0) || !std::isfinite(nu_max)) {
    throw std::invalid_argument("pricing: nu_max must be a finite value >= 0");
  }
  if (!(premium >= 0.0 && premium <= nu_max)) {
    throw std::invalid_argument("pricing: premium must lie in [0, nu_max]");
  }
}

double h_payoff(double pi, double premium) {
  return (1.0 + premium) * std::max(pi, 0.0) + std::min(pi, 0.0);
}

namespace {

struct BankInputs {
  double sigma_w;
  double sigma_b;
  double rate_factor;
  double subsidy;
};

PerBank<bool> decide(const risk::RiskPolicy& policy, const PerGroup<GroupProfile>& groups,
                     const BankInputs& in) {
  const double mu_w = groups[idx(Group::W)].mean;
  const double mu_b = groups[idx(Group::B)].mean;
  const double pooled_sd = risk::combine_stdevs(policy.aggregation, in.sigma_w, in.sigma_b);
  if (risk::var_gate(policy, in.rate_factor * (mu_w + mu_b), pooled_sd, in.subsidy)) {
    return {true, true};
  }
  if (risk::var_gate(policy, in.rate_factor * mu_w, in.sigma_w, 0.0)) {
    return {true, false};
  }
  if (risk::var_gate(policy, in.rate_factor * mu_b, in.sigma_b, in.subsidy)) {
    return {false, true};
  }
  return {false, false};
}

double w_stdev(const MarketBeliefs& beliefs, const PerGroup<GroupProfile>& groups, Bank bank,
               const DecisionOptions& options) {
  if (options.w_variance == WVarianceSource::Known) {
    return groups[idx(Group::W)].stdev();
  }
  return std::sqrt(beliefs::posterior_variance_estimate(beliefs[idx(bank)][idx(Group::W)]));
}

}  // namespace

Approvals bank_decisions(const MarketBeliefs& beliefs, const PerBank<risk::RiskPolicy>& policies,
                         const PerGroup<GroupProfile>& groups, const PricingState& pricing,
                         double subsidy_offer, const DecisionOptions& options) {
  Approvals approvals;
  for (const Bank bank : {Bank::L, Bank::H}) {
    const BankInputs in{
        w_stdev(beliefs, groups, bank, options),
        std::sqrt(beliefs::posterior_variance_estimate(beliefs[idx(bank)][idx(Group::B)])),
        bank == Bank::H ? 1.0 + pricing.premium : 1.0,
        bank == Bank::L ? subsidy_offer : 0.0,
    };
    const auto [w, b] = decide(policies[idx(bank)], groups, in);
    approvals(Group::W, bank) = w;
    approvals(Group::B, bank) = b;
  }
  return approvals;
}

Choice applicant_choice(bool approved_l, bool approved_h, const PricingState& pricing,
                        stats::RandomStream& rng) {
  const bool heads = rng.coin();
  if (approved_l && approved_h) {
    if (pricing.premium > 0.0) {
      return Choice::L;
    }
    return heads ? Choice::L : Choice::H;
  }
  if (approved_l) {
    return Choice::L;
  }
  if (approved_h) {
    return Choice::H;
  }
  return Choice::None;
}

Acceptances applicant_choice(const Approvals& approvals, const PricingState& pricing,
                             stats::RandomStream& rng) {
  Acceptances out;
  for (const Group g : {Group::W, Group::B}) {
    const Choice c = applicant_choice(approvals(g, Bank::L), approvals(g, Bank::H), pricing, rng);
    out[idx(g)].representative = c;
    out[idx(g)].accepted_l = c == Choice::L;
    out[idx(g)].accepted_h = c == Choice::H;
  }
  return out;
}

double h_pricing_rule(bool last_period_l_approved_b, const PricingState& pricing) {
  return last_period_l_approved_b ? 0.0 : pricing.nu_max;
}

double believed_variance(const MarketState& state, Bank bank, Group group) {
  return beliefs::posterior_variance_estimate(state.beliefs[idx(bank)][idx(group)]);
}

double gate_sigma_w(const MarketState& state, Bank bank) {
  return w_stdev(state.beliefs, state.groups, bank, state.options);
}

PeriodOutcome run_period(MarketState& state, double subsidy_offer, stats::RandomStream& rng) {
  if (!(subsidy_offer >= 0.0)) {
    throw std::invalid_argument("run_period: subsidy offer must be >= 0");
  }
  PeriodOutcome out;
  out.t = state.period + 1;
  out.sigma2_bl = believed_variance(state, Bank::L, Group::B);
  out.sigma2_bh = believed_variance(state, Bank::H, Group::B);

  state.pricing.premium = h_pricing_rule(state.last_period_l_approved_b, state.pricing);
  out.premium = state.pricing.premium;

  const auto& policy_l = state.policies[idx(Bank::L)];
  const double sigma_w_l = gate_sigma_w(state, Bank::L);
  const double pooled_sd =
      risk::combine_stdevs(policy_l.aggregation, sigma_w_l, std::sqrt(out.sigma2_bl));
  out.l_needs_support =
      !risk::var_gate(policy_l, state.groups[0].mean + state.groups[1].mean, pooled_sd, 0.0);

  out.approvals = bank_decisions(state.beliefs, state.policies, state.groups, state.pricing,
                                 subsidy_offer, state.options);
  out.subsidy_offered = out.approvals(Group::B, Bank::L) ? subsidy_offer : 0.0;

  MarketBeliefs next = state.beliefs;
  for (const Group g : {Group::W, Group::B}) {
    const GroupProfile& profile = state.groups[idx(g)];
    const stats::NormalParams law{profile.mean, profile.true_variance};
    GroupAcceptance& acc = out.acceptances[idx(g)];
    for (std::uint32_t k = 0; k < state.cohort_size; ++k) {
      const double pi = stats::sample_normal(law, rng);
      const Choice c = applicant_choice(out.approvals(g, Bank::L), out.approvals(g, Bank::H),
                                        state.pricing, rng);
      if (k == 0) {
        acc.representative = c;
        out.payoff[idx(g)] = pi;
      }
      if (c == Choice::L) {
        ++acc.accepted_l;
        out.profit_l += pi;
        next[idx(Bank::L)][idx(g)] =
            beliefs::update_with_return(next[idx(Bank::L)][idx(g)], pi, profile.mean);
      } else if (c == Choice::H) {
        ++acc.accepted_h;
        out.profit_h += h_payoff(pi, state.pricing.premium);
        next[idx(Bank::H)][idx(g)] =
            beliefs::update_with_return(next[idx(Bank::H)][idx(g)], pi, profile.mean);
      }
    }
  }
  if (out.acceptances[idx(Group::B)].accepted_l > 0) {
    out.subsidy_paid = out.subsidy_offered;
  }

  state.beliefs = next;
  state.last_period_l_approved_b = out.approvals(Group::B, Bank::L);
  ++state.period;
  return out;
}

}  // namespace subprime::market
