#include <gtest/gtest.h>

#include <cmath>

#include "subprime/engine.hpp"
#include "subprime/market.hpp"
#include "support/reference.hpp"

namespace subprime::market {
namespace {

MarketState reference_state() { return engine::initial_state(testing::reference_config()); }

TEST(HPayoff, Kinked) {
  EXPECT_DOUBLE_EQ(h_payoff(2.0, 0.2), 2.4);
  EXPECT_DOUBLE_EQ(h_payoff(-1.5, 0.2), -1.5);
  EXPECT_DOUBLE_EQ(h_payoff(0.0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(h_payoff(3.0, 0.0), 3.0);
}

TEST(HPricingRule, TwoStates) {
  const PricingState p{0.2, 0.2};
  EXPECT_DOUBLE_EQ(h_pricing_rule(false, p), 0.2);
  EXPECT_DOUBLE_EQ(h_pricing_rule(true, p), 0.0);
  EXPECT_DOUBLE_EQ(h_pricing_rule(false, {0.0, 0.0}), 0.0);
}

TEST(PricingState, Validate) {
  EXPECT_NO_THROW((PricingState{0.1, 0.2}.validate()));
  EXPECT_THROW((PricingState{0.3, 0.2}.validate()), std::invalid_argument);
  EXPECT_THROW((PricingState{0.0, -0.1}.validate()), std::invalid_argument);
}

TEST(BankDecisions, TrapConfiguration) {
  const auto s = reference_state();
  const auto a = bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, 0.0);
  EXPECT_TRUE(a(Group::W, Bank::L));
  EXPECT_FALSE(a(Group::B, Bank::L));
  EXPECT_TRUE(a(Group::W, Bank::H));
  EXPECT_TRUE(a(Group::B, Bank::H));
}

TEST(BankDecisions, SubsidyAtOptimumOpensPooledLending) {
  const auto s = reference_state();
  const double sigma_bl = std::sqrt(believed_variance(s, Bank::L, Group::B));
  const double star = risk::optimal_subsidy(s.policies[0], 1.0, 1.0, 0.5, sigma_bl);
  ASSERT_GT(star, 0.0);
  EXPECT_TRUE(bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, star)(Group::B, Bank::L));
  EXPECT_FALSE(
      bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, star - 1e-6)(Group::B, Bank::L));
}

TEST(BankDecisions, SubsidyNeverReachesH) {
  auto s = reference_state();
  // Make H's belief about B far too pessimistic for any configuration with B.
  s.beliefs[1][1] = beliefs::prior_from_credit_file({2.0, 500.0}, {200.0, 0.01, 1.0});
  const auto a = bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, 100.0);
  EXPECT_FALSE(a(Group::B, Bank::H));
  EXPECT_TRUE(a(Group::B, Bank::L));
}

TEST(BankDecisions, FallsBackToBAloneWhenWIsTooRisky) {
  auto s = reference_state();
  s.groups[0].true_variance = 100.0;  // W too risky under known sigma_W
  s.beliefs[0][1] = beliefs::prior_from_credit_file({2.0, 0.2}, {0.0, 1.0, 1.0});
  const auto a = bank_decisions(s.beliefs, s.policies, s.groups, {0.0, 0.0}, 0.0);
  EXPECT_FALSE(a(Group::W, Bank::L));
  EXPECT_TRUE(a(Group::B, Bank::L));
}

TEST(BankDecisions, BeliefSourceForW) {
  auto s = reference_state();
  s.beliefs[0][0] = beliefs::prior_from_credit_file({2.0, 1000.0}, {0.0, 1.0, 1.0});
  DecisionOptions known;
  DecisionOptions belief{WVarianceSource::Belief};
  EXPECT_TRUE(bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, 0.0, known)(Group::W,
                                                                                     Bank::L));
  EXPECT_FALSE(bank_decisions(s.beliefs, s.policies, s.groups, s.pricing, 0.0, belief)(Group::W,
                                                                                       Bank::L));
}

TEST(ApplicantChoice, CheapestApprovingBank) {
  stats::RandomStream rng(1, 0);
  const PricingState priced{0.2, 0.2};
  EXPECT_EQ(applicant_choice(true, true, priced, rng), Choice::L);
  EXPECT_EQ(applicant_choice(false, true, priced, rng), Choice::H);
  EXPECT_EQ(applicant_choice(true, false, priced, rng), Choice::L);
  EXPECT_EQ(applicant_choice(false, false, priced, rng), Choice::None);
}

TEST(ApplicantChoice, FairCoinOnTie) {
  stats::RandomStream rng(2, 0);
  const PricingState tie{0.0, 0.2};
  int to_l = 0;
  constexpr int kTrials = 10000;
  for (int i = 0; i < kTrials; ++i) {
    to_l += applicant_choice(true, true, tie, rng) == Choice::L;
  }
  EXPECT_NEAR(static_cast<double>(to_l) / kTrials, 0.5, 0.02);
}

TEST(ApplicantChoice, AlwaysConsumesOneCoin) {
  stats::RandomStream a(3, 0);
  stats::RandomStream b(3, 0);
  applicant_choice(false, false, {0.2, 0.2}, a);
  b.next_u64();
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RunPeriod, TrapLeavesLBeliefAboutBFrozen) {
  auto s = reference_state();
  stats::RandomStream rng(4, 0);
  const auto before = s.beliefs[0][1];
  for (int t = 0; t < 200; ++t) {
    const auto out = run_period(s, 0.0, rng);
    EXPECT_FALSE(out.approvals(Group::B, Bank::L));
    EXPECT_EQ(out.acceptances[1].representative, Choice::H);
    EXPECT_DOUBLE_EQ(out.premium, 0.2);
    EXPECT_TRUE(out.l_needs_support);
  }
  EXPECT_EQ(s.beliefs[0][1], before);
  EXPECT_EQ(s.period, 200u);
}

TEST(RunPeriod, OnlyAcceptingBankLearns) {
  auto s = reference_state();
  stats::RandomStream rng(5, 0);
  const auto before = s.beliefs;
  const auto out = run_period(s, 0.0, rng);
  // With nu > 0 both W applicants go to L; H lends only to B.
  EXPECT_EQ(out.acceptances[0].representative, Choice::L);
  EXPECT_EQ(out.acceptances[0].accepted_h, 0u);
  EXPECT_EQ(out.acceptances[1].accepted_l, 0u);
  EXPECT_EQ(s.beliefs[0][0].observations(), before[0][0].observations() + 1);
  EXPECT_EQ(s.beliefs[1][0], before[1][0]);
  EXPECT_EQ(s.beliefs[1][1].observations(), before[1][1].observations() + 1);
  EXPECT_EQ(s.beliefs[0][1], before[0][1]);
}

TEST(RunPeriod, ProfitAccounting) {
  auto s = reference_state();
  stats::RandomStream rng(6, 0);
  for (int t = 0; t < 50; ++t) {
    const auto out = run_period(s, 0.0, rng);
    EXPECT_DOUBLE_EQ(out.profit_l, out.payoff[0]);
    EXPECT_DOUBLE_EQ(out.profit_h, h_payoff(out.payoff[1], out.premium));
  }
}

TEST(RunPeriod, SubsidyPaidOnlyWhenBAcceptsL) {
  auto s = reference_state();
  stats::RandomStream rng(7, 0);
  const double sigma_bl = std::sqrt(believed_variance(s, Bank::L, Group::B));
  const double star = risk::optimal_subsidy(s.policies[0], 1.0, 1.0, 0.5, sigma_bl);
  const auto out = run_period(s, star, rng);
  EXPECT_TRUE(out.approvals(Group::B, Bank::L));
  EXPECT_EQ(out.acceptances[1].representative, Choice::L);  // premium 0.2 favours L
  EXPECT_DOUBLE_EQ(out.subsidy_offered, star);
  EXPECT_DOUBLE_EQ(out.subsidy_paid, star);
  EXPECT_EQ(s.beliefs[0][1].observations(), 1u);
  EXPECT_TRUE(s.last_period_l_approved_b);
  // Next period H undercuts to zero.
  const auto next = run_period(s, star, rng);
  EXPECT_DOUBLE_EQ(next.premium, 0.0);
}

TEST(RunPeriod, DeterministicGivenSeed) {
  auto a = reference_state();
  auto b = reference_state();
  stats::RandomStream ra(8, 3);
  stats::RandomStream rb(8, 3);
  for (int t = 0; t < 100; ++t) {
    EXPECT_EQ(run_period(a, 0.5, ra), run_period(b, 0.5, rb));
  }
}

TEST(RunPeriod, CohortCounts) {
  auto s = reference_state();
  s.cohort_size = 7;
  stats::RandomStream rng(9, 0);
  const auto out = run_period(s, 0.0, rng);
  EXPECT_EQ(out.acceptances[0].accepted_l, 7u);
  EXPECT_EQ(out.acceptances[1].accepted_h, 7u);
  EXPECT_EQ(s.beliefs[0][0].observations(), 7u);
}

TEST(RunPeriod, RejectsNegativeOffer) {
  auto s = reference_state();
  stats::RandomStream rng(10, 0);
  EXPECT_THROW(run_period(s, -1.0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace subprime::market
