#include "subprime/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace subprime::engine {

using market::Bank;
using market::Group;
using market::idx;

std::string_view to_string(SubsidyMode mode) noexcept {
  switch (mode) {
    case SubsidyMode::AdaptiveVar:
      return "adaptive_var";
    case SubsidyMode::AdaptiveEs:
      return "adaptive_es";
    case SubsidyMode::CustomGuarantee:
      return "custom_guarantee";
    case SubsidyMode::None:
      break;
  }
  return "none";
}

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Largest single-group variance passing the bank's own gate at rate factor
// (1 + premium).
double unilateral_gate_threshold(const risk::RiskPolicy& policy, double mu, double premium) {
  const double m = risk::tail_multiplier(policy.metric, policy.alpha);
  const double cap = (policy.rho - (1.0 + premium) * mu) / m;
  return cap > 0.0 ? cap * cap : 0.0;
}

}  // namespace

void validate_structure(const ScenarioConfig& config) {
  auto fail = [](const std::string& msg) { throw ScenarioError(msg); };
  for (const Group g : {Group::W, Group::B}) {
    const auto& p = config.groups[idx(g)];
    const std::string name = "groups." + std::string(market::to_string(g));
    if (p.label != g) {
      fail(name + ": label mismatch");
    }
    if (!std::isfinite(p.mean) || !(p.mean > 0.0)) {
      fail(name + ".mean must be finite and > 0");
    }
    if (!std::isfinite(p.true_variance) || !(p.true_variance >= 0.0)) {
      fail(name + ".variance must be finite and >= 0");
    }
    try {
      p.credit_file.validate();
    } catch (const std::invalid_argument& e) {
      fail(name + ": " + e.what());
    }
  }
  if (!config.allow_unequal_means &&
      config.groups[idx(Group::W)].mean != config.groups[idx(Group::B)].mean) {
    fail("A1 equal expected creditworthiness: mu_W != mu_B; set "
         "allow_unequal_means to run a counterfactual");
  }
  for (const Bank b : {Bank::L, Bank::H}) {
    const std::string name = "banks." + std::string(market::to_string(b));
    try {
      config.policies[idx(b)].validate();
    } catch (const std::invalid_argument& e) {
      fail(name + ": " + e.what());
    }
    const auto& prior = config.priors[idx(b)];
    if (!(prior.shape > 1.0) || !(prior.scale > 0.0) || !std::isfinite(prior.shape) ||
        !std::isfinite(prior.scale)) {
      fail(name + ".prior requires shape > 1 and scale > 0");
    }
  }
  try {
    config.pricing.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (config.cohort_size == 0) {
    fail("simulation.cohort_size must be >= 1");
  }
  if (config.replications == 0) {
    fail("simulation.replications must be >= 1");
  }
}

risk::RiskPolicy effective_policy_l(const ScenarioConfig& config) {
  risk::RiskPolicy policy = config.policies[idx(Bank::L)];
  if (config.subsidy_mode == SubsidyMode::AdaptiveVar) {
    policy.metric = risk::RiskMetric::VaR;
  } else if (config.subsidy_mode == SubsidyMode::AdaptiveEs) {
    policy.metric = risk::RiskMetric::ES;
  }
  return policy;
}

market::MarketState initial_state(const ScenarioConfig& config) {
  market::MarketState state;
  state.groups = config.groups;
  state.policies = config.policies;
  state.policies[idx(Bank::L)] = effective_policy_l(config);
  state.pricing = config.pricing;
  state.pricing.premium = config.pricing.nu_max;
  state.cohort_size = config.cohort_size;
  state.options.w_variance = config.w_variance;
  for (const Bank b : {Bank::L, Bank::H}) {
    for (const Group g : {Group::W, Group::B}) {
      state.beliefs[idx(b)][idx(g)] =
          beliefs::prior_from_credit_file(config.priors[idx(b)], config.groups[idx(g)].credit_file);
    }
  }
  return state;
}

double l_pooled_threshold(const ScenarioConfig& config) {
  const auto state = initial_state(config);
  return risk::pooled_gate_threshold(state.policies[idx(Bank::L)], config.groups[0].mean,
                                     config.groups[1].mean, market::gate_sigma_w(state, Bank::L),
                                     0.0);
}

std::vector<AssumptionCheck> check_trap_assumptions(const ScenarioConfig& config) {
  const auto state = initial_state(config);
  const auto& w = config.groups[idx(Group::W)];
  const auto& b = config.groups[idx(Group::B)];
  const auto& pol_l = state.policies[idx(Bank::L)];
  const auto& pol_h = state.policies[idx(Bank::H)];
  const double l_uni = unilateral_gate_threshold(pol_l, b.mean, 0.0);
  const double l_pool = l_pooled_threshold(config);
  const double h_uni = unilateral_gate_threshold(pol_h, b.mean, config.pricing.nu_max);
  const double bl0 = market::believed_variance(state, Bank::L, Group::B);
  const double bh0 = market::believed_variance(state, Bank::H, Group::B);

  std::vector<AssumptionCheck> out;
  out.push_back({"A1 equal expected creditworthiness", w.mean == b.mean && w.mean > 0.0,
                 "mu_W=" + fmt_num(w.mean) + " mu_B=" + fmt_num(b.mean)});
  out.push_back({"A2 differential information",
                 b.credit_file.completeness < w.credit_file.completeness,
                 "p_B=" + fmt_num(b.credit_file.completeness) +
                     " p_W=" + fmt_num(w.credit_file.completeness)});
  const double a3_bound = std::min(l_uni, l_pool);
  out.push_back({"A3 both groups creditworthy",
                 w.true_variance <= b.true_variance && b.true_variance < a3_bound,
                 "sigma2_W=" + fmt_num(w.true_variance) + " sigma2_B=" + fmt_num(b.true_variance) +
                     " bound=min(L_uni=" + fmt_num(l_uni) + ", L_pool=" + fmt_num(l_pool) + ")"});
  out.push_back({"A4 L prior for B above its threshold", bl0 > l_pool,
                 "sigma2_BL0=" + fmt_num(bl0) + " L_pool=" + fmt_num(l_pool)});
  out.push_back({"A5 H prior for B below its threshold", bh0 <= h_uni,
                 "sigma2_BH0=" + fmt_num(bh0) + " H_uni=" + fmt_num(h_uni)});
  return out;
}

void require_trap_assumptions(const ScenarioConfig& config) {
  for (const auto& check : check_trap_assumptions(config)) {
    if (!check.holds) {
      throw ScenarioError("trap assumption violated: " + check.name + " (" + check.detail + ")");
    }
  }
}

GuaranteePolicy GuaranteePolicy::optimal() {
  return {[](const GuaranteeContext& ctx) { return ctx.optimal_subsidy; }, nullptr};
}

GuaranteePolicy GuaranteePolicy::optimal_plus(double offset) {
  return {[offset](const GuaranteeContext& ctx) { return ctx.optimal_subsidy + offset; },
          nullptr};
}

GuaranteePolicy GuaranteePolicy::constant(double amount) {
  return {[amount](const GuaranteeContext&) { return amount; }, nullptr};
}

namespace {

enum class Rule { None, Optimal, Guarantee };

TrajectoryRecord simulate(const ScenarioConfig& config, Rule rule, const GuaranteePolicy* guarantee,
                          std::uint64_t seed, std::uint64_t stream_id) {
  validate_structure(config);
  market::MarketState state = initial_state(config);
  stats::RandomStream rng(seed, stream_id);
  const auto& policy_l = state.policies[idx(Bank::L)];
  const double mu_w = config.groups[idx(Group::W)].mean;
  const double mu_b = config.groups[idx(Group::B)].mean;

  TrajectoryRecord record;
  record.threshold_l_pool = l_pooled_threshold(config);
  record.outcomes.reserve(config.horizon);

  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    GuaranteeContext ctx;
    ctx.t = t;
    ctx.sigma2_bl = market::believed_variance(state, Bank::L, Group::B);
    const double sigma_w = market::gate_sigma_w(state, Bank::L);
    ctx.optimal_subsidy =
        risk::optimal_subsidy(policy_l, mu_w, mu_b, sigma_w, std::sqrt(ctx.sigma2_bl));

    double offer = 0.0;
    if (rule == Rule::Optimal) {
      offer = ctx.optimal_subsidy;
    } else if (rule == Rule::Guarantee && ctx.optimal_subsidy > 0.0) {
      const double g = guarantee->schedule(ctx);
      const double pooled_sd =
          risk::combine_stdevs(policy_l.aggregation, sigma_w, std::sqrt(ctx.sigma2_bl));
      const bool ok = g >= 0.0 && (guarantee->feasible
                                       ? guarantee->feasible(ctx, g)
                                       : risk::var_gate(policy_l, mu_w + mu_b, pooled_sd, g));
      if (!ok) {
        throw GuaranteeError(t, "guarantee infeasible in period " + std::to_string(t) +
                                    ": G=" + fmt_num(g) +
                                    " required=" + fmt_num(ctx.optimal_subsidy));
      }
      offer = g;
    }
    record.outcomes.push_back(market::run_period(state, offer, rng));
    record.total_subsidy += record.outcomes.back().subsidy_paid;
  }

  record.terminal_sigma2_bl = market::believed_variance(state, Bank::L, Group::B);
  record.terminal_sigma2_bh = market::believed_variance(state, Bank::H, Group::B);

  // tau: first period after the last one in which L still needed support.
  const auto& outs = record.outcomes;
  const auto last_needed = std::find_if(outs.rbegin(), outs.rend(),
                                        [](const auto& o) { return o.l_needs_support; });
  if (last_needed == outs.rend()) {
    if (!outs.empty()) {
      record.escape_time = 1;
    }
  } else if (last_needed != outs.rbegin()) {
    record.escape_time = last_needed->t + 1;
  }
  bool cleared = false;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (!outs[i].l_needs_support) {
      cleared = true;
    } else if (cleared && i > 0 && !outs[i - 1].l_needs_support) {
      ++record.recross_count;
    }
  }
  return record;
}

}  // namespace

TrajectoryRecord run_baseline(const ScenarioConfig& config, std::uint64_t seed,
                              std::uint64_t stream_id) {
  validate_structure(config);
  if (config.validate_assumptions) {
    require_trap_assumptions(config);
  }
  ScenarioConfig base = config;
  base.subsidy_mode = SubsidyMode::None;
  return simulate(base, Rule::None, nullptr, seed, stream_id);
}

TrajectoryRecord run_adaptive_subsidy(const ScenarioConfig& config, std::uint64_t seed,
                                      std::uint64_t stream_id) {
  if (config.subsidy_mode != SubsidyMode::AdaptiveVar &&
      config.subsidy_mode != SubsidyMode::AdaptiveEs) {
    throw std::invalid_argument("run_adaptive_subsidy: subsidy mode must be adaptive_var or "
                                "adaptive_es");
  }
  return simulate(config, Rule::Optimal, nullptr, seed, stream_id);
}

TrajectoryRecord run_with_guarantee(const ScenarioConfig& config, const GuaranteePolicy& policy,
                                    std::uint64_t seed, std::uint64_t stream_id) {
  if (!policy.schedule) {
    throw std::invalid_argument("run_with_guarantee: empty schedule");
  }
  return simulate(config, Rule::Guarantee, &policy, seed, stream_id);
}

TrajectoryRecord run_scenario(const ScenarioConfig& config, std::uint64_t seed,
                              std::uint64_t stream_id, const GuaranteePolicy* guarantee) {
  switch (config.subsidy_mode) {
    case SubsidyMode::None:
      return run_baseline(config, seed, stream_id);
    case SubsidyMode::AdaptiveVar:
    case SubsidyMode::AdaptiveEs:
      return run_adaptive_subsidy(config, seed, stream_id);
    case SubsidyMode::CustomGuarantee:
      break;
  }
  if (guarantee != nullptr) {
    return run_with_guarantee(config, *guarantee, seed, stream_id);
  }
  return run_with_guarantee(config, GuaranteePolicy::optimal(), seed, stream_id);
}

bool detect_trap(const TrajectoryRecord& trajectory) {
  const auto& outs = trajectory.outcomes;
  if (outs.empty()) {
    return true;
  }
  const double first = outs.front().sigma2_bl;
  return std::all_of(outs.begin(), outs.end(),
                     [&](const auto& o) {
                       return !o.approvals(Group::B, Bank::L) && o.sigma2_bl == first;
                     }) &&
         trajectory.terminal_sigma2_bl == first;
}

ReplicationSummary summarize(const TrajectoryRecord& trajectory) {
  ReplicationSummary s;
  s.escape_time = trajectory.escape_time;
  s.recross_count = trajectory.recross_count;
  s.total_subsidy = trajectory.total_subsidy;
  s.terminal_sigma2_bl = trajectory.terminal_sigma2_bl;
  s.trap = detect_trap(trajectory);
  const auto& outs = trajectory.outcomes;
  if (outs.empty()) {
    return s;
  }
  s.initial_sigma2_bl = outs.front().sigma2_bl;
  const std::uint64_t tau = trajectory.escape_time.value_or(outs.size() + 1);
  double pre = 0.0;
  double post = 0.0;
  std::uint64_t withdrawn = 0;
  for (const auto& o : outs) {
    const bool b_at_h = o.acceptances[idx(Group::B)].representative == market::Choice::H;
    const double paid = b_at_h ? o.premium : 0.0;
    if (o.t < tau) {
      pre += paid;
      ++s.periods_pre;
    } else {
      post += paid;
      ++s.periods_post;
    }
    withdrawn += o.approvals(Group::B, Bank::H) ? 0 : 1;
  }
  s.mean_premium_pre = s.periods_pre ? pre / static_cast<double>(s.periods_pre) : 0.0;
  s.mean_premium_post = s.periods_post ? post / static_cast<double>(s.periods_post) : 0.0;
  s.h_withdrawal_rate = static_cast<double>(withdrawn) / static_cast<double>(outs.size());
  return s;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("SUBPRIME_SIM_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) {
      return static_cast<unsigned>(n);
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

MonteCarloReport monte_carlo(const ScenarioConfig& config, unsigned threads,
                             const GuaranteePolicy* guarantee) {
  validate_structure(config);
  if (config.subsidy_mode == SubsidyMode::None && config.validate_assumptions) {
    require_trap_assumptions(config);
  }
  const std::uint64_t reps = config.replications;
  std::vector<ReplicationSummary> results(reps);
  std::vector<std::exception_ptr> errors(reps);

  if (threads == 0) {
    threads = default_thread_count();
  }
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, reps));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t r = next++; r < reps; r = next++) {
      try {
        results[r] = summarize(run_scenario(config, config.base_seed, r, guarantee));
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }

  MonteCarloReport report;
  report.replications = reps;
  std::vector<std::uint64_t> checkpoints = config.checkpoints;
  if (checkpoints.empty()) {
    for (const std::uint64_t h : {config.horizon / 10, config.horizon / 4, config.horizon / 2,
                                  config.horizon}) {
      if (h > 0) {
        checkpoints.push_back(h);
      }
    }
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  const double n = static_cast<double>(reps);
  std::vector<double> taus;
  double pre_sum = 0.0;
  std::uint64_t pre_count = 0;
  double post_sum = 0.0;
  std::uint64_t post_count = 0;
  std::uint64_t traps = 0;
  for (const auto& s : results) {
    if (s.escape_time) {
      taus.push_back(static_cast<double>(*s.escape_time));
    }
    report.mean_total_subsidy += s.total_subsidy;
    report.h_withdrawal_frequency += s.h_withdrawal_rate;
    report.mean_initial_sigma2_bl += s.initial_sigma2_bl;
    report.mean_terminal_sigma2_bl += s.terminal_sigma2_bl;
    traps += s.trap ? 1 : 0;
    if (s.periods_pre > 0) {
      pre_sum += s.mean_premium_pre;
      ++pre_count;
    }
    if (s.periods_post > 0) {
      post_sum += s.mean_premium_post;
      ++post_count;
    }
  }
  report.mean_total_subsidy /= n;
  report.h_withdrawal_frequency /= n;
  report.mean_initial_sigma2_bl /= n;
  report.mean_terminal_sigma2_bl /= n;
  report.trap_fraction = static_cast<double>(traps) / n;
  report.mean_premium_pre = pre_count ? pre_sum / static_cast<double>(pre_count) : 0.0;
  report.mean_premium_post = post_count ? post_sum / static_cast<double>(post_count) : 0.0;
  report.escape_probability = static_cast<double>(taus.size()) / n;
  for (const std::uint64_t h : checkpoints) {
    const auto hits = std::count_if(results.begin(), results.end(), [h](const auto& s) {
      return s.escape_time && *s.escape_time <= h;
    });
    report.escape_probability_by_horizon.emplace_back(h, static_cast<double>(hits) / n);
  }
  if (!taus.empty()) {
    double sum = 0.0;
    for (const double t : taus) {
      sum += t;
    }
    report.mean_tau = sum / static_cast<double>(taus.size());
    std::vector<double> sorted = taus;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    report.median_tau = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }
  report.per_replication = std::move(results);
  return report;
}

}  // namespace subprime::engine
