#include "subprime_cli/scenario_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace subprime::cli {

using nlohmann::json;

namespace {

std::string join(std::string_view parent, std::string_view key) {
  return parent.empty() ? std::string(key) : std::string(parent) + "." + std::string(key);
}

class Reader {
public:
  Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(std::string_view path, std::string_view msg) const {
    throw ParseError(source_ + ": key '" + std::string(path) + "': " + std::string(msg));
  }

  const json& object(const json& parent, std::string_view parent_path, std::string_view key) const {
    const auto path = join(parent_path, key);
    auto it = parent.find(key);
    if (it == parent.end()) {
      fail(path, "missing required object");
    }
    if (!it->is_object()) {
      fail(path, "expected an object");
    }
    return *it;
  }

  double number(const json& parent, std::string_view parent_path, std::string_view key) const {
    const auto path = join(parent_path, key);
    auto it = parent.find(key);
    if (it == parent.end()) {
      fail(path, "missing required number");
    }
    if (!it->is_number()) {
      fail(path, "expected a number");
    }
    return it->get<double>();
  }

  double number_or(const json& parent, std::string_view parent_path, std::string_view key,
                   double fallback) const {
    return parent.contains(key) ? number(parent, parent_path, key) : fallback;
  }

  std::uint64_t count_or(const json& parent, std::string_view parent_path, std::string_view key,
                         std::uint64_t fallback) const {
    auto it = parent.find(key);
    if (it == parent.end()) {
      return fallback;
    }
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
      fail(join(parent_path, key), "expected a non-negative integer");
    }
    return it->get<std::uint64_t>();
  }

  std::string string_or(const json& parent, std::string_view parent_path, std::string_view key,
                        std::string fallback) const {
    auto it = parent.find(key);
    if (it == parent.end()) {
      return fallback;
    }
    if (!it->is_string()) {
      fail(join(parent_path, key), "expected a string");
    }
    return it->get<std::string>();
  }

  bool bool_or(const json& parent, std::string_view parent_path, std::string_view key,
               bool fallback) const {
    auto it = parent.find(key);
    if (it == parent.end()) {
      return fallback;
    }
    if (!it->is_boolean()) {
      fail(join(parent_path, key), "expected true or false");
    }
    return it->get<bool>();
  }

private:
  std::string source_;
};

std::string normalize(std::string_view text) {
  std::string s(text);
  for (char& c : s) {
    if (c == '-') {
      c = '_';
    }
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

risk::RiskMetric parse_metric(std::string_view text) {
  const auto s = normalize(text);
  if (s == "var") {
    return risk::RiskMetric::VaR;
  }
  if (s == "es" || s == "cvar") {
    return risk::RiskMetric::ES;
  }
  throw std::invalid_argument("unknown risk metric '" + std::string(text) + "'");
}

}  // namespace

engine::SubsidyMode parse_mode(std::string_view text) {
  const auto s = normalize(text);
  if (s == "none" || s == "baseline") {
    return engine::SubsidyMode::None;
  }
  if (s == "adaptive_var") {
    return engine::SubsidyMode::AdaptiveVar;
  }
  if (s == "adaptive_es") {
    return engine::SubsidyMode::AdaptiveEs;
  }
  if (s == "guarantee" || s == "custom_guarantee") {
    return engine::SubsidyMode::CustomGuarantee;
  }
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

risk::Aggregation parse_aggregation(std::string_view text) {
  const auto s = normalize(text);
  if (s == "sum_of_stds") {
    return risk::Aggregation::SumOfStds;
  }
  if (s == "independent") {
    return risk::Aggregation::Independent;
  }
  throw std::invalid_argument("unknown aggregation '" + std::string(text) + "'");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path.string() + ": cannot open file");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Scenario parse_scenario(const json& doc, std::string_view source) {
  const Reader r(source);
  if (!doc.is_object()) {
    r.fail("", "scenario must be a JSON object");
  }
  Scenario sc;
  auto& cfg = sc.config;

  const json& groups = r.object(doc, "", "groups");
  for (const auto g : {market::Group::W, market::Group::B}) {
    const std::string key(market::to_string(g));
    const std::string path = "groups." + key;
    const json& node = r.object(groups, "groups", key);
    auto& profile = cfg.groups[market::idx(g)];
    profile.label = g;
    profile.mean = r.number(node, path, "mean");
    profile.true_variance = r.number(node, path, "variance");
    const json& file = r.object(node, path, "credit_file");
    const std::string fpath = path + ".credit_file";
    profile.credit_file.n = r.number(file, fpath, "n");
    profile.credit_file.completeness = r.number(file, fpath, "completeness");
    profile.credit_file.sample_variance = r.number_or(file, fpath, "sample_variance", 1.0);
  }

  const json& sim = doc.contains("simulation") ? r.object(doc, "", "simulation") : json::object();
  const auto aggregation_text = r.string_or(sim, "simulation", "aggregation", "sum_of_stds");
  risk::Aggregation aggregation{};
  try {
    aggregation = parse_aggregation(aggregation_text);
  } catch (const std::invalid_argument& e) {
    r.fail("simulation.aggregation", e.what());
  }

  const json& banks = r.object(doc, "", "banks");
  for (const auto b : {market::Bank::L, market::Bank::H}) {
    const std::string key(market::to_string(b));
    const std::string path = "banks." + key;
    const json& node = r.object(banks, "banks", key);
    auto& policy = cfg.policies[market::idx(b)];
    policy.rho = r.number(node, path, "rho");
    policy.alpha = r.number(node, path, "alpha");
    try {
      policy.metric = parse_metric(r.string_or(node, path, "metric", "VaR"));
    } catch (const std::invalid_argument& e) {
      r.fail(path + ".metric", e.what());
    }
    policy.aggregation = aggregation;
    const json& prior = r.object(node, path, "prior");
    cfg.priors[market::idx(b)] = {r.number(prior, path + ".prior", "shape"),
                                  r.number(prior, path + ".prior", "scale")};
  }

  const json& pricing = r.object(doc, "", "pricing");
  cfg.pricing.nu_max = r.number(pricing, "pricing", "nu_max");
  cfg.pricing.premium = cfg.pricing.nu_max;

  cfg.horizon = r.count_or(sim, "simulation", "horizon", cfg.horizon);
  cfg.replications = r.count_or(sim, "simulation", "replications", cfg.replications);
  cfg.base_seed = r.count_or(sim, "simulation", "seed", cfg.base_seed);
  const auto cohort = r.count_or(sim, "simulation", "cohort_size", 1);
  if (cohort == 0 || cohort > 1'000'000) {
    r.fail("simulation.cohort_size", "must lie in [1, 1000000]");
  }
  cfg.cohort_size = static_cast<std::uint32_t>(cohort);
  cfg.allow_unequal_means = r.bool_or(sim, "simulation", "allow_unequal_means", false);
  cfg.validate_assumptions = r.bool_or(sim, "simulation", "validate_assumptions", true);
  const auto w_var = normalize(r.string_or(sim, "simulation", "w_variance", "known"));
  if (w_var == "known") {
    cfg.w_variance = market::WVarianceSource::Known;
  } else if (w_var == "belief") {
    cfg.w_variance = market::WVarianceSource::Belief;
  } else {
    r.fail("simulation.w_variance", "expected \"known\" or \"belief\"");
  }
  if (auto it = sim.find("checkpoints"); it != sim.end()) {
    if (!it->is_array()) {
      r.fail("simulation.checkpoints", "expected an array of periods");
    }
    for (const auto& v : *it) {
      if (!v.is_number_unsigned()) {
        r.fail("simulation.checkpoints", "expected non-negative integers");
      }
      cfg.checkpoints.push_back(v.get<std::uint64_t>());
    }
  }

  const json& subsidy = doc.contains("subsidy") ? r.object(doc, "", "subsidy") : json::object();
  try {
    cfg.subsidy_mode = parse_mode(r.string_or(subsidy, "subsidy", "mode", "none"));
  } catch (const std::invalid_argument& e) {
    r.fail("subsidy.mode", e.what());
  }
  if (auto it = subsidy.find("guarantee"); it != subsidy.end()) {
    if (!it->is_object()) {
      r.fail("subsidy.guarantee", "expected an object");
    }
    const auto type = normalize(r.string_or(*it, "subsidy.guarantee", "type", "optimal"));
    const double amount = r.number_or(*it, "subsidy.guarantee", "amount", 0.0);
    if (type == "optimal") {
      sc.guarantee = engine::GuaranteePolicy::optimal();
    } else if (type == "optimal_plus") {
      sc.guarantee = engine::GuaranteePolicy::optimal_plus(amount);
    } else if (type == "constant") {
      sc.guarantee = engine::GuaranteePolicy::constant(amount);
    } else {
      r.fail("subsidy.guarantee.type", "expected optimal, optimal_plus or constant");
    }
    sc.guarantee_spec = {{"type", type}, {"amount", amount}};
  } else {
    sc.guarantee_spec = {{"type", "optimal"}, {"amount", 0.0}};
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_json_file(path), path.string());
}

json to_json(const engine::ScenarioConfig& cfg, const json& guarantee_spec) {
  json doc;
  for (const auto g : {market::Group::W, market::Group::B}) {
    const auto& p = cfg.groups[market::idx(g)];
    doc["groups"][std::string(market::to_string(g))] = {
        {"mean", p.mean},
        {"variance", p.true_variance},
        {"credit_file",
         {{"n", p.credit_file.n},
          {"completeness", p.credit_file.completeness},
          {"sample_variance", p.credit_file.sample_variance}}}};
  }
  for (const auto b : {market::Bank::L, market::Bank::H}) {
    const auto& pol = cfg.policies[market::idx(b)];
    const auto& prior = cfg.priors[market::idx(b)];
    doc["banks"][std::string(market::to_string(b))] = {
        {"rho", pol.rho},
        {"alpha", pol.alpha},
        {"metric", std::string(risk::to_string(pol.metric))},
        {"prior", {{"shape", prior.shape}, {"scale", prior.scale}}}};
  }
  doc["pricing"] = {{"nu_max", cfg.pricing.nu_max}};
  doc["simulation"] = {
      {"horizon", cfg.horizon},
      {"replications", cfg.replications},
      {"seed", cfg.base_seed},
      {"cohort_size", cfg.cohort_size},
      {"aggregation", std::string(risk::to_string(cfg.policies[0].aggregation))},
      {"allow_unequal_means", cfg.allow_unequal_means},
      {"validate_assumptions", cfg.validate_assumptions},
      {"w_variance", cfg.w_variance == market::WVarianceSource::Known ? "known" : "belief"},
      {"checkpoints", cfg.checkpoints}};
  doc["subsidy"] = {{"mode", std::string(engine::to_string(cfg.subsidy_mode))},
                    {"guarantee", guarantee_spec}};
  return doc;
}

void set_by_path(json& doc, std::string_view path, const json& value) {
  json* node = &doc;
  std::string_view rest = path;
  while (!rest.empty()) {
    const auto dot = rest.find('.');
    const std::string key(rest.substr(0, dot));
    if (!node->is_object() || !node->contains(key)) {
      throw ParseError("sweep: key '" + std::string(path) + "' not present in scenario");
    }
    node = &(*node)[key];
    rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
  }
  *node = value;
}

}  // namespace subprime::cli
