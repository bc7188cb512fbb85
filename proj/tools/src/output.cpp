#include "subprime_cli/output.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <openssl/evp.h>

namespace subprime::cli {

using market::Bank;
using market::Group;
using nlohmann::json;

const char* const kTrajectoryHeader =
    "t,A_WL,A_WH,A_BL,A_BH,S_W,S_B,nu,s,pi_W,pi_B,Pi_L,Pi_H,sigma2_BL,sigma2_BH,s_paid";
const char* const kBeliefsHeader = "t,sigma2_BL,sigma2_BH,threshold_L_pool,sigma2_B_true";
const char* const kSweepHeader =
    "parameter,value,valid,trap_assumptions,escape_probability,mean_tau,mean_total_subsidy,"
    "mean_pre_tau_premium,mean_initial_sigma2_BL,mean_terminal_sigma2_BL,message";

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& os, const engine::TrajectoryRecord& record) {
  os << kTrajectoryHeader << '\n';
  for (const auto& o : record.outcomes) {
    os << o.t << ',' << o.approvals(Group::W, Bank::L) << ',' << o.approvals(Group::W, Bank::H)
       << ',' << o.approvals(Group::B, Bank::L) << ',' << o.approvals(Group::B, Bank::H) << ','
       << market::to_string(o.acceptances[0].representative) << ','
       << market::to_string(o.acceptances[1].representative) << ',' << format_double(o.premium)
       << ',' << format_double(o.subsidy_offered) << ',' << format_double(o.payoff[0]) << ','
       << format_double(o.payoff[1]) << ',' << format_double(o.profit_l) << ','
       << format_double(o.profit_h) << ',' << format_double(o.sigma2_bl) << ','
       << format_double(o.sigma2_bh) << ',' << format_double(o.subsidy_paid) << '\n';
  }
}

void write_beliefs_csv(std::ostream& os, const engine::TrajectoryRecord& record,
                       double true_sigma2_b) {
  os << kBeliefsHeader << '\n';
  const auto threshold = format_double(record.threshold_l_pool);
  const auto truth = format_double(true_sigma2_b);
  for (const auto& o : record.outcomes) {
    os << o.t << ',' << format_double(o.sigma2_bl) << ',' << format_double(o.sigma2_bh) << ','
       << threshold << ',' << truth << '\n';
  }
}

json summary_json(const engine::TrajectoryRecord& record) {
  const auto s = engine::summarize(record);
  double premium_total = 0.0;
  for (const auto& o : record.outcomes) {
    if (o.acceptances[1].representative == market::Choice::H) {
      premium_total += o.premium;
    }
  }
  json j;
  j["periods"] = record.outcomes.size();
  j["escaped"] = record.escaped();
  j["tau"] = record.escape_time ? json(*record.escape_time) : json(nullptr);
  j["recross_count"] = record.recross_count;
  j["total_subsidy"] = record.total_subsidy;
  j["trap"] = s.trap;
  j["threshold_L_pool"] = record.threshold_l_pool;
  j["initial_sigma2_BL"] = s.initial_sigma2_bl;
  j["terminal_sigma2_BL"] = record.terminal_sigma2_bl;
  j["terminal_sigma2_BH"] = record.terminal_sigma2_bh;
  j["h_withdrawal_rate"] = s.h_withdrawal_rate;
  j["premiums_paid_by_B"] = {{"total", premium_total},
                             {"mean_per_period_pre_tau", s.mean_premium_pre},
                             {"mean_per_period_post_tau", s.mean_premium_post},
                             {"periods_pre_tau", s.periods_pre},
                             {"periods_post_tau", s.periods_post}};
  return j;
}

json report_json(const engine::MonteCarloReport& report) {
  json j;
  j["replications"] = report.replications;
  j["escape_probability"] = report.escape_probability;
  json by_h = json::array();
  for (const auto& [h, p] : report.escape_probability_by_horizon) {
    by_h.push_back({{"horizon", h}, {"probability", p}});
  }
  j["escape_probability_by_horizon"] = by_h;
  j["mean_tau"] = report.mean_tau ? json(*report.mean_tau) : json(nullptr);
  j["median_tau"] = report.median_tau ? json(*report.median_tau) : json(nullptr);
  j["mean_total_subsidy"] = report.mean_total_subsidy;
  j["mean_premium_pre_tau"] = report.mean_premium_pre;
  j["mean_premium_post_tau"] = report.mean_premium_post;
  j["h_withdrawal_frequency"] = report.h_withdrawal_frequency;
  j["mean_initial_sigma2_BL"] = report.mean_initial_sigma2_bl;
  j["mean_terminal_sigma2_BL"] = report.mean_terminal_sigma2_bl;
  j["trap_fraction"] = report.trap_fraction;
  return j;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path.string());
  }
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed for " + path.string());
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw std::runtime_error("cannot write " + path.string());
  }
  os << content;
  os.close();
  if (!os) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

}  // namespace subprime::cli
