#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace subprime::cli {

struct CommandOptions {
  std::filesystem::path scenario;
  std::optional<std::string> mode;  ///< baseline | adaptive-var | adaptive-es | guarantee
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replications;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> aggregation;  ///< sum-of-stds | independent
  std::filesystem::path out = ".";
  std::filesystem::path sweep;
  bool validate = true;
  /// Worker threads; 0 reads SUBPRIME_SIM_THREADS or uses the hardware count.
  unsigned threads = 0;
};

/// Print the five variance thresholds, the ordering verdict and the trap
/// assumption checks. Nonzero when validation fails and is not waived.
int cmd_thresholds(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Run one trajectory (stream 0) and write trajectory.csv, beliefs.csv,
/// summary.json and manifest.json into options.out. With more than one
/// replication the summary also carries the Monte Carlo aggregate.
int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Grid sweep of one scenario parameter; writes sweep.csv.
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace subprime::cli
