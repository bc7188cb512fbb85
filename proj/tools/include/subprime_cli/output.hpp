#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "subprime/engine.hpp"

namespace subprime::cli {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Column layout of trajectory.csv.
extern const char* const kTrajectoryHeader;
extern const char* const kBeliefsHeader;
extern const char* const kSweepHeader;

void write_trajectory_csv(std::ostream& os, const engine::TrajectoryRecord& record);
void write_beliefs_csv(std::ostream& os, const engine::TrajectoryRecord& record,
                       double true_sigma2_b);

nlohmann::json summary_json(const engine::TrajectoryRecord& record);
nlohmann::json report_json(const engine::MonteCarloReport& report);

/// Lowercase hex SHA-256 of a file's raw bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Write `content` to `path`, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace subprime::cli
