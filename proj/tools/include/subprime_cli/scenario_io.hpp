#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "subprime/engine.hpp"

namespace subprime::cli {

/// Malformed scenario document. The message carries the offending key path
/// or the parser's line/column.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  engine::ScenarioConfig config;
  /// Schedule used when subsidy mode is custom_guarantee.
  engine::GuaranteePolicy guarantee = engine::GuaranteePolicy::optimal();
  nlohmann::json guarantee_spec = nlohmann::json::object();
};

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Build a scenario from its JSON document. `source` prefixes error messages.
Scenario parse_scenario(const nlohmann::json& doc, std::string_view source = "scenario");

Scenario load_scenario(const std::filesystem::path& path);

/// Resolved configuration as JSON, in the scenario file layout.
nlohmann::json to_json(const engine::ScenarioConfig& config, const nlohmann::json& guarantee_spec);

engine::SubsidyMode parse_mode(std::string_view text);
risk::Aggregation parse_aggregation(std::string_view text);

/// Assign `value` at a dotted key path ("banks.L.alpha"), which must exist.
void set_by_path(nlohmann::json& doc, std::string_view path, const nlohmann::json& value);

}  // namespace subprime::cli
