#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dgdtrack/experiment.hpp"

namespace dgdtrack {

/// Malformed or unknown configuration input. `where` names the JSON line or
/// key at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Experiment configuration plus the optional inputs of the `bounds` command.
struct RunConfig {
  ExperimentConfig experiment;
  std::optional<double> lambda2;    // explicit spectrum instead of a generated graph
  std::optional<double> lambdaN;
  std::optional<double> init_dist;  // defaults to the C sqrt(N kappa) bound in `bounds`
};

/// Parses JSON text; syntax errors report the line number.
nlohmann::json parse_json_document(std::string_view text);

/// Applies "key=value" (dotted keys address nested objects, e.g.
/// "scheme.gamma=0.7"). The value is read as JSON when it parses, otherwise
/// as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Strict conversion: unknown keys, wrong types and out-of-range values are
/// ConfigErrors. A top-level "manifest" object is ignored so manifests can be
/// fed back as configs.
RunConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const RunConfig& cfg);

/// Reads `path`, applies `overrides` in order and converts.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

nlohmann::json scheme_to_json(const WeightScheme& scheme);
WeightScheme scheme_from_json(const nlohmann::json& j);

}  // namespace dgdtrack
