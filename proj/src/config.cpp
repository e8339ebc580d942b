#include "dgdtrack/config.hpp"

#include <algorithm>
#include <set>

#include "dgdtrack/errors.hpp"
#include "dgdtrack/io.hpp"

namespace dgdtrack {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "n_agents",       "dim",           "mu",          "L",               "eta",
      "E",              "scheme",        "C_max",       "sigma2",          "horizon",
      "n_runs",         "master_seed",   "measure_stride", "initial_radius", "growth_factor",
      "shared_topology", "homogeneous_agents", "allow_unstable_step", "lambda2", "lambdaN",
      "init_dist",      "manifest"};
  return keys;
}

template <class T>
T get_as(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError("key '" + key + "'", "expected a boolean");
    return v.get<bool>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError("key '" + key + "'", "expected a number");
    return v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("key '" + key + "'", "expected a non-negative integer");
    return v.get<std::uint64_t>();
  } else {
    if (!v.is_number_integer()) throw ConfigError("key '" + key + "'", "expected an integer");
    const auto raw = v.get<std::int64_t>();
    if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max())
      throw ConfigError("key '" + key + "'", "integer out of range");
    return static_cast<T>(raw);
  }
}

template <class T>
void read(const json& doc, const std::string& key, T& out) {
  if (doc.contains(key)) out = get_as<T>(doc, key);
}

}  // namespace

json parse_json_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("line " + std::to_string(line), e.what());
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "'", "expected key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + key + "'", "empty key segment");
    if (!node->is_object()) throw ConfigError("override '" + key + "'", "parent is not an object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  // Switching a scheme to uniform drops a stale gamma.
  if (key == "scheme.kind" && value == "uniform" && doc["scheme"].is_object()) doc["scheme"].erase("gamma");
}

json scheme_to_json(const WeightScheme& scheme) {
  if (scheme.is_discounted()) return {{"kind", "discounted"}, {"gamma", scheme.gamma()}};
  return {{"kind", "uniform"}};
}

WeightScheme scheme_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("key 'scheme'", "expected an object like {\"kind\":\"uniform\"}");
  for (const auto& [k, v] : j.items())
    if (k != "kind" && k != "gamma") throw ConfigError("key 'scheme." + k + "'", "unknown key");
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("key 'scheme.kind'", "missing or not a string");
  const std::string kind = j["kind"];
  if (kind == "uniform") {
    if (j.contains("gamma")) throw ConfigError("key 'scheme.gamma'", "only allowed for discounted weights");
    return WeightScheme::uniform();
  }
  if (kind == "discounted") {
    if (!j.contains("gamma") || !j["gamma"].is_number())
      throw ConfigError("key 'scheme.gamma'", "discounted weights need a numeric gamma");
    try {
      return WeightScheme::discounted(j["gamma"].get<double>());
    } catch (const ParameterError& e) {
      throw ConfigError("key 'scheme.gamma'", e.what());
    }
  }
  throw ConfigError("key 'scheme.kind'", "expected \"uniform\" or \"discounted\", got \"" + kind + "\"");
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("document", "top level must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (!known_keys().contains(k)) throw ConfigError("key '" + k + "'", "unknown configuration key");
  if (doc.contains("manifest") && !doc["manifest"].is_object())
    throw ConfigError("key 'manifest'", "expected an object");

  RunConfig rc;
  ExperimentConfig& c = rc.experiment;
  read(doc, "n_agents", c.n_agents);
  read(doc, "dim", c.dim);
  read(doc, "mu", c.mu);
  read(doc, "L", c.L);
  read(doc, "eta", c.eta);
  read(doc, "E", c.E);
  if (doc.contains("scheme")) c.scheme = scheme_from_json(doc["scheme"]);
  read(doc, "C_max", c.c_max);
  read(doc, "sigma2", c.sigma2);
  read(doc, "horizon", c.horizon);
  read(doc, "n_runs", c.n_runs);
  read(doc, "master_seed", c.master_seed);
  read(doc, "measure_stride", c.measure_stride);
  read(doc, "initial_radius", c.initial_radius);
  read(doc, "growth_factor", c.growth_factor);
  read(doc, "shared_topology", c.shared_topology);
  read(doc, "homogeneous_agents", c.homogeneous_agents);
  read(doc, "allow_unstable_step", c.allow_unstable_step);
  for (const char* key : {"lambda2", "lambdaN", "init_dist"}) {
    if (!doc.contains(key)) continue;
    const double v = get_as<double>(doc, key);
    if (std::string(key) == "lambda2") rc.lambda2 = v;
    else if (std::string(key) == "lambdaN") rc.lambdaN = v;
    else rc.init_dist = v;
  }
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("config", e.what());
  }
  return rc;
}

json config_to_json(const RunConfig& rc) {
  const ExperimentConfig& c = rc.experiment;
  json j{{"n_agents", c.n_agents},
         {"dim", c.dim},
         {"mu", c.mu},
         {"L", c.L},
         {"eta", c.eta},
         {"E", c.E},
         {"scheme", scheme_to_json(c.scheme)},
         {"C_max", c.c_max},
         {"sigma2", c.sigma2},
         {"horizon", c.horizon},
         {"n_runs", c.n_runs},
         {"master_seed", c.master_seed},
         {"measure_stride", c.measure_stride},
         {"initial_radius", c.initial_radius},
         {"growth_factor", c.growth_factor},
         {"shared_topology", c.shared_topology},
         {"homogeneous_agents", c.homogeneous_agents},
         {"allow_unstable_step", c.allow_unstable_step}};
  if (rc.lambda2) j["lambda2"] = *rc.lambda2;
  if (rc.lambdaN) j["lambdaN"] = *rc.lambdaN;
  if (rc.init_dist) j["init_dist"] = *rc.init_dist;
  return j;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(path.string(), e.what());
  }
  json doc = parse_json_document(text);
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc);
}

}  // namespace dgdtrack
