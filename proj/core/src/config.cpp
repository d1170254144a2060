#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "impdde/error.hpp"
#include "impdde/model.hpp"
#include "json.hpp"

namespace impdde {

namespace {

using nlohmann::json;

expr::Expression expression_field(const json& obj, const char* key, const std::string& path, expr::Context ctx,
                                  const char* fallback) {
  const std::string where = path.empty() ? key : path + "." + key;
  std::string source;
  if (!obj.contains(key)) {
    if (fallback == nullptr) throw ConfigError("missing required field '" + where + "'");
    source = fallback;
  } else if (obj[key].is_string()) {
    source = obj[key].get<std::string>();
  } else if (obj[key].is_number()) {
    return expr::Expression::constant(obj[key].get<double>());
  } else {
    throw ConfigError("'" + where + "' must be an expression string or a number");
  }
  try {
    return expr::parse(source, ctx);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

double number_field(const json& obj, const char* key, const std::string& path, std::optional<double> fallback) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.contains(key)) {
    if (!fallback) throw ConfigError("missing required field '" + where + "'");
    return *fallback;
  }
  if (!obj[key].is_number()) throw ConfigError("'" + where + "' must be a number");
  return obj[key].get<double>();
}

std::vector<double> number_array(const json& obj, const char* key, const std::string& path) {
  const std::string where = path + "." + key;
  if (!obj.contains(key) || !obj[key].is_array()) throw ConfigError("'" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError("'" + where + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ImpulseSchedule parse_schedule(const json& j) {
  if (!j.is_object()) throw ConfigError("'impulses' must be an object");
  const double t0 = number_field(j, "t0", "impulses", 0.0);
  if (!j.contains("period_count") || !j["period_count"].is_number_integer()) {
    throw ConfigError("'impulses.period_count' must be a positive integer");
  }
  const auto count = j["period_count"].get<long long>();
  if (count < 1) throw ConfigError("'impulses.period_count' must be a positive integer");
  const double length = number_field(j, "period_length", "impulses", std::nullopt);
  auto offsets = number_array(j, "offsets", "impulses");
  auto gamma = number_array(j, "gamma", "impulses");
  auto delta = number_array(j, "delta", "impulses");
  if (static_cast<long long>(offsets.size()) != count) {
    throw ConfigError("'impulses.offsets' must have period_count entries");
  }
  return ImpulseSchedule(t0, length, std::move(offsets), std::move(gamma), std::move(delta));
}

}  // namespace

ModelSpec load_model(std::string_view json_text, const BoundOptions& options) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");

  static const char* const known_top[] = {"a", "T", "terms", "impulses", "declared_bounds", "history", "name"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(std::begin(known_top), std::end(known_top), key) == std::end(known_top)) {
      throw ConfigError("unknown top-level key '" + key + "'");
    }
  }

  ModelSpec model;
  model.a = expression_field(doc, "a", "", expr::Context::time, nullptr);
  model.T = number_field(doc, "T", "", std::nullopt);

  if (doc.contains("terms")) {
    if (!doc["terms"].is_array()) throw ConfigError("'terms' must be an array");
    std::size_t i = 0;
    for (const auto& jt : doc["terms"]) {
      const std::string path = "terms[" + std::to_string(i++) + "]";
      if (!jt.is_object()) throw ConfigError("'" + path + "' must be an object");
      DelayTerm term;
      term.b = expression_field(jt, "b", path, expr::Context::time, "0");
      term.alpha = number_field(jt, "alpha", path, 1.0);
      term.tau = expression_field(jt, "tau", path, expr::Context::time, "0");
      term.c = expression_field(jt, "c", path, expr::Context::time, "0");
      term.beta = number_field(jt, "beta", path, 1.0);
      const std::string uniform = "1/" + [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", model.T);
        return std::string(buf);
      }();
      term.v = expression_field(jt, "v", path, expr::Context::kernel, uniform.c_str());
      term.harvest = expression_field(jt, "harvest", path, expr::Context::time_state, "0");
      term.harvest_lipschitz = number_field(jt, "harvest_lipschitz", path, term.harvest.is_zero() ? 0.0 : -1.0);
      if (term.harvest_lipschitz < 0.0) throw ConfigError("'" + path + ".harvest_lipschitz' is required with harvest");
      term.sigma = expression_field(jt, "sigma", path, expr::Context::time, "0");
      model.terms.push_back(std::move(term));
    }
  }

  if (doc.contains("impulses")) model.schedule = parse_schedule(doc["impulses"]);

  if (doc.contains("declared_bounds")) {
    const json& jb = doc["declared_bounds"];
    if (!jb.is_object()) throw ConfigError("'declared_bounds' must be an object");
    for (const auto& [name, v] : jb.items()) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError("declared_bounds." + name + " must be [inf, sup]");
      }
      model.declared_bounds[name] = Interval{v[0].get<double>(), v[1].get<double>()};
    }
  }

  if (doc.contains("history")) {
    const json& jh = doc["history"];
    if (!jh.is_object()) throw ConfigError("'history' must be an object");
    const double alpha = number_field(jh, "alpha", "history", 0.0);
    const auto xi = expression_field(jh, "xi", "history", expr::Context::kernel, nullptr);
    model.history = InitialHistory::from_expression(xi, alpha);
  }

  return finalize_model(std::move(model), options);
}

ModelSpec load_model_file(const std::filesystem::path& path, const BoundOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), options);
}

}  // namespace impdde
