#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "geoage/error.hpp"
#include "geoage/experiment.hpp"

namespace geoage {

namespace {

void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

Inclusion parse_inclusion(const std::string& s) {
  if (s == "all") return Inclusion::all;
  if (s == "stable_only") return Inclusion::stable_only;
  throw ConfigError("inclusion must be 'all' or 'stable_only'");
}

std::string inclusion_name(Inclusion i) {
  return i == Inclusion::all ? "all" : "stable_only";
}

StoppingSetSpec parse_spec(const std::string& text) {
  try {
    return StoppingSetSpec::parse(text);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid stopping set: ") + e.what());
  }
}

const std::set<std::string> kFigures = {"figure3", "figure4", "figure5",
                                        "figure6", "figure7", "figure8"};

}  // namespace

std::uint64_t SimSection::resolved_warmup() const {
  return warmup ? *warmup : default_warmup(slots);
}

SystemParams ExperimentConfig::params() const {
  const double rho = noise_dbm ? db_to_linear(ptx_dbm - *noise_dbm)
                               : std::numeric_limits<double>::infinity();
  return SystemParams(lambda, r, alpha, db_to_linear(threshold_db), rho, xi);
}

Json ExperimentConfig::to_json() const {
  Json params{{"lambda", lambda},    {"r", r},
              {"alpha", alpha},      {"T_dB", threshold_db},
              {"P_tx_dBm", ptx_dbm}, {"xi", xi}};
  params["noise_dBm"] = noise_dbm ? Json(*noise_dbm) : Json(nullptr);
  Json methods_json = Json::array();
  for (const auto& m : methods) methods_json.push_back(m.label());
  Json sim_json{{"window", sim.window},
                {"wrap", to_string(sim.wrap)},
                {"slots", sim.slots},
                {"warmup", sim.resolved_warmup()},
                {"realizations", sim.realizations},
                {"seed", sim.seed},
                {"dominant", sim.dominant},
                {"guard", sim.guard},
                {"inclusion", inclusion_name(sim.inclusion)}};
  Json doc{{"params", params},
           {"spec", spec.label()},
           {"methods", methods_json},
           {"sim", sim_json}};
  if (!sweep.parameter.empty()) {
    doc["sweep"] = {{"parameter", sweep.parameter}, {"values", sweep.values}};
  }
  if (!figure.empty()) doc["figure"] = figure;
  return doc;
}

ExperimentConfig parse_config(const Json& doc) {
  reject_unknown(doc, {"params", "spec", "methods", "sim", "sweep", "figure",
                       "outputs"},
                 "config");
  ExperimentConfig cfg;
  if (doc.contains("params")) {
    const Json& p = doc["params"];
    reject_unknown(p, {"lambda", "r", "alpha", "T_dB", "P_tx_dBm",
                       "noise_dBm", "xi"},
                   "params");
    read(p, "lambda", cfg.lambda, "params");
    read(p, "r", cfg.r, "params");
    read(p, "alpha", cfg.alpha, "params");
    read(p, "T_dB", cfg.threshold_db, "params");
    read(p, "P_tx_dBm", cfg.ptx_dbm, "params");
    read(p, "xi", cfg.xi, "params");
    if (p.contains("noise_dBm")) {
      if (p["noise_dBm"].is_null()) {
        cfg.noise_dbm.reset();
      } else {
        double v = 0.0;
        read(p, "noise_dBm", v, "params");
        cfg.noise_dbm = v;
      }
    }
  }
  if (doc.contains("spec")) {
    std::string s;
    read(doc, "spec", s, "config");
    cfg.spec = parse_spec(s);
  }
  if (doc.contains("methods")) {
    std::vector<std::string> list;
    read(doc, "methods", list, "config");
    if (list.empty()) throw ConfigError("methods must not be empty");
    for (const auto& m : list) cfg.methods.push_back(parse_spec(m));
  } else {
    cfg.methods = {StoppingSetSpec::empty(), cfg.spec};
  }
  if (doc.contains("sim")) {
    const Json& s = doc["sim"];
    reject_unknown(s, {"window", "wrap", "slots", "warmup", "realizations",
                       "seed", "dominant", "guard", "inclusion"},
                   "sim");
    read(s, "window", cfg.sim.window, "sim");
    std::string wrap = to_string(cfg.sim.wrap);
    read(s, "wrap", wrap, "sim");
    try {
      cfg.sim.wrap = parse_boundary(wrap);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    read(s, "slots", cfg.sim.slots, "sim");
    if (s.contains("warmup") && !s["warmup"].is_null()) {
      std::uint64_t w = 0;
      read(s, "warmup", w, "sim");
      cfg.sim.warmup = w;
    }
    read(s, "realizations", cfg.sim.realizations, "sim");
    read(s, "seed", cfg.sim.seed, "sim");
    read(s, "dominant", cfg.sim.dominant, "sim");
    read(s, "guard", cfg.sim.guard, "sim");
    std::string inc = inclusion_name(cfg.sim.inclusion);
    read(s, "inclusion", inc, "sim");
    cfg.sim.inclusion = parse_inclusion(inc);
  }
  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    reject_unknown(s, {"parameter", "values"}, "sweep");
    read(s, "parameter", cfg.sweep.parameter, "sweep");
    read(s, "values", cfg.sweep.values, "sweep");
    if (cfg.sweep.parameter != "xi" && cfg.sweep.parameter != "lambda") {
      throw ConfigError("sweep.parameter must be 'xi' or 'lambda'");
    }
    if (cfg.sweep.values.empty()) {
      throw ConfigError("sweep.values must not be empty");
    }
  }
  if (doc.contains("figure")) {
    read(doc, "figure", cfg.figure, "config");
    if (!kFigures.count(cfg.figure)) {
      throw ConfigError("figure must be one of figure3 .. figure8");
    }
  }
  if (doc.contains("outputs")) {
    reject_unknown(doc["outputs"], {"directory"}, "outputs");
    read(doc["outputs"], "directory", cfg.output_dir, "outputs");
  }

  // Validate everything before any work starts.
  try {
    const SystemParams p = cfg.params();
    for (double v : cfg.sweep.values) {
      if (cfg.sweep.parameter == "xi") p.with_xi(v);
      if (cfg.sweep.parameter == "lambda") p.with_lambda(v);
    }
    SimConfig sc;
    sc.slots = cfg.sim.slots;
    sc.warmup = cfg.sim.resolved_warmup();
    sc.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.sim.window > 0.0) || !std::isfinite(cfg.sim.window)) {
    throw ConfigError("sim.window must be > 0");
  }
  if (cfg.sim.window < 4.0 * cfg.r) {
    throw ConfigError("sim.window must be at least 4 r");
  }
  if (cfg.sim.realizations < 1) {
    throw ConfigError("sim.realizations must be >= 1");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace geoage
