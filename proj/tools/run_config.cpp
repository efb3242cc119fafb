#include "run_config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace dofde::cli {

namespace {

const char* kKeys[] = {"scenario", "kernel", "scheme", "n",     "gamma",     "t",
                       "grid",     "tol",    "precision", "m",  "radius",    "seed",
                       "cache",    "out",    "snapshots", "tolerances", "certify"};

bool known_key(const std::string& k) {
  for (const char* a : kKeys)
    if (k == a) return true;
  return false;
}

template <typename T>
std::vector<T> scalar_or_array(const nlohmann::json& v, const char* key) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<T>());
  } else {
    out.push_back(v.get<T>());
  }
  if (out.empty()) throw ConfigError(std::string("config key '") + key + "' is an empty list");
  return out;
}

}  // namespace

void RunConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  apply_json(j);
}

void RunConfig::apply_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, val] : j.items())
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    if (j.contains("scenario")) scenario = j["scenario"].get<std::string>();
    if (j.contains("kernel")) kernels = scalar_or_array<std::string>(j["kernel"], "kernel");
    if (j.contains("scheme")) schemes = scalar_or_array<std::string>(j["scheme"], "scheme");
    if (j.contains("n")) ns = scalar_or_array<int>(j["n"], "n");
    if (j.contains("gamma")) gammas = scalar_or_array<double>(j["gamma"], "gamma");
    if (j.contains("t")) horizon = j["t"].get<double>();
    if (j.contains("grid")) grid = j["grid"].get<int>();
    if (j.contains("tol")) tol = j["tol"].get<double>();
    if (j.contains("precision")) precision = j["precision"].get<int>();
    if (j.contains("m")) fixed_terms = j["m"].get<int>();
    if (j.contains("radius")) radius = j["radius"].get<double>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("cache")) cache = j["cache"].get<std::string>();
    if (j.contains("out")) out = j["out"].get<std::string>();
    if (j.contains("snapshots")) snapshots = scalar_or_array<double>(j["snapshots"], "snapshots");
    if (j.contains("tolerances"))
      tolerances = scalar_or_array<double>(j["tolerances"], "tolerances");
    if (j.contains("certify")) certify = j["certify"].get<bool>() ? 1 : 0;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
}

std::string RunConfig::resolved_cache() const {
  if (!cache.empty()) return cache;
  if (const char* env = std::getenv("DOFDE_CACHE_DIR"); env && *env) return env;
  return "kernel-cache";
}

std::vector<double> RunConfig::resolved_snapshots(double T) const {
  if (!snapshots.empty()) return snapshots;
  std::vector<double> def;
  for (int k = 1; k <= static_cast<int>(std::floor(T + 1e-12)); ++k) def.push_back(k);
  if (def.empty()) def.push_back(T);
  return def;
}

nlohmann::ordered_json RunConfig::resolved(const std::string& command) const {
  nlohmann::ordered_json c;
  c["command"] = command;
  c["library_version"] = DOFDE_VERSION;
  nlohmann::ordered_json j;
  if (!scenario.empty()) j["scenario"] = scenario;
  if (!kernels.empty()) j["kernel"] = kernels;
  if (!schemes.empty()) j["scheme"] = schemes;
  if (!ns.empty()) j["n"] = ns;
  j["gamma"] = gammas.empty() ? nlohmann::ordered_json(1.0) : nlohmann::ordered_json(gammas);
  if (horizon > 0.0) j["t"] = horizon;
  j["grid"] = grid;
  j["tol"] = tol;
  j["precision"] = precision;
  if (fixed_terms >= 0) j["m"] = fixed_terms;
  j["radius"] = radius;
  j["seed"] = seed;
  j["cache"] = resolved_cache();
  j["out"] = out;
  if (!snapshots.empty()) j["snapshots"] = snapshots;
  if (!tolerances.empty()) j["tolerances"] = tolerances;
  if (certify >= 0) j["certify"] = certify != 0;
  c["config"] = std::move(j);
  return c;
}

void write_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + tmp + "'");
    f << text;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move '" + tmp + "' to '" + path + "'");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace dofde::cli
