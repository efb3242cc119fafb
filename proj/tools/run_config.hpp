#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace dofde::cli {

// Thrown for bad configs, flags, and scenario names; the driver maps it to
// exit code 2 (numerical failures map to 3).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat run configuration. All keys may come from a JSON file (--config) and
// the dedicated flags override file values.
struct RunConfig {
  std::string scenario;
  std::vector<std::string> kernels;            // "kernel": string or array
  std::vector<std::string> schemes;            // "scheme": string or array
  std::vector<int> ns;                         // "n": int or array
  std::vector<double> gammas;                  // "gamma": number or array
  double horizon = 0.0;                        // "t"; 0 keeps the scenario default
  int grid = 64;                               // "grid": cells per side
  double tol = 1e-13;                          // "tol": AAA fit tolerance
  int precision = 0;                           // "precision": bits, 0 = auto
  int fixed_terms = -1;                        // "m"; -1 keeps the scenario default
  double radius = 0.5;                         // "radius": bump half-width
  std::uint64_t seed = 1;                      // "seed"
  std::string cache;                           // "cache"; see resolved_cache()
  std::string out = "out";                     // "out"
  std::vector<double> snapshots;               // "snapshots": times, empty = default
  std::vector<double> tolerances;              // "tolerances": validate sweep
  int certify = -1;                            // "certify"; -1 = per-command default

  void apply_file(const std::string& path);
  void apply_json(const nlohmann::json& j);

  // Effective cache directory: explicit value, then $DOFDE_CACHE_DIR, then
  // "kernel-cache" next to the working directory.
  std::string resolved_cache() const;

  // Snapshot times after the default rule: integer times up to the horizon,
  // or just the final time for short runs.
  std::vector<double> resolved_snapshots(double T) const;

  // The resolved configuration echoed into every metadata record.
  nlohmann::ordered_json resolved(const std::string& command) const;
};

// Writes text to path atomically (temp file + rename).
void write_file(const std::string& path, const std::string& text);

// Decimal doubles with 17 significant digits round-trip exactly.
std::string fmt17(double v);

}  // namespace dofde::cli
