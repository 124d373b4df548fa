#pragma once

// Run configuration: flat key=value text plus overrides, defaults, and a
// canonical form used for hashing and manifests.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tnbs {

enum class Mode { mps, mpo, asymptotic, oracle_check, bond_search };

std::string to_string(Mode m);

struct SimulationConfig {
  Mode mode = Mode::mpo;
  int N = 2;
  int M = 0;    // 0: max(20, 4N)
  int d = 0;    // 0: smallest d with < 1% truncated total-photon probability
  int chi = 64;
  double r = 0.88;
  std::optional<double> mu;
  std::optional<double> beta;
  std::optional<double> gamma;
  int n_max = 8;
  int cut = 0;  // 0: M / 2
  std::uint64_t seed = 1;
  bool stop_on_plateau = false;
  double error_budget = 0.1;
  double target_error = 0.02;
  int chi_initial = 1;
  int chi_max = 4096;
  int refine_steps = 2;
  int fragment = 1;
  bool timing = false;
  std::string output;

  /// Survival probability implied by mu or (beta, gamma); 1 if neither.
  double survival() const;
};

/// Keys in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its text value; throws ParseError naming the key.
void set_config_value(SimulationConfig& cfg, const std::string& key, const std::string& value);

/// Parses key=value lines; blank lines and lines starting with '#' are
/// skipped. `overrides` are applied afterwards in order and win over the
/// text. Defaults are then resolved and everything is validated.
SimulationConfig parse_config(const std::string& text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Same parsing without resolving defaults; zero M, d and cut stay zero so
/// they can be resolved per sweep point.
SimulationConfig parse_config_unresolved(const std::string& text,
                                         const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Fills in M, d and cut and checks ranges.
void resolve(SimulationConfig& cfg);

/// Canonical key=value text of a resolved config (one key per line).
std::string canonical_text(const SimulationConfig& cfg);
std::uint64_t text_hash(const std::string& text);
/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const SimulationConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Output directory: `cfg.output`, else $TNBS_OUTPUT_DIR, else ".".
std::string output_dir(const SimulationConfig& cfg);

}  // namespace tnbs
