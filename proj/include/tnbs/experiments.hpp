#pragma once

// Orchestration of whole runs: circuit evolution with per-layer records,
// bond-dimension search, parameter sweeps, oracle checks, and the command
// layer that writes CSV files with their manifests.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tnbs/circuit.hpp"
#include "tnbs/config.hpp"
#include "tnbs/mpo.hpp"

namespace tnbs {

/// Runs the Haar mesh of `cfg` (or `layout` if given) layer by layer,
/// recording EE at the cut, 1 - Tr (1 - norm² in mps mode) and the largest
/// bond after each layer. `cfg` must be resolved.
EntropyTrace run_experiment(const SimulationConfig& cfg, const CircuitLayout* layout = nullptr);

/// Finite-M estimate for the same instance: single-mode entropies of the
/// occupied inputs at their bipartition angles, summed.
double finite_m_estimate(const SimulationConfig& cfg, const CircuitLayout& layout);

/// Asymptotic estimate N · S1(mu) for the configured loss.
double asymptotic_estimate(const SimulationConfig& cfg);

struct BondSearchResult {
  int chi_star = 0;
  int chi_doubling = 0;  // first doubling value meeting the target
  std::vector<std::pair<int, double>> table;  // every (chi, error) evaluated, in order
  std::size_t doubling_steps = 0;             // leading entries of `table` from the doubling phase
  bool capped = false;                        // chi_max reached without meeting the target
  bool monotone = true;                       // error strictly decreased along the doubling phase
};

/// Doubles chi from chi_initial until the full-depth error meets
/// target_error, then bisects between the last failing and first passing
/// values for refine_steps rounds.
BondSearchResult bond_search(const SimulationConfig& cfg);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepPoint {
  SimulationConfig config;
  std::vector<std::string> axis_values;
  double ee_bits = 0.0;
  double trace_error = 0.0;
  std::size_t max_bond = 0;
  std::string status = "ok";
};

/// Evaluates the grid over one or two axes with `jobs` workers. `base` is
/// unresolved so that M, d and cut follow each point. Points come back in
/// grid order (first axis slowest) whatever the scheduling; a failing point
/// records its error in `status`.
std::vector<SweepPoint> run_sweep(const SimulationConfig& base, const std::vector<SweepAxis>& axes, int jobs);
void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepPoint>& points);

struct OracleReport {
  double max_deviation = 0.0;  // entrywise, amplitudes or operator entries
  double entropy_deviation = 0.0;
  bool pass = false;
};

/// Compares the engine at full bond dimension against the dense oracle on
/// the configured instance (pure when mode = mps or there is no loss).
OracleReport oracle_check(const SimulationConfig& cfg, double tolerance = 1e-9);

struct CommandRequest {
  std::string command;  // run, sweep, bond-search, asymptotic, oracle-check
  SimulationConfig config;  // unresolved
  std::vector<SweepAxis> axes;
  std::vector<double> n_list;  // asymptotic only
  int jobs = 1;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  int exit_code = 0;
  std::vector<OutputFile> outputs;  // CSV files, manifest not included
  std::string summary;
};

/// Executes a command in memory. Throws ParseError for bad configs and
/// CapacityError for guard violations.
CommandResult execute(const CommandRequest& request);

/// Manifest sufficient to re-run `request` and check its outputs.
std::string manifest_json(const CommandRequest& request, const CommandResult& result, double wall_seconds);

/// Rebuilds the request from a manifest after checking the config hash;
/// throws ValidationError on a mismatch or malformed manifest.
CommandRequest request_from_manifest(const std::string& json_text);

/// Output hashes recorded in a manifest, by file name.
std::vector<std::pair<std::string, std::string>> manifest_output_hashes(const std::string& json_text);

/// Writes outputs and the manifest into `dir`; returns the paths written.
std::vector<std::string> write_outputs(const std::string& dir, const CommandRequest& request,
                                       const CommandResult& result, double wall_seconds);

}  // namespace tnbs
