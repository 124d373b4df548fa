#pragma once

// Vectorized density operators: a CanonicalTNState over the doubled physical
// space, index p = i * d + i' per mode and pair charges (ket, bra).

#include <iosfwd>
#include <vector>

#include "tnbs/oracle.hpp"
#include "tnbs/state.hpp"

namespace tnbs {

/// Single-mode squeezed vacuum truncated at n_max, after loss at survival
/// probability `mu`; (n_max + 1) x (n_max + 1).
Matrix lossy_squeezed_density(double r, double mu, int n_max);

/// Lossy squeezed vacuum on the first N of M modes, vacuum elsewhere; ket and
/// bra photon totals are each capped at d - 1.
CanonicalTNState init_lossy_squeezed(double r, double mu, int N, int M, int n_max, int d);

/// Product of arbitrary single-mode density matrices (each d x d).
CanonicalTNState init_product_density(const std::vector<Matrix>& sites, int cap);

/// Vectorization of a pure state's projector.
CanonicalTNState vectorize_pure(const CanonicalTNState& pure);

TruncationReport apply_gate_mpo(CanonicalTNState& state, const FockGate& doubled_gate, int site, std::size_t chi,
                                int fragment = 1);

double trace_of(const CanonicalTNState& state);

double mpo_entropy_at_cut(const CanonicalTNState& state, int l);

/// Dense operator for small instances.
DenseDensity to_dense_operator(const CanonicalTNState& state);

struct LayerRecord {
  int layer = 0;
  int cut = 0;
  double ee_bits = 0.0;
  double trace_error = 0.0;
  std::size_t max_bond = 0;
  double seconds = 0.0;
};

struct EntropyTrace {
  std::vector<LayerRecord> records;
  std::size_t max_index = 0;  // record holding the largest EE
  bool unreliable = false;     // trace error exceeded the budget
  bool stopped_on_plateau = false;

  double max_ee() const { return records.empty() ? 0.0 : records[max_index].ee_bits; }
  double final_trace_error() const { return records.empty() ? 0.0 : records.back().trace_error; }
};

/// CSV with header layer,cut,ee_bits,trace_error,max_bond,seconds. Times
/// are written as 0 unless `timing` is set, keeping repeated runs
/// byte-identical.
void write_trace_csv(std::ostream& os, const EntropyTrace& trace, bool timing = false);

}  // namespace tnbs
