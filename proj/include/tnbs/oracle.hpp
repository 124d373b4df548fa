#pragma once

// Dense brute-force reference in the truncated multi-mode Fock space.
// Basis order is lexicographic in the occupation tuple, mode 0 slowest.

#include <cstdint>
#include <vector>

#include "tnbs/gates.hpp"

namespace tnbs {

/// Largest number of amplitudes (state) or matrix entries (density) the
/// oracle will enumerate.
inline constexpr double kDenseCapacity = 1e7;

/// Amplitudes over all tuples with each entry below `local` (d, or d² for a
/// vectorized operator).
struct DenseFockState {
  int modes = 0;
  int local = 0;
  Vector amplitudes;

  std::int64_t index_of(const std::vector<int>& tuple) const;
  std::vector<int> tuple_of(std::int64_t index) const;
};

struct DenseDensity {
  int modes = 0;
  int d = 0;
  Matrix rho;
};

DenseFockState dense_product(const std::vector<Vector>& sites);
DenseFockState dense_fock(const std::vector<int>& pattern, int d);
DenseDensity dense_product_density(const std::vector<Matrix>& sites);
DenseDensity dense_pure_density(const DenseFockState& state);

void dense_apply_gate(DenseFockState& state, const FockGate& gate, int site);
/// ρ → U ρ U† with U embedded at (site, site + 1).
void dense_apply_gate(DenseDensity& rho, const FockGate& gate, int site);
/// Kraus channel on one mode; the channel must cover the full local space.
void dense_apply_channel(DenseDensity& rho, const LossChannel& channel, int site);

/// Zeroes every component whose total photon number exceeds `cap`.
void project_total(DenseFockState& state, int cap);
void project_total(DenseDensity& rho, int cap);

/// |ρ⟩⟩ as a state with local index i * d + i' per mode.
DenseFockState vectorize(const DenseDensity& rho);
DenseDensity unvectorize(const DenseFockState& vec, int d);

double dense_norm_squared(const DenseFockState& state);
/// Schmidt entropy (bits) between modes [0, l) and [l, M), renormalized.
double dense_entropy(const DenseFockState& state, int l);
/// Entropy of the vectorized operator across the same cut.
double dense_entropy(const DenseDensity& rho, int l);

}  // namespace tnbs
