#pragma once

// Charge-labelled matrix product states in Vidal form, their gate updates,
// contractions and entanglement entropies. The same container holds a
// vectorized density operator when the physical space is doubled.

#include <cstddef>
#include <span>
#include <vector>

#include "tnbs/gates.hpp"
#include "tnbs/sym_tensor.hpp"

namespace tnbs {

/// Γ^{[0]} λ^{[1]} Γ^{[1]} … λ^{[M-1]} Γ^{[M-1]} with λ^{[0]} and λ^{[M]} on the
/// boundary bonds.
///
/// Bond k sits left of site k and its charge counts the photons on sites
/// k..M-1. The right boundary carries charge 0 and λ = 1. The left boundary
/// carries every total photon number the state contains, one bond index per
/// total, and the physical state is the plain sum over those indices. Totals
/// are capped at `cap`.
struct CanonicalTNState {
  PhysicalSpace phys{2, false};
  Charge cap;
  std::vector<ChargeBlockTensor> gammas;
  std::vector<BondChargeMap> bonds;
  std::vector<std::vector<double>> lambdas;

  int modes() const { return static_cast<int>(gammas.size()); }
  bool doubled() const { return phys.doubled(); }
  /// Largest interior bond; the boundary bonds are not counted.
  std::size_t max_bond() const;
  /// Throws ConsistencyError or DimensionError if the pieces do not fit.
  void check() const;
};

/// Capped product state ⊗_k φ_k in exact canonical form. Components whose
/// total exceeds `cap` are dropped without renormalizing.
CanonicalTNState init_product(PhysicalSpace phys, Charge cap, const std::vector<Vector>& sites);

/// Occupation pattern; d defaults to one more than the largest occupation.
CanonicalTNState init_fock(const std::vector<int>& pattern, int d = 0);

/// Squeezed vacuum on the first N of M modes, each truncated at n_max and
/// renormalized; the total photon number is capped at d - 1.
CanonicalTNState init_squeezed_product(double r, int N, int M, int n_max, int d);

/// Smallest d for which the total photon number of N squeezed modes (after
/// loss at survival `mu`) exceeds d - 1 with probability below `tail`,
/// raised to at least n_max + 1.
int choose_local_dim(double r, int N, int n_max, double mu = 1.0, double tail = 0.01);

struct TruncationReport {
  int site = 0;
  double discarded_weight = 0.0;
  /// Weight pushed out of the truncated Fock space by the gate.
  double leakage = 0.0;
  std::size_t bond_dim = 0;
};

struct LayerGate {
  int site = 0;
  const FockGate* gate = nullptr;
};

/// Two-site update on sites (site, site + 1). `fragment` > 1 pads every
/// charge segment to a multiple of it before contracting.
TruncationReport apply_gate(CanonicalTNState& state, const FockGate& gate, int site, std::size_t chi,
                            int fragment = 1);

/// Gates on disjoint pairs, updated concurrently.
std::vector<TruncationReport> apply_layer(CanonicalTNState& state, std::span<const LayerGate> gates,
                                          std::size_t chi, int fragment = 1);

/// Amplitude of one physical index per site (occupations for a pure state).
cplx amplitude(const CanonicalTNState& state, std::span<const int> indices);

/// Dense vector over all physical index tuples, site 0 slowest.
Vector to_dense(const CanonicalTNState& state);

double norm_squared(const CanonicalTNState& state);

/// Gram matrix of the left partial states ending at bond `k` (bond 0 starts
/// from the all-ones matrix because the boundary indices are summed).
Matrix left_gram(const CanonicalTNState& state, int k);
/// Gram matrix of the right partial states starting at bond `k`, λ^{[k]}
/// excluded.
Matrix right_gram(const CanonicalTNState& state, int k);

/// Reduced-state spectrum at bond l from the left Gram matrix, relying on
/// the right side being orthonormal. Unnormalized.
std::vector<double> schmidt_weights(const CanonicalTNState& state, int l);
/// Same spectrum from both Gram matrices, valid without canonical form.
std::vector<double> schmidt_weights_two_sided(const CanonicalTNState& state, int l);

/// Entanglement entropy (bits) of the physical state across bond l. Uses both
/// Gram matrices, so it stays exact after truncation or leakage has broken
/// the canonical conditions away from the last update.
double entropy_at_cut(const CanonicalTNState& state, int l);
/// Left Gram matrix only; equal to entropy_at_cut on canonical states.
double entropy_at_cut_one_sided(const CanonicalTNState& state, int l);
/// Entropy of the bond singular values themselves, i.e. of the state in
/// which every total photon number is kept apart.
double charge_resolved_entropy(const CanonicalTNState& state, int l);

}  // namespace tnbs
