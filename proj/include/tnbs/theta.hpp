#pragma once

// Two-site Θ assembly for a gate update, one slice per centre charge.

#include <span>
#include <vector>

#include "tnbs/gates.hpp"
#include "tnbs/sym_tensor.hpp"

namespace tnbs {

/// Everything the two-site contraction reads. The λ vectors are aligned
/// with the bonds (left of Γ_L, between, right of Γ_R).
struct ThetaInputs {
  const ChargeBlockTensor& gamma_left;
  std::span<const double> lambda_left;
  std::span<const double> lambda_mid;
  const ChargeBlockTensor& gamma_right;
  std::span<const double> lambda_right;
  const FockGate& gate;
};

/// Throws ConsistencyError when bonds, λ lengths or physical spaces disagree.
void validate(const ThetaInputs& in);

/// Centre charges for which Θ(c) has at least one row and one column.
std::vector<Charge> center_charges(const ThetaInputs& in);

/// Reference path: loops over left, middle and right charges with scalar
/// inner loops.
ThetaSlice assemble_theta_naive(const ThetaInputs& in, Charge c);

/// Blocked path: one gate lookup per (left, middle, right) triple followed by
/// a dense multiply over the middle segment.
ThetaSlice assemble_theta_blocked(const ThetaInputs& in, Charge c);

/// Blocked assembly of every admissible slice at once, sharing the
/// λΓλΓλ products between centre charges. Slices come back in ascending
/// charge order. `input_norm2`, if given, receives the squared norm of the
/// two-site wavefunction before the gate acts.
std::vector<ThetaSlice> assemble_theta_all(const ThetaInputs& in, double* input_norm2 = nullptr);

}  // namespace tnbs
