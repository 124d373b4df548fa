#pragma once

// Fock-basis two-mode gates and single-mode loss channels.

#include <map>
#include <vector>

#include "tnbs/charge.hpp"

namespace tnbs {

double factorial(int n);
double binomial(int n, int k);

/// Truncated squeezed-vacuum amplitudes c_0..c_{n_max}, renormalized.
std::vector<double> squeezed_amplitudes(double r, int n_max);

/// One photon-number block of a two-site gate.
///
/// Basis states are labelled by the charge of the first site; the second
/// site carries `total - first`. For doubled gates both components range
/// independently and the first component is the slow index.
struct GateBlock {
  Charge total;
  Charge lo;
  Charge extent{1, 1};
  Matrix matrix;  // rows: output basis, cols: input basis

  /// Position of first-site charge `first` in the block basis, or -1.
  int index_of(Charge first) const {
    const int a = first.first - lo.first;
    const int b = first.second - lo.second;
    if (a < 0 || a >= extent.first || b < 0 || b >= extent.second) return -1;
    return a * extent.second + b;
  }
  Charge basis(int idx) const { return {lo.first + idx / extent.second, lo.second + idx % extent.second}; }
};

/// Photon-number-conserving two-site unitary in the truncated Fock basis,
/// stored as one dense block per conserved total.
class FockGate {
 public:
  FockGate(PhysicalSpace phys, std::map<Charge, GateBlock> blocks, double theta = 0.0, double phi = 0.0);

  const PhysicalSpace& phys() const { return phys_; }
  int dim() const { return phys_.local_dim(); }
  bool doubled() const { return phys_.doubled(); }
  double theta() const { return theta_; }
  double phi() const { return phi_; }

  const std::map<Charge, GateBlock>& blocks() const { return blocks_; }
  const GateBlock* block(Charge total) const;

  /// ⟨i1, i2| U |j1, j2⟩ with each argument a single-site charge.
  cplx element(Charge i1, Charge i2, Charge j1, Charge j2) const;

  /// Full matrix on the two-site space, row/column index p1 * D + p2 with
  /// D = phys().dim().
  Matrix to_dense() const;

 private:
  PhysicalSpace phys_;
  std::map<Charge, GateBlock> blocks_;
  double theta_;
  double phi_;
};

/// exp[θ(e^{iφ} a†b − e^{−iφ} a b†)] restricted to occupations < d.
/// Blocks whose total reaches d are kept but are only partially unitary.
FockGate beam_splitter(double theta, double phi, int d);
FockGate identity_gate(int d);
/// U ⊗ U* on paired indices (i, i').
FockGate double_gate(const FockGate& gate);

/// Single-mode photon loss at survival probability `mu`.
struct LossChannel {
  double mu = 1.0;
  int n_max = 0;
  std::vector<Matrix> kraus;  // kraus[l] removes l photons
};

LossChannel loss_channel(double mu, int n_max);
Matrix apply_channel(const Matrix& rho, const LossChannel& channel);

}  // namespace tnbs
