#pragma once

// Closed-form single-mode estimate of the MPO entanglement entropy: one
// input mode split across the cut, independent loss on both halves, and the
// entropy of the vectorized operator. Totals add over input modes.

#include <iosfwd>
#include <vector>

#include "tnbs/charge.hpp"

namespace tnbs {

/// Single-mode input Σ c_n a†ⁿ/√n! |0⟩, truncated at n_max and renormalized.
struct InputSpec {
  std::vector<cplx> coefficients;

  static InputSpec squeezed(double r, int n_max);
  static InputSpec single_photon();
  static InputSpec from_coefficients(std::vector<cplx> c);

  int n_max() const { return static_cast<int>(coefficients.size()) - 1; }
};

/// μ(N) = min(1, β N^γ / N).
struct ScalingSchedule {
  double beta = 1.0;
  double gamma = 0.5;

  double mu(double N) const;
};

/// ψ(k, n−k) as a matrix indexed by (photons up, photons down), both in
/// [0, n_max].
Matrix single_mode_output(const InputSpec& input, double theta, int n_max);

/// Σ_{l1,l2} (K^{l1} ⊗ K^{l2}) |ψ⟩⟨ψ| (…)†, index up * (n_max+1) + down.
Matrix lossy_bipartite_density(const Matrix& psi, double mu, int n_max);

/// ρ' = Tr_down |ρ⟩⟩⟨⟨ρ|, indexed by (up, up') pairs.
Matrix reduced_vectorized_operator(const Matrix& rho, int n_max);

/// Entropy (bits) of the normalized eigenvalues of ρ'.
double vectorized_mpo_ee(const Matrix& rho, int n_max);

/// Nonzero eigenvalues ½(a ± sqrt(a² + 4Σ|b_n|²)) of the arrowhead matrix
/// keeping only the first row and column of `rho_prime`.
std::pair<double, double> arrowhead_eigenvalues(const Matrix& rho_prime);

/// Entropy of one mode at survival `mu` split by angle θ.
double single_mode_ee(const InputSpec& input, double mu, int n_max, double theta);

/// N × single-mode entropy at θ = π/4 and μ = schedule.mu(N).
double asymptotic_total_ee(const InputSpec& input, double N, const ScalingSchedule& schedule, int n_max);

/// Σ_j single-mode entropy over the occupied inputs, using their own
/// bipartition angles.
double finite_m_total_ee(const InputSpec& input, const std::vector<double>& thetas, double mu, int n_max);

struct ConvergenceRow {
  int n_max = 0;
  double ee_bits = 0.0;
  double delta = 0.0;  // change from the previous row, 0 for the first
};

/// Entropy as the input truncation grows. For a squeezed input, pass
/// `squeeze_r`; otherwise the given input is truncated to each n_max.
std::vector<ConvergenceRow> nmax_convergence(const InputSpec& input, double N, const ScalingSchedule& schedule,
                                             const std::vector<int>& n_max_list, double squeeze_r = -1.0);

struct ScalingPoint {
  double N = 0.0;
  double mu = 0.0;
  double ee_bits = 0.0;
  int n_max = 0;
  double gamma = 0.0;
  double beta = 0.0;
};

/// CSV with header N,mu,ee_bits,n_max,gamma,beta.
void write_scaling_csv(std::ostream& os, const std::vector<ScalingPoint>& points);

}  // namespace tnbs
