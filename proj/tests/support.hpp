#pragma once

// Shared helpers for unit and acceptance tests: random inputs, dense
// references and a few closed forms.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "tnbs/circuit.hpp"
#include "tnbs/gates.hpp"
#include "tnbs/mpo.hpp"
#include "tnbs/oracle.hpp"
#include "tnbs/state.hpp"

namespace tnbs::test {

inline constexpr std::size_t kFullChi = 1u << 30;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v / v.norm();
}

inline FockGate random_beam_splitter(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  return beam_splitter(u(rng) / 4.0, u(rng), d);
}

/// Applies `layers` brick-wall layers of random beam splitters.
inline void scramble(CanonicalTNState& s, std::mt19937_64& rng, int layers, std::size_t chi) {
  const int d = s.phys.local_dim();
  for (int l = 0; l < layers; ++l) {
    for (int k = l % 2; k + 1 < s.modes(); k += 2) {
      const FockGate g = random_beam_splitter(rng, d);
      if (s.doubled()) apply_gate(s, double_gate(g), k, chi);
      else apply_gate(s, g, k, chi);
    }
  }
}

/// Random pure product state, cap on the total, then a few random layers at
/// full bond dimension. Canonical when cap <= d - 1; a larger cap lets the
/// gates leak, which leaves the bonds away from the last gate non-orthonormal.
inline CanonicalTNState random_canonical_pure(std::mt19937_64& rng, int M, int d, int cap, int layers) {
  std::vector<Vector> sites;
  for (int k = 0; k < M; ++k) sites.push_back(random_vector(rng, d));
  CanonicalTNState s = init_product(PhysicalSpace(d, false), Charge(cap), sites);
  scramble(s, rng, layers, kFullChi);
  return s;
}

/// Random density-operator product (each site a random mixed state), then
/// random doubled layers at full bond dimension.
inline CanonicalTNState random_canonical_mixed(std::mt19937_64& rng, int M, int d, int cap, int layers) {
  std::vector<Matrix> sites;
  for (int k = 0; k < M; ++k) {
    const Matrix a = random_matrix(rng, d, d);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    sites.push_back(rho);
  }
  CanonicalTNState s = init_product_density(sites, cap);
  scramble(s, rng, layers, kFullChi);
  return s;
}

/// Binary entropy in bits.
inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

/// cosh²x log₂cosh²x − sinh²x log₂sinh²x.
inline double tmsv_entropy(double x) {
  const double c = std::cosh(x) * std::cosh(x), s = std::sinh(x) * std::sinh(x);
  return c * std::log2(c) - (s > 0.0 ? s * std::log2(s) : 0.0);
}

/// Schmidt entropy (bits) of a two-mode state given as a coefficient table,
/// by dense SVD.
inline double table_entropy(const Matrix& psi) {
  Eigen::BDCSVD<Matrix> svd(psi);
  const Eigen::VectorXd s = svd.singularValues();
  const double tot = s.squaredNorm();
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double p = s[i] * s[i] / tot;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// Matrix exponential of the truncated two-mode generator θ(e^{iφ}a†b − h.c.)
/// restricted to one total-photon block, by eigendecomposition of the
/// Hermitian matrix −i·generator.
inline Matrix generator_exponential_block(double theta, double phi, int n) {
  Matrix g = Matrix::Zero(n + 1, n + 1);  // basis |k, n-k>, k = photons in mode a
  for (int k = 0; k < n; ++k) {
    // a†b |k, n-k> = sqrt(k+1) sqrt(n-k) |k+1, n-k-1>
    const double amp = std::sqrt((k + 1.0) * (n - k));
    g(k + 1, k) += theta * std::polar(1.0, phi) * amp;
    g(k, k + 1) -= theta * std::polar(1.0, -phi) * amp;
  }
  const Matrix h = cplx(0.0, -1.0) * g;  // Hermitian
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXcd phases = (cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace tnbs::test
