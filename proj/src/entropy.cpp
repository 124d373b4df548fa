#include "tnbs/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "tnbs/errors.hpp"
#include "tnbs/gates.hpp"
#include "tnbs/linalg.hpp"

namespace tnbs {

InputSpec InputSpec::squeezed(double r, int n_max) {
  const auto a = squeezed_amplitudes(r, n_max);
  return from_coefficients({a.begin(), a.end()});
}

InputSpec InputSpec::single_photon() { return from_coefficients({0.0, 1.0}); }

InputSpec InputSpec::from_coefficients(std::vector<cplx> c) {
  if (c.empty()) throw DomainError("input needs at least one coefficient");
  double norm = 0.0;
  for (const cplx& x : c) norm += std::norm(x);
  if (!(norm > 0.0)) throw DomainError("input state is zero");
  for (cplx& x : c) x /= std::sqrt(norm);
  return {std::move(c)};
}

double ScalingSchedule::mu(double N) const {
  if (!(N >= 1.0)) throw DomainError("N must be at least 1");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return std::min(1.0, beta * std::pow(N, gamma) / N);
}

Matrix single_mode_output(const InputSpec& input, double theta, int n_max) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix psi = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= std::min(n_max, input.n_max()); ++n) {
    for (int k = 0; k <= n; ++k) {
      psi(k, n - k) = input.coefficients[n] * std::sqrt(binomial(n, k)) * std::pow(c, k) * std::pow(s, n - k);
    }
  }
  return psi;
}

Matrix lossy_bipartite_density(const Matrix& psi, double mu, int n_max) {
  const Eigen::Index D = n_max + 1;
  if (psi.rows() != D || psi.cols() != D) throw DimensionError("coefficient table must be (n_max+1) x (n_max+1)");
  const LossChannel ch = loss_channel(mu, n_max);
  Matrix rho = Matrix::Zero(D * D, D * D);
  for (const Matrix& k1 : ch.kraus) {
    const Matrix left = k1 * psi;
    for (const Matrix& k2 : ch.kraus) {
      const Matrix phi = left * k2.transpose();
      // Row-major storage: v[up * D + down] = phi(up, down).
      const Vector v = Eigen::Map<const Vector>(phi.data(), D * D);
      rho.noalias() += v * v.adjoint();
    }
  }
  return rho;
}

Matrix reduced_vectorized_operator(const Matrix& rho, int n_max) {
  const Eigen::Index D = n_max + 1;
  if (rho.rows() != D * D || rho.cols() != D * D) throw DimensionError("density must be (n_max+1)^2 square");
  // R[(u,u'),(d,d')] = ρ[(u,d),(u',d')]; ρ' = R R†.
  Matrix R(D * D, D * D);
  for (Eigen::Index u = 0; u < D; ++u)
    for (Eigen::Index up = 0; up < D; ++up)
      for (Eigen::Index d = 0; d < D; ++d)
        for (Eigen::Index dp = 0; dp < D; ++dp) R(u * D + up, d * D + dp) = rho(u * D + d, up * D + dp);
  return R * R.adjoint();
}

double vectorized_mpo_ee(const Matrix& rho, int n_max) {
  const Matrix rp = reduced_vectorized_operator(rho, n_max);
  auto ev = hermitian_eigenvalues(0.5 * (rp + rp.adjoint()));
  for (double& x : ev) {
    if (x < 0.0 && x >= -kNegativeClip) x = 0.0;
  }
  return entropy_bits(ev);
}

std::pair<double, double> arrowhead_eigenvalues(const Matrix& rp) {
  if (rp.rows() < 1 || rp.rows() != rp.cols()) throw DimensionError("need a square matrix");
  const double a = rp(0, 0).real();
  double off = 0.0;
  for (Eigen::Index n = 1; n < rp.rows(); ++n) off += std::norm(rp(n, 0));
  const double root = std::sqrt(a * a + 4.0 * off);
  return {0.5 * (a + root), 0.5 * (a - root)};
}

double single_mode_ee(const InputSpec& input, double mu, int n_max, double theta) {
  return vectorized_mpo_ee(lossy_bipartite_density(single_mode_output(input, theta, n_max), mu, n_max), n_max);
}

double asymptotic_total_ee(const InputSpec& input, double N, const ScalingSchedule& schedule, int n_max) {
  return N * single_mode_ee(input, schedule.mu(N), n_max, std::numbers::pi / 4);
}

double finite_m_total_ee(const InputSpec& input, const std::vector<double>& thetas, double mu, int n_max) {
  double total = 0.0;
  for (double t : thetas) total += single_mode_ee(input, mu, n_max, t);
  return total;
}

std::vector<ConvergenceRow> nmax_convergence(const InputSpec& input, double N, const ScalingSchedule& schedule,
                                             const std::vector<int>& n_max_list, double squeeze_r) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < n_max_list.size(); ++i) {
    const int n = n_max_list[i];
    if (i > 0 && n <= n_max_list[i - 1]) throw DomainError("n_max list must increase");
    InputSpec in = input;
    if (squeeze_r >= 0.0) {
      in = InputSpec::squeezed(squeeze_r, n);
    } else {
      std::vector<cplx> c(input.coefficients.begin(),
                          input.coefficients.begin() + std::min<std::size_t>(n + 1, input.coefficients.size()));
      in = InputSpec::from_coefficients(std::move(c));
    }
    ConvergenceRow row{n, asymptotic_total_ee(in, N, schedule, n), 0.0};
    if (!rows.empty()) row.delta = row.ee_bits - rows.back().ee_bits;
    rows.push_back(row);
  }
  return rows;
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingPoint>& points) {
  os << "N,mu,ee_bits,n_max,gamma,beta\n";
  char buf[256];
  for (const ScalingPoint& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%.17g,%.17g\n", p.N, p.mu, p.ee_bits, p.n_max, p.gamma,
                  p.beta);
    os << buf;
  }
}

}  // namespace tnbs
