#include "tnbs/gates.hpp"

#include <algorithm>
#include <cmath>

#include "tnbs/errors.hpp"

namespace tnbs {

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

std::vector<double> squeezed_amplitudes(double r, int n_max) {
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  std::vector<double> c(n_max + 1, 0.0);
  const double t = std::tanh(r);
  double norm = 0.0;
  for (int n = 0; 2 * n <= n_max; ++n) {
    c[2 * n] = std::pow(t, n) * std::sqrt(factorial(2 * n)) / (std::pow(2.0, n) * factorial(n)) / std::sqrt(std::cosh(r));
    norm += c[2 * n] * c[2 * n];
  }
  for (double& x : c) x /= std::sqrt(norm);
  return c;
}

FockGate::FockGate(PhysicalSpace phys, std::map<Charge, GateBlock> blocks, double theta, double phi)
    : phys_(phys), blocks_(std::move(blocks)), theta_(theta), phi_(phi) {}

const GateBlock* FockGate::block(Charge total) const {
  auto it = blocks_.find(total);
  return it == blocks_.end() ? nullptr : &it->second;
}

cplx FockGate::element(Charge i1, Charge i2, Charge j1, Charge j2) const {
  if (i1 + i2 != j1 + j2) return 0.0;
  const GateBlock* b = block(i1 + i2);
  if (!b) return 0.0;
  const int r = b->index_of(i1);
  const int c = b->index_of(j1);
  if (r < 0 || c < 0) return 0.0;
  if (!phys_.index_of(i2) || !phys_.index_of(j2)) return 0.0;
  return b->matrix(r, c);
}

Matrix FockGate::to_dense() const {
  const int D = phys_.dim();
  Matrix u = Matrix::Zero(D * D, D * D);
  for (const auto& [total, b] : blocks_) {
    for (int r = 0; r < b.matrix.rows(); ++r) {
      for (int c = 0; c < b.matrix.cols(); ++c) {
        const Charge i1 = b.basis(r), j1 = b.basis(c);
        auto p1 = phys_.index_of(i1), p2 = phys_.index_of(total - i1);
        auto q1 = phys_.index_of(j1), q2 = phys_.index_of(total - j1);
        if (!p1 || !p2 || !q1 || !q2) continue;
        u(*p1 * D + *p2, *q1 * D + *q2) = b.matrix(r, c);
      }
    }
  }
  return u;
}

namespace {

cplx bs_element(int i1, int i2, int j1, int j2, double c, double s, double phi) {
  cplx sum = 0.0;
  for (int p = 0; p <= std::min(i1, j1); ++p) {
    const int q = i1 - p;
    if (q < 0 || q > j2) continue;
    const int ec = p + j2 - q;
    const int es = j1 - p + q;
    double term = binomial(j1, p) * binomial(j2, q) * std::pow(c, ec) * std::pow(s, es);
    if ((j1 - p) % 2) term = -term;
    sum += term * std::polar(1.0, phi * (q - (j1 - p)));
  }
  return sum * std::sqrt(factorial(i1) * factorial(i2) / (factorial(j1) * factorial(j2)));
}

}  // namespace

FockGate beam_splitter(double theta, double phi, int d) {
  if (d < 2) throw DomainError("beam splitter needs local dimension d >= 2");
  const double c = std::cos(theta), s = std::sin(theta);
  std::map<Charge, GateBlock> blocks;
  for (int n = 0; n <= 2 * d - 2; ++n) {
    GateBlock b;
    b.total = Charge(n);
    b.lo = Charge(std::max(0, n - d + 1));
    b.extent = Charge(std::min(n, d - 1) - b.lo.first + 1, 1);
    const int size = b.extent.first;
    b.matrix.resize(size, size);
    for (int r = 0; r < size; ++r) {
      const int i1 = b.lo.first + r;
      for (int col = 0; col < size; ++col) {
        const int j1 = b.lo.first + col;
        b.matrix(r, col) = bs_element(i1, n - i1, j1, n - j1, c, s, phi);
      }
    }
    blocks.emplace(b.total, std::move(b));
  }
  return FockGate(PhysicalSpace(d, false), std::move(blocks), theta, phi);
}

FockGate identity_gate(int d) { return beam_splitter(0.0, 0.0, d); }

FockGate double_gate(const FockGate& gate) {
  if (gate.doubled()) throw DomainError("gate is already doubled");
  const int d = gate.dim();
  std::map<Charge, GateBlock> blocks;
  for (const auto& [n1, b1] : gate.blocks()) {
    for (const auto& [n2, b2] : gate.blocks()) {
      GateBlock b;
      b.total = Charge(n1.first, n2.first);
      b.lo = Charge(b1.lo.first, b2.lo.first);
      b.extent = Charge(b1.extent.first, b2.extent.first);
      const auto s1 = b1.matrix.rows(), s2 = b2.matrix.rows();
      b.matrix.resize(s1 * s2, s1 * s2);
      for (Eigen::Index r1 = 0; r1 < s1; ++r1)
        for (Eigen::Index c1 = 0; c1 < s1; ++c1)
          b.matrix.block(r1 * s2, c1 * s2, s2, s2) = b1.matrix(r1, c1) * b2.matrix.conjugate();
      blocks.emplace(b.total, std::move(b));
    }
  }
  return FockGate(PhysicalSpace(d, true), std::move(blocks), gate.theta(), gate.phi());
}

LossChannel loss_channel(double mu, int n_max) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw DomainError("survival probability must lie in [0, 1]");
  if (n_max < 0) throw DomainError("n_max must be non-negative");
  LossChannel ch{mu, n_max, {}};
  for (int l = 0; l <= n_max; ++l) {
    Matrix k = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = l; n <= n_max; ++n) {
      // 0^0 = 1 so the edge cases mu = 0 and mu = 1 come out exact.
      const double keep = (n - l == 0) ? 1.0 : std::pow(mu, 0.5 * (n - l));
      const double lose = (l == 0) ? 1.0 : std::pow(1.0 - mu, 0.5 * l);
      k(n - l, n) = std::sqrt(binomial(n, l)) * keep * lose;
    }
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

Matrix apply_channel(const Matrix& rho, const LossChannel& channel) {
  const Eigen::Index D = channel.n_max + 1;
  if (rho.rows() != D || rho.cols() != D) {
    throw DimensionError("density matrix dimension does not match channel n_max + 1");
  }
  Matrix out = Matrix::Zero(D, D);
  for (const Matrix& k : channel.kraus) out.noalias() += k * rho * k.adjoint();
  return out;
}

}  // namespace tnbs
