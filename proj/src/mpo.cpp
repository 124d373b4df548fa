#include "tnbs/mpo.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "tnbs/errors.hpp"

namespace tnbs {

Matrix lossy_squeezed_density(double r, double mu, int n_max) {
  const auto amps = squeezed_amplitudes(r, n_max);
  Vector v(n_max + 1);
  for (int n = 0; n <= n_max; ++n) v[n] = amps[n];
  return apply_channel(v * v.adjoint(), loss_channel(mu, n_max));
}

CanonicalTNState init_product_density(const std::vector<Matrix>& sites, int cap) {
  if (sites.empty()) throw DomainError("a state needs at least one site");
  const int d = static_cast<int>(sites[0].rows());
  std::vector<Vector> vecs;
  for (const Matrix& rho : sites) {
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("site density matrices must be d x d");
    Vector v(d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v[i * d + j] = rho(i, j);
    vecs.push_back(std::move(v));
  }
  return init_product(PhysicalSpace(d, true), Charge(cap, cap), vecs);
}

CanonicalTNState init_lossy_squeezed(double r, double mu, int N, int M, int n_max, int d) {
  if (M < 1 || N < 0 || N > M) throw DomainError("need 0 <= N <= M and M >= 1");
  if (n_max < 0 || n_max % 2 != 0) throw DomainError("n_max must be a non-negative even integer");
  if (n_max >= d) throw TruncationError("n_max " + std::to_string(n_max) + " needs d > n_max, got d = " + std::to_string(d));
  const Matrix lossy = lossy_squeezed_density(r, mu, n_max);
  Matrix sq = Matrix::Zero(d, d);
  sq.topLeftCorner(n_max + 1, n_max + 1) = lossy;
  Matrix vac = Matrix::Zero(d, d);
  vac(0, 0) = 1.0;
  std::vector<Matrix> sites;
  for (int k = 0; k < M; ++k) sites.push_back(k < N ? sq : vac);
  return init_product_density(sites, d - 1);
}

CanonicalTNState vectorize_pure(const CanonicalTNState& p) {
  if (p.doubled()) throw DomainError("state is already vectorized");
  const int M = p.modes();
  CanonicalTNState s;
  s.phys = PhysicalSpace(p.phys.local_dim(), true);
  s.cap = Charge(p.cap.first, p.cap.first);
  for (int k = 0; k <= M; ++k) {
    std::vector<Charge> charges;
    std::vector<double> lambda;
    const auto& segs = p.bonds[k].segments();
    for (const Segment& a : segs) {
      for (const Segment& b : segs) {
        for (std::size_t i = 0; i < a.size; ++i) {
          for (std::size_t j = 0; j < b.size; ++j) {
            charges.emplace_back(a.charge.first, b.charge.first);
            lambda.push_back(p.lambdas[k][a.offset + i] * p.lambdas[k][b.offset + j]);
          }
        }
      }
    }
    s.bonds.emplace_back(std::move(charges));
    s.lambdas.push_back(std::move(lambda));
  }
  for (int k = 0; k < M; ++k) {
    ChargeBlockTensor g(s.bonds[k], s.bonds[k + 1], s.phys);
    for (const auto& [k1, m1] : p.gammas[k].blocks()) {
      for (const auto& [k2, m2] : p.gammas[k].blocks()) {
        Matrix blk(m1.rows() * m2.rows(), m1.cols() * m2.cols());
        for (Eigen::Index r = 0; r < m1.rows(); ++r)
          for (Eigen::Index c = 0; c < m1.cols(); ++c)
            blk.block(r * m2.rows(), c * m2.cols(), m2.rows(), m2.cols()) = m1(r, c) * m2.conjugate();
        g.set_block(Charge(k1.first.first, k2.first.first), Charge(k1.second.first, k2.second.first), std::move(blk));
      }
    }
    s.gammas.push_back(std::move(g));
  }
  return s;
}

TruncationReport apply_gate_mpo(CanonicalTNState& s, const FockGate& gate, int site, std::size_t chi, int fragment) {
  if (!s.doubled()) throw DimensionError("apply_gate_mpo needs a vectorized state");
  if (!gate.doubled()) throw DimensionError("apply_gate_mpo needs a doubled gate");
  return apply_gate(s, gate, site, chi, fragment);
}

double trace_of(const CanonicalTNState& s) {
  if (!s.doubled()) throw DimensionError("trace needs a vectorized state");
  const int d = s.phys.local_dim();
  Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Ones(s.bonds[0].dim());
  for (int k = 0; k < s.modes(); ++k) {
    const auto& g = s.gammas[k];
    Eigen::RowVectorXcd next = Eigen::RowVectorXcd::Zero(g.right_map().dim());
    for (const auto& [key, m] : g.blocks()) {
      const Charge q = key.first - key.second;
      if (q.first != q.second || q.first >= d) continue;
      const Segment* sa = g.left_map().find(key.first);
      const Segment* sb = g.right_map().find(key.second);
      Eigen::RowVectorXcd w = v.segment(sa->offset, sa->size);
      for (std::size_t i = 0; i < sa->size; ++i) w[i] *= s.lambdas[k][sa->offset + i];
      next.segment(sb->offset, sb->size) += w * m;
    }
    v = std::move(next);
  }
  return v[0].real() * s.lambdas[s.modes()][0];
}

double mpo_entropy_at_cut(const CanonicalTNState& s, int l) {
  if (!s.doubled()) throw DimensionError("MPO entropy needs a vectorized state");
  return entropy_at_cut(s, l);
}

DenseDensity to_dense_operator(const CanonicalTNState& s) {
  if (!s.doubled()) throw DimensionError("dense operator needs a vectorized state");
  const int d = s.phys.local_dim();
  if (std::pow(static_cast<double>(d), 2.0 * s.modes()) > kDenseCapacity) {
    throw CapacityError("vectorized state too large to densify");
  }
  DenseFockState v{s.modes(), d * d, to_dense(s)};
  return unvectorize(v, d);
}

void write_trace_csv(std::ostream& os, const EntropyTrace& trace, bool timing) {
  os << "layer,cut,ee_bits,trace_error,max_bond,seconds\n";
  char buf[256];
  for (const LayerRecord& r : trace.records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%zu,%.6f\n", r.layer, r.cut, r.ee_bits, r.trace_error,
                  r.max_bond, timing ? r.seconds : 0.0);
    os << buf;
  }
}

}  // namespace tnbs
