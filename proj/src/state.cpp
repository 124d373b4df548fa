#include "tnbs/state.hpp"

#include <cmath>
#include <exception>
#include <map>
#include <set>

#include "tnbs/linalg.hpp"
#include "tnbs/theta.hpp"

namespace tnbs {

namespace {

using RealMap = Eigen::Map<const Eigen::VectorXd>;

RealMap lambda_segment(const std::vector<double>& lambda, const Segment& s) {
  return RealMap(lambda.data() + s.offset, static_cast<Eigen::Index>(s.size));
}

double lookup(const std::map<Charge, double>& m, Charge c) {
  auto it = m.find(c);
  return it == m.end() ? 0.0 : it->second;
}

void check_cut(const CanonicalTNState& s, int l) {
  if (l < 1 || l >= s.modes()) {
    throw DomainError("cut " + std::to_string(l) + " outside [1, " + std::to_string(s.modes() - 1) + "]");
  }
}

// Blocks of one site tensor grouped by the physical charge they carry.
std::map<Charge, std::vector<std::pair<Charge, Charge>>> blocks_by_physical(const ChargeBlockTensor& g) {
  std::map<Charge, std::vector<std::pair<Charge, Charge>>> out;
  for (const auto& [key, m] : g.blocks()) out[key.first - key.second].push_back(key);
  return out;
}

}  // namespace

std::size_t CanonicalTNState::max_bond() const {
  std::size_t m = 1;
  for (std::size_t k = 1; k + 1 < bonds.size(); ++k) m = std::max(m, bonds[k].dim());
  return m;
}

void CanonicalTNState::check() const {
  const auto M = gammas.size();
  if (M == 0) throw DimensionError("state has no sites");
  if (bonds.size() != M + 1 || lambdas.size() != M + 1) throw DimensionError("state needs M + 1 bonds");
  for (std::size_t k = 0; k <= M; ++k) {
    if (lambdas[k].size() != bonds[k].dim()) throw DimensionError("bond " + std::to_string(k) + " λ length mismatch");
  }
  for (std::size_t k = 0; k < M; ++k) {
    if (!(gammas[k].left_map() == bonds[k]) || !(gammas[k].right_map() == bonds[k + 1])) {
      throw ConsistencyError("site " + std::to_string(k) + " bonds differ from the state's bonds");
    }
    if (!(gammas[k].phys() == phys)) throw ConsistencyError("site " + std::to_string(k) + " physical space differs");
  }
}

CanonicalTNState init_product(PhysicalSpace phys, Charge cap, const std::vector<Vector>& sites) {
  const int M = static_cast<int>(sites.size());
  if (M < 1) throw DomainError("a state needs at least one site");
  for (const Vector& v : sites) {
    if (v.size() != phys.dim()) throw DimensionError("site vector length differs from the physical dimension");
  }
  // r2[k]: squared norm of sites k.. per right charge; l2[k]: squared norm of
  // sites ..k-1 per left charge. Both only keep charges within the cap.
  std::vector<std::map<Charge, double>> r2(M + 1), l2(M + 1);
  r2[M][Charge{0, 0}] = 1.0;
  for (int k = M - 1; k >= 0; --k) {
    for (const auto& [c, w] : r2[k + 1]) {
      for (int p = 0; p < phys.dim(); ++p) {
        const double a2 = std::norm(sites[k][p]);
        const Charge cc = c + phys.charge_of(p);
        if (a2 == 0.0 || !cc.fits_within(cap)) continue;
        r2[k][cc] += a2 * w;
      }
    }
  }
  l2[0][Charge{0, 0}] = 1.0;
  for (int k = 0; k < M; ++k) {
    for (const auto& [n, w] : l2[k]) {
      for (int p = 0; p < phys.dim(); ++p) {
        const double a2 = std::norm(sites[k][p]);
        const Charge nn = n + phys.charge_of(p);
        if (a2 == 0.0 || !nn.fits_within(cap)) continue;
        l2[k + 1][nn] += a2 * w;
      }
    }
  }
  auto lcap = [&](int k, Charge c) {
    if (k == M) return 1.0;
    double s = 0.0;
    for (const auto& [n, w] : l2[k]) {
      if ((n + c).fits_within(cap)) s += w;
    }
    return s;
  };

  CanonicalTNState st;
  st.phys = phys;
  st.cap = cap;
  for (int k = 0; k <= M; ++k) {
    std::vector<Charge> charges;
    std::vector<double> lambda;
    for (const auto& [c, w] : r2[k]) {
      const double lc = lcap(k, c);
      if (w <= 0.0 || lc <= 0.0) continue;
      charges.push_back(c);
      lambda.push_back(k == M ? 1.0 : std::sqrt(lc * w));
    }
    if (charges.empty()) throw DomainError("no component of the product state fits under the photon cap");
    st.bonds.emplace_back(std::move(charges));
    st.lambdas.push_back(std::move(lambda));
  }
  for (int k = 0; k < M; ++k) {
    ChargeBlockTensor g(st.bonds[k], st.bonds[k + 1], phys);
    for (Charge a : st.bonds[k].charges()) {
      for (Charge b : st.bonds[k + 1].charges()) {
        auto p = phys.index_of(a - b);
        if (!p || sites[k][*p] == cplx(0.0)) continue;
        Matrix m(1, 1);
        m(0, 0) = sites[k][*p] / (std::sqrt(lookup(r2[k], a)) * std::sqrt(lcap(k + 1, b)));
        g.set_block(a, b, std::move(m));
      }
    }
    st.gammas.push_back(std::move(g));
  }
  return st;
}

CanonicalTNState init_fock(const std::vector<int>& pattern, int d) {
  int top = 0, total = 0;
  for (int n : pattern) {
    if (n < 0) throw DomainError("occupations must be non-negative");
    top = std::max(top, n);
    total += n;
  }
  if (d == 0) d = std::max(2, top + 1);
  if (top >= d) throw TruncationError("occupation " + std::to_string(top) + " does not fit local dimension " + std::to_string(d));
  PhysicalSpace phys(d, false);
  std::vector<Vector> sites;
  for (int n : pattern) {
    Vector v = Vector::Zero(d);
    v[n] = 1.0;
    sites.push_back(std::move(v));
  }
  return init_product(phys, Charge(total), sites);
}

CanonicalTNState init_squeezed_product(double r, int N, int M, int n_max, int d) {
  if (M < 1 || N < 0 || N > M) throw DomainError("need 0 <= N <= M and M >= 1");
  if (n_max < 0 || n_max % 2 != 0) throw DomainError("n_max must be a non-negative even integer");
  if (n_max >= d) throw TruncationError("n_max " + std::to_string(n_max) + " needs d > n_max, got d = " + std::to_string(d));
  const auto amps = squeezed_amplitudes(r, n_max);
  PhysicalSpace phys(d, false);
  std::vector<Vector> sites;
  for (int k = 0; k < M; ++k) {
    Vector v = Vector::Zero(d);
    if (k < N) {
      for (int n = 0; n <= n_max; ++n) v[n] = amps[n];
    } else {
      v[0] = 1.0;
    }
    sites.push_back(std::move(v));
  }
  return init_product(phys, Charge(d - 1), sites);
}

int choose_local_dim(double r, int N, int n_max, double mu, double tail) {
  if (N < 0) throw DomainError("N must be non-negative");
  const auto amps = squeezed_amplitudes(r, n_max);
  std::vector<double> single(n_max + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= n; ++m) {
      single[m] += amps[n] * amps[n] * binomial(n, m) * std::pow(mu, m) * std::pow(1.0 - mu, n - m);
    }
  }
  std::vector<double> total{1.0};
  for (int i = 0; i < N; ++i) {
    std::vector<double> next(total.size() + n_max, 0.0);
    for (std::size_t a = 0; a < total.size(); ++a)
      for (int b = 0; b <= n_max; ++b) next[a + b] += total[a] * single[b];
    total = std::move(next);
  }
  double kept = 0.0;
  int d = 1;
  for (std::size_t n = 0; n < total.size(); ++n) {
    kept += total[n];
    d = static_cast<int>(n) + 1;
    if (1.0 - kept < tail) break;
  }
  return std::max({d, n_max + 1, 2});
}

TruncationReport apply_gate(CanonicalTNState& s, const FockGate& gate, int site, std::size_t chi, int fragment) {
  const int M = s.modes();
  if (site < 0 || site + 1 >= M) {
    throw DomainError("gate site " + std::to_string(site) + " outside [0, " + std::to_string(M - 2) + "]");
  }
  if (!(gate.phys() == s.phys)) throw DimensionError("gate physical space does not match the state");
  if (chi < 1) throw DomainError("bond dimension must be at least 1");
  if (fragment < 1) throw DomainError("padding fragment must be positive");

  const ChargeBlockTensor& gl = s.gammas[site];
  const ChargeBlockTensor& gr = s.gammas[site + 1];
  std::vector<ThetaSlice> slices;
  double in_norm2 = 0.0;
  if (fragment == 1) {
    ThetaInputs in{gl, s.lambdas[site], s.lambdas[site + 1], gr, s.lambdas[site + 2], gate};
    slices = assemble_theta_all(in, &in_norm2);
  } else {
    const auto pl = pad_blocks_to_multiple(gl, fragment);
    const auto pr = pad_blocks_to_multiple(gr, fragment);
    const auto b0 = pad_bond(s.bonds[site], s.lambdas[site], fragment);
    const auto b1 = pad_bond(s.bonds[site + 1], s.lambdas[site + 1], fragment);
    const auto b2 = pad_bond(s.bonds[site + 2], s.lambdas[site + 2], fragment);
    ThetaInputs in{pl, b0.lambda, b1.lambda, pr, b2.lambda, gate};
    for (const auto& sl : assemble_theta_all(in, &in_norm2)) slices.push_back(strip_padding(sl, b0.map, b2.map));
  }
  double theta_norm2 = 0.0;
  for (const auto& sl : slices) theta_norm2 += sl.squared_norm();

  GlobalTruncation tr;
  try {
    tr = truncated_svd_global(slices, chi, s.phys.doubled());
  } catch (const NumericalError& e) {
    throw NumericalError("gate on sites " + std::to_string(site) + "," + std::to_string(site + 1) + ": " + e.what(),
                         e.sector());
  }

  std::map<Charge, const ThetaSlice*> by_center;
  for (const auto& sl : slices) by_center[sl.center] = &sl;
  const auto& lam_l = s.lambdas[site];
  const auto& lam_r = s.lambdas[site + 2];
  ChargeBlockTensor new_l(s.bonds[site], tr.bond, s.phys);
  ChargeBlockTensor new_r(tr.bond, s.bonds[site + 2], s.phys);
  for (const SliceFactors& f : tr.factors) {
    const ThetaSlice& sl = *by_center.at(f.center);
    for (const SliceBlock& rb : sl.row_blocks) {
      Matrix blk = f.left.middleRows(rb.offset, rb.size);
      for (std::size_t x = 0; x < rb.size; ++x) {
        const double l = lam_l[rb.bond_offset + x];
        if (l >= kSingularFloor) {
          blk.row(x) /= l;
        } else {
          blk.row(x).setZero();
        }
      }
      new_l.set_block(rb.charge, f.center, std::move(blk));
    }
    for (const SliceBlock& cb : sl.col_blocks) {
      Matrix blk = f.right.middleCols(cb.offset, cb.size);
      for (std::size_t y = 0; y < cb.size; ++y) {
        const double l = lam_r[cb.bond_offset + y];
        if (l >= kSingularFloor) {
          blk.col(y) /= l;
        } else {
          blk.col(y).setZero();
        }
      }
      new_r.set_block(f.center, cb.charge, std::move(blk));
    }
  }

  TruncationReport rep;
  rep.site = site;
  rep.discarded_weight = tr.spectrum.discarded_weight;
  rep.leakage = in_norm2 - theta_norm2;
  rep.bond_dim = tr.bond.dim();
  s.gammas[site] = std::move(new_l);
  s.gammas[site + 1] = std::move(new_r);
  s.bonds[site + 1] = std::move(tr.bond);
  s.lambdas[site + 1] = std::move(tr.lambda);
  return rep;
}

std::vector<TruncationReport> apply_layer(CanonicalTNState& s, std::span<const LayerGate> gates, std::size_t chi,
                                          int fragment) {
  std::set<int> used;
  for (const LayerGate& g : gates) {
    if (!g.gate) throw DomainError("layer gate is null");
    if (!used.insert(g.site).second || !used.insert(g.site + 1).second) {
      throw ConsistencyError("gates in one layer must act on disjoint sites");
    }
  }
  std::vector<TruncationReport> reports(gates.size());
  std::vector<std::exception_ptr> errors(gates.size());
  const auto n = static_cast<std::ptrdiff_t>(gates.size());
  // Disjoint gates touch disjoint sites and middle bonds; the outer λ's they
  // read are never written within the layer.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      reports[i] = apply_gate(s, *gates[i].gate, gates[i].site, chi, fragment);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

cplx amplitude(const CanonicalTNState& s, std::span<const int> indices) {
  const int M = s.modes();
  if (static_cast<int>(indices.size()) != M) throw DimensionError("pattern length differs from the number of modes");
  Eigen::RowVectorXcd v = RealMap(s.lambdas[0].data(), s.lambdas[0].size()).cast<cplx>().transpose();
  for (int k = 0; k < M; ++k) {
    if (indices[k] < 0 || indices[k] >= s.phys.dim()) return 0.0;
    const Charge q = s.phys.charge_of(indices[k]);
    const auto& g = s.gammas[k];
    Eigen::RowVectorXcd next = Eigen::RowVectorXcd::Zero(g.right_map().dim());
    for (const auto& [key, m] : g.blocks()) {
      if (key.first - key.second != q) continue;
      const Segment* sa = g.left_map().find(key.first);
      const Segment* sb = g.right_map().find(key.second);
      next.segment(sb->offset, sb->size) += v.segment(sa->offset, sa->size) * m;
    }
    v = next.cwiseProduct(RealMap(s.lambdas[k + 1].data(), s.lambdas[k + 1].size()).cast<cplx>().transpose());
  }
  return v.sum();
}

Vector to_dense(const CanonicalTNState& s) {
  const int M = s.modes();
  const int D = s.phys.dim();
  Matrix acc = RealMap(s.lambdas[0].data(), s.lambdas[0].size()).cast<cplx>().transpose();
  for (int k = 0; k < M; ++k) {
    const auto& lam = s.lambdas[k + 1];
    const auto diag = RealMap(lam.data(), lam.size()).cast<cplx>().asDiagonal();
    Matrix next(acc.rows() * D, static_cast<Eigen::Index>(lam.size()));
    for (int p = 0; p < D; ++p) {
      Matrix part = acc * s.gammas[k].dense_slice(p) * diag;
      for (Eigen::Index r = 0; r < acc.rows(); ++r) next.row(r * D + p) = part.row(r);
    }
    acc = std::move(next);
  }
  return acc.col(0);
}

double norm_squared(const CanonicalTNState& s) {
  // Every boundary index carries a distinct photon total, so the summed
  // state's norm is the plain sum over boundary indices and the environment
  // stays block diagonal in charge.
  std::map<Charge, Matrix> env;
  for (const Segment& seg : s.bonds[0].segments()) env[seg.charge] = Matrix::Identity(seg.size, seg.size);
  for (int k = 0; k < s.modes(); ++k) {
    const auto& g = s.gammas[k];
    std::map<Charge, Matrix> next;
    for (const Segment& seg : g.right_map().segments()) next[seg.charge] = Matrix::Zero(seg.size, seg.size);
    for (const auto& [key, m] : g.blocks()) {
      const Segment* sa = g.left_map().find(key.first);
      const auto la = lambda_segment(s.lambdas[k], *sa);
      const Matrix a = la.cast<cplx>().asDiagonal() * m;
      next[key.second] += a.adjoint() * env.at(key.first) * a;
    }
    env = std::move(next);
  }
  const double lm = s.lambdas[s.modes()][0];
  return env.begin()->second(0, 0).real() * lm * lm;
}

Matrix left_gram(const CanonicalTNState& s, int k) {
  if (k < 0 || k > s.modes()) throw DomainError("bond index out of range");
  const auto d0 = static_cast<Eigen::Index>(s.bonds[0].dim());
  Matrix g = Matrix::Ones(d0, d0);
  for (int j = 0; j < k; ++j) {
    const auto& gam = s.gammas[j];
    const auto n = static_cast<Eigen::Index>(gam.right_map().dim());
    Matrix next = Matrix::Zero(n, n);
    for (const auto& [q, keys] : blocks_by_physical(gam)) {
      for (const auto& [a, b] : keys) {
        const Segment* sa = gam.left_map().find(a);
        const Segment* sb = gam.right_map().find(b);
        const Matrix lhs = (lambda_segment(s.lambdas[j], *sa).cast<cplx>().asDiagonal() * *gam.block(a, b)).adjoint();
        for (const auto& [a2, b2] : keys) {
          const Segment* sa2 = gam.left_map().find(a2);
          const Segment* sb2 = gam.right_map().find(b2);
          const Matrix rhs = lambda_segment(s.lambdas[j], *sa2).cast<cplx>().asDiagonal() * *gam.block(a2, b2);
          next.block(sb->offset, sb2->offset, sb->size, sb2->size) +=
              lhs * g.block(sa->offset, sa2->offset, sa->size, sa2->size) * rhs;
        }
      }
    }
    g = std::move(next);
  }
  return g;
}

Matrix right_gram(const CanonicalTNState& s, int k) {
  const int M = s.modes();
  if (k < 0 || k > M) throw DomainError("bond index out of range");
  Matrix g = Matrix::Ones(1, 1);
  for (int j = M - 1; j >= k; --j) {
    const auto& gam = s.gammas[j];
    const auto n = static_cast<Eigen::Index>(gam.left_map().dim());
    Matrix next = Matrix::Zero(n, n);
    for (const auto& [q, keys] : blocks_by_physical(gam)) {
      for (const auto& [a, b] : keys) {
        const Segment* sa = gam.left_map().find(a);
        const Segment* sb = gam.right_map().find(b);
        const Matrix lhs = (*gam.block(a, b) * lambda_segment(s.lambdas[j + 1], *sb).cast<cplx>().asDiagonal()).conjugate();
        for (const auto& [a2, b2] : keys) {
          const Segment* sa2 = gam.left_map().find(a2);
          const Segment* sb2 = gam.right_map().find(b2);
          const Matrix rhs = *gam.block(a2, b2) * lambda_segment(s.lambdas[j + 1], *sb2).cast<cplx>().asDiagonal();
          next.block(sa->offset, sa2->offset, sa->size, sa2->size) +=
              lhs * g.block(sb->offset, sb2->offset, sb->size, sb2->size) * rhs.transpose();
        }
      }
    }
    g = std::move(next);
  }
  return g;
}

std::vector<double> schmidt_weights(const CanonicalTNState& s, int l) {
  check_cut(s, l);
  const auto& lam = s.lambdas[l];
  if (s.bonds[0].dim() == 1) {
    std::vector<double> w;
    for (double x : lam) w.push_back(x * x);
    return w;
  }
  const auto d = RealMap(lam.data(), lam.size()).cast<cplx>().asDiagonal();
  Matrix h = d * left_gram(s, l) * d;
  return hermitian_eigenvalues(0.5 * (h + h.adjoint()));
}

std::vector<double> schmidt_weights_two_sided(const CanonicalTNState& s, int l) {
  check_cut(s, l);
  const auto& lam = s.lambdas[l];
  const auto d = RealMap(lam.data(), lam.size()).cast<cplx>().asDiagonal();
  const Matrix root = psd_sqrt(left_gram(s, l));
  Matrix h = root * (d * right_gram(s, l).transpose() * d) * root;
  return hermitian_eigenvalues(0.5 * (h + h.adjoint()));
}

double entropy_at_cut(const CanonicalTNState& s, int l) { return entropy_bits(schmidt_weights_two_sided(s, l)); }

double entropy_at_cut_one_sided(const CanonicalTNState& s, int l) { return entropy_bits(schmidt_weights(s, l)); }

double charge_resolved_entropy(const CanonicalTNState& s, int l) {
  check_cut(s, l);
  std::vector<double> w;
  for (double x : s.lambdas[l]) w.push_back(x * x);
  return entropy_bits(w);
}

}  // namespace tnbs
