#include "tnbs/oracle.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "tnbs/errors.hpp"
#include "tnbs/linalg.hpp"

namespace tnbs {

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void guard_state(int local, int modes) {
  if (std::pow(static_cast<double>(local), modes) > kDenseCapacity) {
    throw CapacityError("dense state with " + std::to_string(local) + "^" + std::to_string(modes) +
                        " amplitudes exceeds the oracle capacity");
  }
}

void guard_density(int d, int modes) {
  if (std::pow(static_cast<double>(d), 2.0 * modes) > kDenseCapacity) {
    throw CapacityError("dense density matrix of dimension " + std::to_string(d) + "^" + std::to_string(modes) +
                        " exceeds the oracle capacity");
  }
}

// Applies a two-site matrix to every (left, right) fibre of the columns of x,
// where x has local^modes rows.
void apply_two_site(Matrix& x, const Matrix& u, int local, int modes, int site) {
  if (site < 0 || site + 1 >= modes) throw DomainError("gate site outside the mode range");
  const std::int64_t right = ipow(local, modes - site - 2);
  const std::int64_t left = ipow(local, site);
  const std::int64_t pair = static_cast<std::int64_t>(local) * local;
  Matrix fibre(pair, x.cols());
  for (std::int64_t l = 0; l < left; ++l) {
    for (std::int64_t r = 0; r < right; ++r) {
      for (std::int64_t p = 0; p < pair; ++p) fibre.row(p) = x.row((l * pair + p) * right + r);
      fibre = u * fibre;
      for (std::int64_t p = 0; p < pair; ++p) x.row((l * pair + p) * right + r) = fibre.row(p);
    }
  }
}

void apply_one_site(Matrix& x, const Matrix& k, int local, int modes, int site) {
  const std::int64_t right = ipow(local, modes - site - 1);
  const std::int64_t left = ipow(local, site);
  Matrix fibre(local, x.cols());
  for (std::int64_t l = 0; l < left; ++l) {
    for (std::int64_t r = 0; r < right; ++r) {
      for (int p = 0; p < local; ++p) fibre.row(p) = x.row((l * local + p) * right + r);
      fibre = k * fibre;
      for (int p = 0; p < local; ++p) x.row((l * local + p) * right + r) = fibre.row(p);
    }
  }
}

int photons(const std::vector<int>& tuple) {
  int n = 0;
  for (int x : tuple) n += x;
  return n;
}

double schmidt_entropy(const Vector& v, std::int64_t rows, std::int64_t cols) {
  Matrix m = Eigen::Map<const Matrix>(v.data(), rows, cols);
  Eigen::BDCSVD<Matrix> svd(m);
  std::vector<double> w;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()[i];
    w.push_back(s * s);
  }
  return entropy_bits(w);
}

}  // namespace

std::int64_t DenseFockState::index_of(const std::vector<int>& tuple) const {
  if (static_cast<int>(tuple.size()) != modes) throw DimensionError("tuple length differs from mode count");
  std::int64_t idx = 0;
  for (int x : tuple) {
    if (x < 0 || x >= local) throw TruncationError("occupation outside the local space");
    idx = idx * local + x;
  }
  return idx;
}

std::vector<int> DenseFockState::tuple_of(std::int64_t index) const {
  std::vector<int> t(modes);
  for (int k = modes - 1; k >= 0; --k) {
    t[k] = static_cast<int>(index % local);
    index /= local;
  }
  return t;
}

DenseFockState dense_product(const std::vector<Vector>& sites) {
  if (sites.empty()) throw DomainError("need at least one mode");
  const int local = static_cast<int>(sites[0].size());
  guard_state(local, static_cast<int>(sites.size()));
  Vector v = Vector::Ones(1);
  for (const Vector& s : sites) {
    if (s.size() != local) throw DimensionError("all modes must share one local dimension");
    Vector next(v.size() * local);
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * local, local) = v[i] * s;
    v = std::move(next);
  }
  return {static_cast<int>(sites.size()), local, std::move(v)};
}

DenseFockState dense_fock(const std::vector<int>& pattern, int d) {
  std::vector<Vector> sites;
  for (int n : pattern) {
    if (n < 0 || n >= d) throw TruncationError("occupation does not fit local dimension");
    Vector v = Vector::Zero(d);
    v[n] = 1.0;
    sites.push_back(std::move(v));
  }
  return dense_product(sites);
}

DenseDensity dense_product_density(const std::vector<Matrix>& sites) {
  if (sites.empty()) throw DomainError("need at least one mode");
  const int d = static_cast<int>(sites[0].rows());
  guard_density(d, static_cast<int>(sites.size()));
  Matrix rho = Matrix::Ones(1, 1);
  for (const Matrix& s : sites) {
    if (s.rows() != d || s.cols() != d) throw DimensionError("all modes must share one local dimension");
    Matrix next(rho.rows() * d, rho.cols() * d);
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
      for (Eigen::Index j = 0; j < rho.cols(); ++j) next.block(i * d, j * d, d, d) = rho(i, j) * s;
    rho = std::move(next);
  }
  return {static_cast<int>(sites.size()), d, std::move(rho)};
}

DenseDensity dense_pure_density(const DenseFockState& s) {
  guard_density(s.local, s.modes);
  return {s.modes, s.local, s.amplitudes * s.amplitudes.adjoint()};
}

void dense_apply_gate(DenseFockState& s, const FockGate& gate, int site) {
  if (gate.phys().dim() != s.local) throw DimensionError("gate local dimension differs from the state");
  Matrix x = s.amplitudes;
  apply_two_site(x, gate.to_dense(), s.local, s.modes, site);
  s.amplitudes = x.col(0);
}

void dense_apply_gate(DenseDensity& r, const FockGate& gate, int site) {
  if (gate.doubled() || gate.dim() != r.d) throw DimensionError("gate local dimension differs from the density");
  const Matrix u = gate.to_dense();
  apply_two_site(r.rho, u, r.d, r.modes, site);
  Matrix t = r.rho.adjoint();
  apply_two_site(t, u, r.d, r.modes, site);
  r.rho = t.adjoint();
}

void dense_apply_channel(DenseDensity& r, const LossChannel& ch, int site) {
  if (ch.n_max + 1 != r.d) throw DimensionError("channel n_max + 1 must equal the local dimension");
  if (site < 0 || site >= r.modes) throw DomainError("channel site outside the mode range");
  Matrix out = Matrix::Zero(r.rho.rows(), r.rho.cols());
  for (const Matrix& k : ch.kraus) {
    Matrix x = r.rho;
    apply_one_site(x, k, r.d, r.modes, site);
    Matrix t = x.adjoint();
    apply_one_site(t, k, r.d, r.modes, site);
    out += t.adjoint();
  }
  r.rho = std::move(out);
}

void project_total(DenseFockState& s, int cap) {
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
    if (photons(s.tuple_of(i)) > cap) s.amplitudes[i] = 0.0;
  }
}

void project_total(DenseDensity& r, int cap) {
  DenseFockState probe{r.modes, r.d, {}};
  std::vector<bool> drop(r.rho.rows());
  for (Eigen::Index i = 0; i < r.rho.rows(); ++i) drop[i] = photons(probe.tuple_of(i)) > cap;
  for (Eigen::Index i = 0; i < r.rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.rho.cols(); ++j) {
      if (drop[i] || drop[j]) r.rho(i, j) = 0.0;
    }
  }
}

DenseFockState vectorize(const DenseDensity& r) {
  const int d = r.d;
  DenseFockState out{r.modes, d * d, Vector::Zero(r.rho.size())};
  DenseFockState probe{r.modes, d, {}};
  for (Eigen::Index i = 0; i < r.rho.rows(); ++i) {
    const auto ti = probe.tuple_of(i);
    for (Eigen::Index j = 0; j < r.rho.cols(); ++j) {
      const auto tj = probe.tuple_of(j);
      std::int64_t idx = 0;
      for (int k = 0; k < r.modes; ++k) idx = idx * d * d + ti[k] * d + tj[k];
      out.amplitudes[idx] = r.rho(i, j);
    }
  }
  return out;
}

DenseDensity unvectorize(const DenseFockState& v, int d) {
  if (v.local != d * d) throw DimensionError("vectorized local dimension must be d^2");
  const std::int64_t dim = ipow(d, v.modes);
  DenseDensity out{v.modes, d, Matrix::Zero(dim, dim)};
  for (Eigen::Index idx = 0; idx < v.amplitudes.size(); ++idx) {
    const auto t = v.tuple_of(idx);
    std::int64_t i = 0, j = 0;
    for (int k = 0; k < v.modes; ++k) {
      i = i * d + t[k] / d;
      j = j * d + t[k] % d;
    }
    out.rho(i, j) = v.amplitudes[idx];
  }
  return out;
}

double dense_norm_squared(const DenseFockState& s) { return s.amplitudes.squaredNorm(); }

double dense_entropy(const DenseFockState& s, int l) {
  if (l < 1 || l >= s.modes) throw DomainError("cut outside [1, M-1]");
  return schmidt_entropy(s.amplitudes, ipow(s.local, l), ipow(s.local, s.modes - l));
}

double dense_entropy(const DenseDensity& r, int l) { return dense_entropy(vectorize(r), l); }

}  // namespace tnbs
