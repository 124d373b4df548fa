#include "tnbs/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tnbs/errors.hpp"

namespace tnbs {

double entropy_bits(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w > 0.0) total += w;
  }
  for (double w : weights) {
    if (w < -kNegativeClip * std::max(1.0, total)) {
      throw DomainError("negative weight " + std::to_string(w) + " in spectrum");
    }
  }
  if (!(total > 0.0)) throw DomainError("all-zero spectrum has no entropy");
  double s = 0.0;
  for (double w : weights) {
    if (w <= 0.0) continue;
    const double p = w / total;
    s -= p * std::log2(p);
  }
  return s;
}

std::vector<double> hermitian_eigenvalues(const Matrix& h) {
  if (h.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed", "dense");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Matrix psd_sqrt(const Matrix& h) {
  if (h.size() == 0) return h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed", "dense");
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace tnbs
