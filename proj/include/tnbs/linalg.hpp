#pragma once

#include <span>
#include <vector>

#include "tnbs/charge.hpp"

namespace tnbs {

/// Eigenvalues at or above this (negated) are clipped to zero before an
/// entropy is taken.
inline constexpr double kNegativeClip = 1e-12;

/// −Σ p log₂ p of the weights after renormalizing them to sum 1.
/// Negative weights down to -kNegativeClip count as zero; anything more
/// negative or an all-zero input is a DomainError.
double entropy_bits(std::span<const double> weights);

/// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const Matrix& h);

/// Principal square root of a Hermitian positive semidefinite matrix;
/// negative eigenvalues are clipped to zero.
Matrix psd_sqrt(const Matrix& h);

}  // namespace tnbs
