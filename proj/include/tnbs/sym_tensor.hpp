#pragma once

// Charge-blocked storage for U(1)-symmetric tensors and the global
// truncated SVD across charge sectors.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tnbs/charge.hpp"
#include "tnbs/errors.hpp"

namespace tnbs {

inline constexpr int kDefaultFragment = 8;
/// Singular values at or below this are treated as zero and never kept.
inline constexpr double kSingularFloor = 1e-14;
/// Relative gap below which singular values of swapped sectors count as equal.
inline constexpr double kConjugateTieTolerance = 1e-10;

/// Contiguous run of bond indices sharing one charge.
struct Segment {
  Charge charge;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Charge label of every index of one bond.
///
/// Segments are only available once the labels are sorted; every tensor in
/// the engine stores sorted bonds. Padding flags mark zero bonds inserted by
/// `pad_bond`.
class BondChargeMap {
 public:
  BondChargeMap() = default;
  explicit BondChargeMap(std::vector<Charge> charges, std::vector<bool> padding = {});

  static BondChargeMap single(Charge c) { return BondChargeMap({c}); }

  std::size_t dim() const { return charges_.size(); }
  const std::vector<Charge>& charges() const { return charges_; }
  Charge charge(std::size_t i) const { return charges_[i]; }

  bool is_sorted() const { return sorted_; }
  bool is_padding(std::size_t i) const { return !padding_.empty() && padding_[i]; }
  bool has_padding() const;

  /// Throws ConsistencyError if the labels are not sorted.
  const std::vector<Segment>& segments() const;
  /// Segment for charge `c`, or nullptr.
  const Segment* find(Charge c) const;

  bool operator==(const BondChargeMap& o) const {
    return charges_ == o.charges_ && padding_ == o.padding_;
  }

 private:
  std::vector<Charge> charges_;
  std::vector<bool> padding_;
  std::vector<Segment> segments_;
  bool sorted_ = true;
};

/// Stable permutation that sorts the labels: entry i is the original index
/// of the i-th sorted bond.
std::vector<std::size_t> charge_sort_permutation(const BondChargeMap& map);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

template <class T>
std::vector<T> apply_permutation(std::span<const T> payload, std::span<const std::size_t> perm) {
  if (payload.size() != perm.size()) {
    throw DimensionError("payload length does not match permutation length");
  }
  std::vector<T> out;
  out.reserve(payload.size());
  for (std::size_t i : perm) out.push_back(payload[i]);
  return out;
}

/// Sorts a bond by charge. `payload` holds one entry per bond index and is
/// only used to check that it matches the bond; align it afterwards with
/// `apply_permutation`.
template <class T>
std::pair<BondChargeMap, std::vector<std::size_t>> sort_bonds_by_charge(const BondChargeMap& map,
                                                                        std::span<const T> payload) {
  if (payload.size() != map.dim()) {
    throw DimensionError("payload has " + std::to_string(payload.size()) + " entries for a bond of dimension " +
                         std::to_string(map.dim()));
  }
  auto perm = charge_sort_permutation(map);
  std::vector<Charge> sorted;
  sorted.reserve(perm.size());
  std::vector<bool> padding;
  for (std::size_t i : perm) sorted.push_back(map.charge(i));
  if (map.has_padding()) {
    for (std::size_t i : perm) padding.push_back(map.is_padding(i));
  }
  return {BondChargeMap(std::move(sorted), std::move(padding)), std::move(perm)};
}

/// Block-sparse tensor Γ^{p}_{αβ} between two charged bonds.
///
/// A block for sector (a, b) exists only when a - b is the charge of some
/// physical index p; the physical index is then implied by the sector, so each
/// block is a plain dense matrix over the two bond segments.
class ChargeBlockTensor {
 public:
  using SectorKey = std::pair<Charge, Charge>;

  ChargeBlockTensor(BondChargeMap left, BondChargeMap right, PhysicalSpace phys);

  const BondChargeMap& left_map() const { return left_; }
  const BondChargeMap& right_map() const { return right_; }
  const PhysicalSpace& phys() const { return phys_; }

  void set_block(Charge left, Charge right, Matrix block);
  const Matrix* block(Charge left, Charge right) const;
  const std::map<SectorKey, Matrix>& blocks() const { return blocks_; }

  std::optional<int> physical_index(Charge left, Charge right) const {
    return phys_.index_of(left - right);
  }

  /// Dense Γ^{p} as a (left dim) x (right dim) matrix.
  Matrix dense_slice(int p) const;
  std::vector<Matrix> to_dense() const;
  /// Re-blocks dense slices; nonzero entries outside allowed sectors are an error.
  static ChargeBlockTensor from_dense(std::span<const Matrix> slices, BondChargeMap left, BondChargeMap right,
                                      PhysicalSpace phys);

  double squared_norm() const;

 private:
  BondChargeMap left_;
  BondChargeMap right_;
  PhysicalSpace phys_;
  std::map<SectorKey, Matrix> blocks_;
};

/// Bond with zero-weight padding bonds appended to every charge segment.
struct PaddedBond {
  BondChargeMap map;
  std::vector<double> lambda;
};

PaddedBond pad_bond(const BondChargeMap& map, std::span<const double> lambda, int fragment);
BondChargeMap pad_map(const BondChargeMap& map, int fragment);

/// Inserts zero bonds on both sides so every charge segment length is a
/// multiple of `fragment`. Contractions through the padded tensor are
/// unchanged.
ChargeBlockTensor pad_blocks_to_multiple(const ChargeBlockTensor& tensor, int fragment = kDefaultFragment);

struct SpectrumEntry {
  double value = 0.0;
  Charge charge;
  std::size_t index = 0;  // position inside its own slice spectrum
};

/// Singular values of all slices in global rank order (value descending,
/// then charge ascending, then in-slice index ascending).
struct SingularSpectrum {
  std::vector<SpectrumEntry> entries;
  std::size_t retained_count = 0;
  double discarded_weight = 0.0;

  std::span<const SpectrumEntry> retained() const { return {entries.data(), retained_count}; }
};

/// Placement of one bond segment inside a Θ slice.
struct SliceBlock {
  Charge charge;
  std::size_t bond_offset = 0;  // first index of the segment in the bond
  std::size_t size = 0;
  std::size_t offset = 0;  // first row (or column) in the slice
};

/// Θ(c): rows run over (α_{k-1}, i_k) and columns over (α_{k+1}, i_{k+1})
/// for one centre charge c. The physical indices are implied by the charges.
struct ThetaSlice {
  Charge center;
  Matrix data;
  std::vector<SliceBlock> row_blocks;
  std::vector<SliceBlock> col_blocks;

  double squared_norm() const { return data.squaredNorm(); }
};

/// Removes rows and columns that belong to padding bonds. Offsets of the
/// result refer to the unpadded bonds.
ThetaSlice strip_padding(const ThetaSlice& slice, const BondChargeMap& padded_left,
                         const BondChargeMap& padded_right);

struct SliceFactors {
  Charge center;
  Matrix left;            // rows x kept, orthonormal columns
  Eigen::VectorXd values;  // kept singular values, descending
  Matrix right;           // kept x cols, orthonormal rows
};

struct GlobalTruncation {
  std::vector<SliceFactors> factors;  // ascending centre charge, only slices that kept something
  SingularSpectrum spectrum;
  BondChargeMap bond;           // new middle bond, sorted
  std::vector<double> lambda;   // aligned with `bond`
};

/// SVDs every slice independently, then keeps the global top-`chi` singular
/// values across all slices. With `pair_conjugates`, a kept value whose
/// partner in the swapped sector (b,a) has the same value and index but falls
/// outside the cut is dropped as well, so a Hermitian operator stays
/// Hermitian.
GlobalTruncation truncated_svd_global(std::span<const ThetaSlice> slices, std::size_t chi,
                                      bool pair_conjugates = false);

}  // namespace tnbs
