#include "tnbs/sym_tensor.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/SVD>

namespace tnbs {

BondChargeMap::BondChargeMap(std::vector<Charge> charges, std::vector<bool> padding)
    : charges_(std::move(charges)), padding_(std::move(padding)) {
  if (!padding_.empty() && padding_.size() != charges_.size()) {
    throw DimensionError("padding mask length does not match bond dimension");
  }
  if (std::none_of(padding_.begin(), padding_.end(), [](bool b) { return b; })) padding_.clear();
  sorted_ = std::is_sorted(charges_.begin(), charges_.end());
  if (!sorted_) return;
  for (std::size_t i = 0; i < charges_.size(); ++i) {
    if (segments_.empty() || segments_.back().charge != charges_[i]) {
      segments_.push_back({charges_[i], i, 0});
    }
    ++segments_.back().size;
  }
}

bool BondChargeMap::has_padding() const { return !padding_.empty(); }

const std::vector<Segment>& BondChargeMap::segments() const {
  if (!sorted_) throw ConsistencyError("bond charges are not sorted");
  return segments_;
}

const Segment* BondChargeMap::find(Charge c) const {
  const auto& segs = segments();
  auto it = std::lower_bound(segs.begin(), segs.end(), c,
                             [](const Segment& s, Charge q) { return s.charge < q; });
  if (it == segs.end() || it->charge != c) return nullptr;
  return &*it;
}

std::vector<std::size_t> charge_sort_permutation(const BondChargeMap& map) {
  std::vector<std::size_t> perm(map.dim());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return map.charge(a) < map.charge(b); });
  return perm;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size()) throw DimensionError("permutation entry out of range");
    inv[perm[i]] = i;
  }
  return inv;
}

ChargeBlockTensor::ChargeBlockTensor(BondChargeMap left, BondChargeMap right, PhysicalSpace phys)
    : left_(std::move(left)), right_(std::move(right)), phys_(phys) {
  if (!left_.is_sorted() || !right_.is_sorted()) {
    throw ConsistencyError("block tensor bonds must be sorted by charge");
  }
}

void ChargeBlockTensor::set_block(Charge a, Charge b, Matrix m) {
  const Segment* sa = left_.find(a);
  const Segment* sb = right_.find(b);
  if (!sa || !sb) {
    throw ConsistencyError("sector " + to_string(a) + "->" + to_string(b) + " has no matching bond segment");
  }
  if (!phys_.index_of(a - b)) {
    throw ConsistencyError("sector " + to_string(a) + "->" + to_string(b) + " carries no physical charge");
  }
  if (static_cast<std::size_t>(m.rows()) != sa->size || static_cast<std::size_t>(m.cols()) != sb->size) {
    throw DimensionError("block shape does not match bond segments for sector " + to_string(a) + "->" +
                         to_string(b));
  }
  blocks_[{a, b}] = std::move(m);
}

const Matrix* ChargeBlockTensor::block(Charge a, Charge b) const {
  auto it = blocks_.find({a, b});
  return it == blocks_.end() ? nullptr : &it->second;
}

Matrix ChargeBlockTensor::dense_slice(int p) const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(left_.dim()), static_cast<Eigen::Index>(right_.dim()));
  const Charge q = phys_.charge_of(p);
  for (const auto& [key, m] : blocks_) {
    if (key.first - key.second != q) continue;
    const Segment* sa = left_.find(key.first);
    const Segment* sb = right_.find(key.second);
    out.block(sa->offset, sb->offset, sa->size, sb->size) = m;
  }
  return out;
}

std::vector<Matrix> ChargeBlockTensor::to_dense() const {
  std::vector<Matrix> out;
  out.reserve(phys_.dim());
  for (int p = 0; p < phys_.dim(); ++p) out.push_back(dense_slice(p));
  return out;
}

ChargeBlockTensor ChargeBlockTensor::from_dense(std::span<const Matrix> slices, BondChargeMap left,
                                                BondChargeMap right, PhysicalSpace phys) {
  if (slices.size() != static_cast<std::size_t>(phys.dim())) {
    throw DimensionError("expected one dense slice per physical index");
  }
  ChargeBlockTensor t(std::move(left), std::move(right), phys);
  for (int p = 0; p < phys.dim(); ++p) {
    const Matrix& s = slices[p];
    if (static_cast<std::size_t>(s.rows()) != t.left_.dim() ||
        static_cast<std::size_t>(s.cols()) != t.right_.dim()) {
      throw DimensionError("dense slice shape does not match bonds");
    }
    Matrix rest = s;
    const Charge q = phys.charge_of(p);
    for (const Segment& sa : t.left_.segments()) {
      const Segment* sb = t.right_.find(sa.charge - q);
      if (!sb) continue;
      auto region = rest.block(sa.offset, sb->offset, sa.size, sb->size);
      if ((region.array() != cplx(0.0)).any()) t.blocks_[{sa.charge, sb->charge}] = region;
      region.setZero();
    }
    if ((rest.array() != cplx(0.0)).any()) {
      throw ConsistencyError("dense slice " + std::to_string(p) + " has entries outside allowed charge sectors");
    }
  }
  return t;
}

double ChargeBlockTensor::squared_norm() const {
  double s = 0.0;
  for (const auto& [key, m] : blocks_) s += m.squaredNorm();
  return s;
}

BondChargeMap pad_map(const BondChargeMap& map, int fragment) {
  if (fragment < 1) throw DomainError("padding fragment must be positive");
  std::vector<Charge> charges;
  std::vector<bool> padding;
  for (const Segment& s : map.segments()) {
    const std::size_t f = static_cast<std::size_t>(fragment);
    const std::size_t padded = (s.size + f - 1) / f * f;
    for (std::size_t i = 0; i < padded; ++i) {
      charges.push_back(s.charge);
      padding.push_back(i >= s.size || map.is_padding(s.offset + i));
    }
  }
  return BondChargeMap(std::move(charges), std::move(padding));
}

PaddedBond pad_bond(const BondChargeMap& map, std::span<const double> lambda, int fragment) {
  if (lambda.size() != map.dim()) throw DimensionError("lambda length does not match bond dimension");
  PaddedBond out{pad_map(map, fragment), {}};
  out.lambda.reserve(out.map.dim());
  for (const Segment& s : map.segments()) {
    const Segment* ps = out.map.find(s.charge);
    for (std::size_t i = 0; i < ps->size; ++i) out.lambda.push_back(i < s.size ? lambda[s.offset + i] : 0.0);
  }
  return out;
}

ChargeBlockTensor pad_blocks_to_multiple(const ChargeBlockTensor& t, int fragment) {
  ChargeBlockTensor out(pad_map(t.left_map(), fragment), pad_map(t.right_map(), fragment), t.phys());
  for (const auto& [key, m] : t.blocks()) {
    const Segment* sa = out.left_map().find(key.first);
    const Segment* sb = out.right_map().find(key.second);
    Matrix padded = Matrix::Zero(sa->size, sb->size);
    padded.topLeftCorner(m.rows(), m.cols()) = m;
    out.set_block(key.first, key.second, std::move(padded));
  }
  return out;
}

namespace {

// Keeps the non-padding part of each slice block and re-bases offsets onto
// the unpadded bond.
std::vector<std::size_t> kept_positions(const std::vector<SliceBlock>& blocks, const BondChargeMap& padded,
                                        std::vector<SliceBlock>& stripped) {
  std::vector<std::size_t> keep;
  stripped.clear();
  std::vector<std::size_t> real_before(padded.dim() + 1, 0);
  for (std::size_t i = 0; i < padded.dim(); ++i) real_before[i + 1] = real_before[i] + (padded.is_padding(i) ? 0 : 1);
  std::size_t offset = 0;
  for (const SliceBlock& b : blocks) {
    SliceBlock nb{b.charge, real_before[b.bond_offset], 0, offset};
    for (std::size_t i = 0; i < b.size; ++i) {
      if (padded.is_padding(b.bond_offset + i)) continue;
      keep.push_back(b.offset + i);
      ++nb.size;
    }
    offset += nb.size;
    stripped.push_back(nb);
  }
  return keep;
}

}  // namespace

ThetaSlice strip_padding(const ThetaSlice& slice, const BondChargeMap& padded_left,
                         const BondChargeMap& padded_right) {
  ThetaSlice out;
  out.center = slice.center;
  auto rows = kept_positions(slice.row_blocks, padded_left, out.row_blocks);
  auto cols = kept_positions(slice.col_blocks, padded_right, out.col_blocks);
  out.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out.data(i, j) = slice.data(rows[i], cols[j]);
  }
  return out;
}

GlobalTruncation truncated_svd_global(std::span<const ThetaSlice> slices, std::size_t chi, bool pair_conjugates) {
  const auto n = static_cast<std::ptrdiff_t>(slices.size());
  std::vector<Eigen::BDCSVD<Matrix>> svds(slices.size());
  std::vector<int> failed(slices.size(), 0);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Matrix& m = slices[i].data;
    if (m.size() == 0) continue;
    if (!m.allFinite()) {
      failed[i] = 1;
      continue;
    }
    svds[i].compute(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svds[i].info() != Eigen::Success || !svds[i].singularValues().allFinite()) failed[i] = 2;
  }
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (failed[i] == 1) throw NumericalError("non-finite entries in theta slice", to_string(slices[i].center));
    if (failed[i] == 2) throw NumericalError("SVD did not converge", to_string(slices[i].center));
  }

  GlobalTruncation out;
  double below_floor = 0.0;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].data.size() == 0) continue;
    const auto& sv = svds[i].singularValues();
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
      if (sv[j] > kSingularFloor) {
        out.spectrum.entries.push_back({sv[j], slices[i].center, static_cast<std::size_t>(j)});
      } else {
        below_floor += sv[j] * sv[j];
      }
    }
  }
  auto& entries = out.spectrum.entries;
  std::sort(entries.begin(), entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.charge != b.charge) return a.charge < b.charge;
    return a.index < b.index;
  });
  out.spectrum.retained_count = std::min(chi, entries.size());
  if (pair_conjugates) {
    std::map<std::pair<Charge, std::size_t>, std::size_t> pos;
    for (std::size_t i = 0; i < entries.size(); ++i) pos[{entries[i].charge, entries[i].index}] = i;
    std::vector<char> drop(entries.size(), 0);
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < out.spectrum.retained_count; ++i) {
      const Charge c = entries[i].charge;
      if (c.first == c.second) continue;
      const auto it = pos.find({Charge(c.second, c.first), entries[i].index});
      if (it == pos.end() || it->second < out.spectrum.retained_count) continue;
      const double a = entries[i].value, b = entries[it->second].value;
      if (std::abs(a - b) <= kConjugateTieTolerance * std::max(a, b)) {
        drop[i] = 1;
        ++dropped;
      }
    }
    if (dropped > 0) {
      std::vector<SpectrumEntry> kept_first, rest;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        (i < out.spectrum.retained_count && !drop[i] ? kept_first : rest).push_back(entries[i]);
      }
      out.spectrum.retained_count = kept_first.size();
      kept_first.insert(kept_first.end(), rest.begin(), rest.end());
      entries = std::move(kept_first);
    }
  }
  double discarded = below_floor;
  for (std::size_t i = out.spectrum.retained_count; i < entries.size(); ++i) {
    discarded += entries[i].value * entries[i].value;
  }
  out.spectrum.discarded_weight = discarded;

  std::map<Charge, std::size_t> kept;
  for (const auto& e : out.spectrum.retained()) ++kept[e.charge];

  std::vector<Charge> bond;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    auto it = kept.find(slices[i].center);
    if (it == kept.end()) continue;
    const auto k = static_cast<Eigen::Index>(it->second);
    SliceFactors f;
    f.center = slices[i].center;
    f.left = svds[i].matrixU().leftCols(k);
    f.values = svds[i].singularValues().head(k);
    f.right = svds[i].matrixV().leftCols(k).adjoint();
    out.factors.push_back(std::move(f));
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const SliceFactors& a, const SliceFactors& b) { return a.center < b.center; });
  for (const auto& f : out.factors) {
    for (Eigen::Index j = 0; j < f.values.size(); ++j) {
      bond.push_back(f.center);
      out.lambda.push_back(f.values[j]);
    }
  }
  out.bond = BondChargeMap(std::move(bond));
  return out;
}

}  // namespace tnbs
