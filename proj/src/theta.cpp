#include "tnbs/theta.hpp"

#include <map>
#include <set>

namespace tnbs {

namespace {

using RealMap = Eigen::Map<const Eigen::VectorXd>;

RealMap lambda_segment(std::span<const double> lambda, const Segment& s) {
  return RealMap(lambda.data() + s.offset, static_cast<Eigen::Index>(s.size));
}

ThetaSlice slice_layout(const ThetaInputs& in, Charge c) {
  const PhysicalSpace& phys = in.gamma_left.phys();
  ThetaSlice out;
  out.center = c;
  std::size_t rows = 0, cols = 0;
  for (const Segment& a : in.gamma_left.left_map().segments()) {
    if (!phys.index_of(a.charge - c)) continue;
    out.row_blocks.push_back({a.charge, a.offset, a.size, rows});
    rows += a.size;
  }
  for (const Segment& b : in.gamma_right.right_map().segments()) {
    if (!phys.index_of(c - b.charge)) continue;
    out.col_blocks.push_back({b.charge, b.offset, b.size, cols});
    cols += b.size;
  }
  out.data = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return out;
}

void check_center(const ThetaInputs& in, Charge c) {
  Charge top{0, 0};
  for (const Segment& s : in.gamma_left.left_map().segments()) {
    top.first = std::max(top.first, s.charge.first);
    top.second = std::max(top.second, s.charge.second);
  }
  if (!c.nonnegative() || !c.fits_within(top)) {
    throw DomainError("centre charge " + to_string(c) + " outside [0, " + to_string(top) + "]");
  }
}

}  // namespace

void validate(const ThetaInputs& in) {
  if (!(in.gamma_left.right_map() == in.gamma_right.left_map())) {
    throw ConsistencyError("middle bond of the two site tensors differs");
  }
  if (in.lambda_left.size() != in.gamma_left.left_map().dim() ||
      in.lambda_mid.size() != in.gamma_left.right_map().dim() ||
      in.lambda_right.size() != in.gamma_right.right_map().dim()) {
    throw ConsistencyError("singular value vectors do not match bond dimensions");
  }
  if (!(in.gamma_left.phys() == in.gamma_right.phys()) || !(in.gate.phys() == in.gamma_left.phys())) {
    throw ConsistencyError("gate and site tensors use different physical spaces");
  }
}

std::vector<Charge> center_charges(const ThetaInputs& in) {
  validate(in);
  const PhysicalSpace& phys = in.gamma_left.phys();
  const auto& right = in.gamma_right.right_map().segments();
  std::set<Charge> out;
  for (const Segment& a : in.gamma_left.left_map().segments()) {
    for (int p = 0; p < phys.dim(); ++p) {
      const Charge c = a.charge - phys.charge_of(p);
      if (!c.nonnegative() || out.count(c)) continue;
      for (const Segment& b : right) {
        if (phys.index_of(c - b.charge)) {
          out.insert(c);
          break;
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

ThetaSlice assemble_theta_naive(const ThetaInputs& in, Charge c) {
  validate(in);
  check_center(in, c);
  ThetaSlice out = slice_layout(in, c);
  const auto& mid = in.gamma_left.right_map().segments();
  for (const SliceBlock& rb : out.row_blocks) {
    for (const SliceBlock& cb : out.col_blocks) {
      for (const Segment& m : mid) {
        const Matrix* gl = in.gamma_left.block(rb.charge, m.charge);
        const Matrix* gr = in.gamma_right.block(m.charge, cb.charge);
        if (!gl || !gr) continue;
        const cplx g = in.gate.element(rb.charge - c, c - cb.charge, rb.charge - m.charge, m.charge - cb.charge);
        if (g == cplx(0.0)) continue;
        for (std::size_t x = 0; x < rb.size; ++x) {
          const double la = in.lambda_left[rb.bond_offset + x];
          for (std::size_t y = 0; y < cb.size; ++y) {
            const double lb = in.lambda_right[cb.bond_offset + y];
            cplx acc = 0.0;
            for (std::size_t z = 0; z < m.size; ++z) {
              acc += (*gl)(x, z) * in.lambda_mid[m.offset + z] * (*gr)(z, y);
            }
            out.data(rb.offset + x, cb.offset + y) += g * la * acc * lb;
          }
        }
      }
    }
  }
  return out;
}

ThetaSlice assemble_theta_blocked(const ThetaInputs& in, Charge c) {
  validate(in);
  check_center(in, c);
  ThetaSlice out = slice_layout(in, c);
  const auto& left = in.gamma_left.left_map();
  const auto& right = in.gamma_right.right_map();
  const auto& mid = in.gamma_left.right_map().segments();
  for (const SliceBlock& rb : out.row_blocks) {
    const Segment* sa = left.find(rb.charge);
    for (const SliceBlock& cb : out.col_blocks) {
      const Segment* sb = right.find(cb.charge);
      Matrix acc = Matrix::Zero(rb.size, cb.size);
      for (const Segment& m : mid) {
        const Matrix* gl = in.gamma_left.block(rb.charge, m.charge);
        const Matrix* gr = in.gamma_right.block(m.charge, cb.charge);
        if (!gl || !gr) continue;
        const cplx g = in.gate.element(rb.charge - c, c - cb.charge, rb.charge - m.charge, m.charge - cb.charge);
        if (g == cplx(0.0)) continue;
        acc.noalias() += g * ((*gl) * lambda_segment(in.lambda_mid, m).asDiagonal()) * (*gr);
      }
      out.data.block(rb.offset, cb.offset, rb.size, cb.size) =
          lambda_segment(in.lambda_left, *sa).asDiagonal() * acc * lambda_segment(in.lambda_right, *sb).asDiagonal();
    }
  }
  return out;
}

std::vector<ThetaSlice> assemble_theta_all(const ThetaInputs& in, double* input_norm2) {
  const std::vector<Charge> centers = center_charges(in);
  std::vector<ThetaSlice> slices;
  std::map<Charge, std::size_t> slice_of;
  std::vector<std::map<Charge, const SliceBlock*>> row_of(centers.size()), col_of(centers.size());
  slices.reserve(centers.size());
  for (Charge c : centers) {
    slice_of[c] = slices.size();
    slices.push_back(slice_layout(in, c));
  }
  for (std::size_t i = 0; i < slices.size(); ++i) {
    for (const SliceBlock& b : slices[i].row_blocks) row_of[i][b.charge] = &b;
    for (const SliceBlock& b : slices[i].col_blocks) col_of[i][b.charge] = &b;
  }

  const PhysicalSpace& phys = in.gamma_left.phys();
  const auto& lsegs = in.gamma_left.left_map().segments();
  const auto& rsegs = in.gamma_right.right_map().segments();
  const auto& mid = in.gamma_left.right_map().segments();
  const auto n_left = static_cast<std::ptrdiff_t>(lsegs.size());
  double norm2 = 0.0;

  // Each left segment only writes its own rows of every slice, so the loop
  // over left segments is race free.
#pragma omp parallel for schedule(dynamic) reduction(+ : norm2)
  for (std::ptrdiff_t ia = 0; ia < n_left; ++ia) {
    const Segment& a = lsegs[ia];
    const auto la = lambda_segment(in.lambda_left, a);
    for (const Segment& b : rsegs) {
      const GateBlock* gb = in.gate.block(a.charge - b.charge);
      if (!gb) continue;
      const auto lb = lambda_segment(in.lambda_right, b);
      for (const Segment& m : mid) {
        const Matrix* gl = in.gamma_left.block(a.charge, m.charge);
        const Matrix* gr = in.gamma_right.block(m.charge, b.charge);
        if (!gl || !gr) continue;
        const int col = gb->index_of(a.charge - m.charge);
        if (col < 0) continue;
        Matrix p = la.asDiagonal() * ((*gl) * lambda_segment(in.lambda_mid, m).asDiagonal()) * (*gr) *
                   lb.asDiagonal();
        norm2 += p.squaredNorm();
        for (int q = 0; q < phys.dim(); ++q) {
          const Charge c = a.charge - phys.charge_of(q);
          auto it = slice_of.find(c);
          if (it == slice_of.end()) continue;
          const std::size_t s = it->second;
          auto rit = row_of[s].find(a.charge);
          auto cit = col_of[s].find(b.charge);
          if (rit == row_of[s].end() || cit == col_of[s].end()) continue;
          const int row = gb->index_of(a.charge - c);
          if (row < 0) continue;
          const cplx g = gb->matrix(row, col);
          if (g == cplx(0.0)) continue;
          slices[s].data.block(rit->second->offset, cit->second->offset, a.size, b.size) += g * p;
        }
      }
    }
  }
  if (input_norm2) *input_norm2 = norm2;
  return slices;
}

}  // namespace tnbs
