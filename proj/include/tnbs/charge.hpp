#pragma once

#include <compare>
#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace tnbs {

using cplx = std::complex<double>;
// Dense blocks are row-major complex double throughout.
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;

/// Photon-number charge carried by a bond.
///
/// Pure states use only `first`; vectorized density operators carry the
/// ket charge in `first` and the bra charge in `second`. Ordering is
/// lexicographic, which is also the bond sorting order.
struct Charge {
  int first = 0;
  int second = 0;

  constexpr Charge() = default;
  constexpr explicit Charge(int c) : first(c) {}
  constexpr Charge(int c1, int c2) : first(c1), second(c2) {}

  constexpr auto operator<=>(const Charge&) const = default;

  constexpr Charge operator+(Charge o) const { return {first + o.first, second + o.second}; }
  constexpr Charge operator-(Charge o) const { return {first - o.first, second - o.second}; }

  constexpr bool nonnegative() const { return first >= 0 && second >= 0; }
  /// Componentwise `<=`.
  constexpr bool fits_within(Charge cap) const {
    return first <= cap.first && second <= cap.second;
  }
};

std::string to_string(Charge c);

/// Local Hilbert space of one site: occupations 0..d-1, or ordered pairs
/// of them for a vectorized operator (index p = i * d + i').
class PhysicalSpace {
 public:
  PhysicalSpace(int d, bool doubled);

  int local_dim() const { return d_; }
  int dim() const { return doubled_ ? d_ * d_ : d_; }
  bool doubled() const { return doubled_; }

  Charge charge_of(int p) const {
    return doubled_ ? Charge(p / d_, p % d_) : Charge(p);
  }
  /// Physical index carrying charge `q`, if any.
  std::optional<int> index_of(Charge q) const {
    if (q.first < 0 || q.first >= d_) return std::nullopt;
    if (doubled_) {
      if (q.second < 0 || q.second >= d_) return std::nullopt;
      return q.first * d_ + q.second;
    }
    if (q.second != 0) return std::nullopt;
    return q.first;
  }

  bool operator==(const PhysicalSpace&) const = default;

 private:
  int d_;
  bool doubled_;
};

}  // namespace tnbs
