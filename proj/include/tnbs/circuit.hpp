#pragma once

// Brick-wall beam-splitter meshes that realise Haar-random interferometers.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tnbs/charge.hpp"

namespace tnbs {

/// Counter-based generator: draw n of a stream depends only on (seed, n),
/// so results are identical across platforms and standard libraries.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

struct GateSpec {
  int layer = 0;
  int site = 0;  // acts on modes (site, site + 1)
  double theta = 0.0;
  double phi = 0.0;
};

struct CircuitLayout {
  int modes = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<GateSpec>> layers;

  std::size_t gate_count() const;
};

/// Beta(1, k) parameters of the mesh positions, in the order the gates are
/// laid out. Each entry is (pair index, k).
std::vector<std::pair<int, int>> dialing_schedule(int modes);

/// M-layer brick-wall mesh whose transmissivities cos²θ ~ Beta(1, k) follow
/// the triangular nulling order of a rectangular decomposition; phases are
/// uniform. Layer l holds pairs (m, m+1) with m ≡ l (mod 2).
CircuitLayout haar_circuit(int modes, std::uint64_t seed);

/// Single-photon transfer matrix: entry (j, k) is the amplitude for a photon
/// entering mode j to leave in mode k.
Matrix transfer_matrix(const CircuitLayout& layout);

/// θ_j = arccos(sqrt(Σ_{k<l} |U_jk|²)) for every input mode j.
std::vector<double> bipartition_angles(const Matrix& unitary, int l);

void write_layout(std::ostream& os, const CircuitLayout& layout);
CircuitLayout read_layout(std::istream& is);

}  // namespace tnbs
