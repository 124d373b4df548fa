#include "tnbs/circuit.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "tnbs/errors.hpp"

namespace tnbs {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Odd k ascending, then even k descending: 1, 3, 5, 4, 2 for length 5.
std::vector<int> diagonal_ks(int length) {
  std::vector<int> ks;
  for (int k = 1; k <= length; k += 2) ks.push_back(k);
  for (int k = (length % 2 == 0) ? length : length - 1; k >= 2; k -= 2) ks.push_back(k);
  return ks;
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t key = mix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
  return mix64(key ^ (0x9e3779b97f4a7c15ULL * ++counter_));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t CircuitLayout::gate_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.size();
  return n;
}

std::vector<std::pair<int, int>> dialing_schedule(int n) {
  // Nulling order of the rectangular decomposition: even diagonals are
  // nulled from the right, odd ones from the left; the left-nulled gates end
  // up in reverse order on the output side of the mesh.
  std::vector<std::pair<int, int>> right, left;
  for (int i = 0; i < n - 1; ++i) {
    const auto ks = diagonal_ks(i + 1);
    if (i % 2 == 0) {
      for (int j = 0; j <= i; ++j) right.emplace_back(i - j, ks[j]);
    } else {
      for (int j = 1; j <= i + 1; ++j) left.emplace_back(n + j - i - 3, ks[j - 1]);
    }
  }
  std::vector<std::pair<int, int>> out = right;
  out.insert(out.end(), left.rbegin(), left.rend());
  return out;
}

CircuitLayout haar_circuit(int modes, std::uint64_t seed) {
  if (modes < 2) throw DomainError("a mesh needs at least 2 modes");
  CircuitLayout layout;
  layout.modes = modes;
  layout.seed = seed;
  layout.layers.resize(modes);
  CounterRng rng(seed);
  std::vector<int> last(modes, -1);
  for (auto [m, k] : dialing_schedule(modes)) {
    int l = std::max(last[m], last[m + 1]) + 1;
    if (l % 2 != m % 2) ++l;
    if (l >= modes) throw ConsistencyError("mesh schedule exceeds M layers");
    last[m] = last[m + 1] = l;
    const double u = rng.uniform();
    const double t = 1.0 - std::pow(1.0 - u, 1.0 / k);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    layout.layers[l].push_back({l, m, std::acos(std::sqrt(t)), phi});
  }
  for (auto& layer : layout.layers) {
    std::sort(layer.begin(), layer.end(), [](const GateSpec& a, const GateSpec& b) { return a.site < b.site; });
  }
  return layout;
}

Matrix transfer_matrix(const CircuitLayout& layout) {
  const int M = layout.modes;
  Matrix u = Matrix::Identity(M, M);
  for (const auto& layer : layout.layers) {
    for (const GateSpec& g : layer) {
      const double c = std::cos(g.theta), s = std::sin(g.theta);
      const cplx ep = std::polar(1.0, g.phi);
      for (int j = 0; j < M; ++j) {
        const cplx a = u(j, g.site), b = u(j, g.site + 1);
        u(j, g.site) = c * a + ep * s * b;
        u(j, g.site + 1) = -std::conj(ep) * s * a + c * b;
      }
    }
  }
  return u;
}

std::vector<double> bipartition_angles(const Matrix& u, int l) {
  const auto M = u.rows();
  if (u.cols() != M) throw ValidationError("transfer matrix must be square");
  if (l < 1 || l >= M) throw DomainError("bipartition mode must satisfy 1 <= l < M");
  if ((u * u.adjoint() - Matrix::Identity(M, M)).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("transfer matrix is not unitary");
  }
  std::vector<double> out;
  for (Eigen::Index j = 0; j < M; ++j) {
    const double w = std::min(1.0, u.row(j).head(l).squaredNorm());
    out.push_back(std::acos(std::sqrt(w)));
  }
  return out;
}

void write_layout(std::ostream& os, const CircuitLayout& layout) {
  os << "# modes=" << layout.modes << " seed=" << layout.seed << "\n";
  char buf[128];
  for (const auto& layer : layout.layers) {
    for (const GateSpec& g : layer) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", g.layer, g.site, g.theta, g.phi);
      os << buf;
    }
  }
}

CircuitLayout read_layout(std::istream& is) {
  CircuitLayout layout;
  std::string line;
  if (!std::getline(is, line) ||
      std::sscanf(line.c_str(), "# modes=%d seed=%" SCNu64, &layout.modes, &layout.seed) != 2) {
    throw ValidationError("layout header missing");
  }
  if (layout.modes < 2) throw ValidationError("layout has fewer than 2 modes");
  layout.layers.resize(layout.modes);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    GateSpec g;
    if (!(ls >> g.layer >> g.site >> g.theta >> g.phi)) throw ValidationError("malformed gate line: " + line);
    if (g.layer < 0 || g.layer >= layout.modes || g.site < 0 || g.site + 1 >= layout.modes) {
      throw ValidationError("gate outside the mesh: " + line);
    }
    layout.layers[g.layer].push_back(g);
  }
  return layout;
}

}  // namespace tnbs
