#include "tnbs/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tnbs {

namespace {

constexpr char kMagic[8] = {'T', 'N', 'B', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ValidationError("checkpoint truncated");
  return v;
}

void put_charge(std::ostream& os, Charge c) {
  put<std::int32_t>(os, c.first);
  put<std::int32_t>(os, c.second);
}

Charge get_charge(std::istream& is) {
  const auto a = get<std::int32_t>(is);
  const auto b = get<std::int32_t>(is);
  return {a, b};
}

}  // namespace

void write_checkpoint(std::ostream& os, const CanonicalTNState& s) {
  s.check();
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::int32_t>(os, s.phys.local_dim());
  put<std::uint8_t>(os, s.phys.doubled() ? 1 : 0);
  put_charge(os, s.cap);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(s.modes()));
  for (std::size_t k = 0; k < s.bonds.size(); ++k) {
    put<std::uint64_t>(os, s.bonds[k].dim());
    for (std::size_t i = 0; i < s.bonds[k].dim(); ++i) {
      put_charge(os, s.bonds[k].charge(i));
      put<double>(os, s.lambdas[k][i]);
    }
  }
  for (const auto& g : s.gammas) {
    put<std::uint64_t>(os, g.blocks().size());
    for (const auto& [key, m] : g.blocks()) {
      put_charge(os, key.first);
      put_charge(os, key.second);
      put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
      put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          put<double>(os, m(r, c).real());
          put<double>(os, m(r, c).imag());
        }
      }
    }
  }
  if (!os) throw ValidationError("checkpoint write failed");
}

CanonicalTNState read_checkpoint(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw ValidationError("not a checkpoint file");
  }
  if (get<std::uint32_t>(is) != kVersion) throw ValidationError("unsupported checkpoint version");
  const int d = get<std::int32_t>(is);
  const bool doubled = get<std::uint8_t>(is) != 0;
  CanonicalTNState s;
  s.phys = PhysicalSpace(d, doubled);
  s.cap = get_charge(is);
  const auto M = get<std::uint32_t>(is);
  if (M == 0) throw ValidationError("checkpoint has no sites");
  for (std::uint32_t k = 0; k <= M; ++k) {
    const auto n = get<std::uint64_t>(is);
    std::vector<Charge> charges;
    std::vector<double> lambda;
    for (std::uint64_t i = 0; i < n; ++i) {
      charges.push_back(get_charge(is));
      lambda.push_back(get<double>(is));
    }
    s.bonds.emplace_back(std::move(charges));
    s.lambdas.push_back(std::move(lambda));
  }
  for (std::uint32_t k = 0; k < M; ++k) {
    ChargeBlockTensor g(s.bonds[k], s.bonds[k + 1], s.phys);
    const auto nb = get<std::uint64_t>(is);
    for (std::uint64_t b = 0; b < nb; ++b) {
      const Charge a = get_charge(is);
      const Charge c = get_charge(is);
      const auto rows = get<std::uint64_t>(is);
      const auto cols = get<std::uint64_t>(is);
      Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint64_t col = 0; col < cols; ++col) {
          const double re = get<double>(is);
          const double im = get<double>(is);
          m(r, col) = cplx(re, im);
        }
      }
      g.set_block(a, c, std::move(m));
    }
    s.gammas.push_back(std::move(g));
  }
  s.check();
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const CanonicalTNState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, state);
}

CanonicalTNState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace tnbs
