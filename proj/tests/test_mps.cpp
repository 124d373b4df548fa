#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "tnbs/checkpoint.hpp"

using namespace tnbs;

namespace {

std::vector<int> bond_charges(const CanonicalTNState& s) {
  std::vector<int> out;
  for (const auto& b : s.bonds) {
    EXPECT_EQ(b.dim(), 1u);
    out.push_back(b.charge(0).first);
  }
  return out;
}

// Σ_p (λ_k Γ^p)† (λ_k Γ^p) and Σ_p (Γ^p λ_{k+1})(Γ^p λ_{k+1})† for site k.
std::pair<double, double> canonical_defects(const CanonicalTNState& s, int k) {
  const auto slices = s.gammas[k].to_dense();
  const auto& ll = s.lambdas[k];
  const auto& lr = s.lambdas[k + 1];
  const Eigen::Index L = ll.size(), R = lr.size();
  Matrix left = Matrix::Zero(R, R), right = Matrix::Zero(L, L);
  for (const Matrix& g : slices) {
    Matrix a = g, b = g;
    for (Eigen::Index i = 0; i < L; ++i) a.row(i) *= ll[i];
    for (Eigen::Index j = 0; j < R; ++j) b.col(j) *= lr[j];
    left += a.adjoint() * a;
    right += b * b.adjoint();
  }
  // Only bonds carrying weight are expected to be orthonormal.
  double dl = 0.0, dr = 0.0;
  for (Eigen::Index i = 0; i < R; ++i)
    for (Eigen::Index j = 0; j < R; ++j)
      if (lr[i] > 1e-10 && lr[j] > 1e-10) dl = std::max(dl, std::abs(left(i, j) - (i == j ? 1.0 : 0.0)));
  for (Eigen::Index i = 0; i < L; ++i)
    for (Eigen::Index j = 0; j < L; ++j)
      if (ll[i] > 1e-10 && ll[j] > 1e-10) dr = std::max(dr, std::abs(right(i, j) - (i == j ? 1.0 : 0.0)));
  return {dl, dr};
}

}  // namespace

TEST(InitFock, BondChargesCountPhotonsToTheRight) {
  const auto s = init_fock({1, 1, 0, 0});
  EXPECT_EQ(bond_charges(s), (std::vector<int>{2, 1, 0, 0, 0}));
}

TEST(InitFock, VacuumHasZeroChargeAndEntropy) {
  const auto s = init_fock({0, 0, 0}, 2);
  EXPECT_EQ(bond_charges(s), (std::vector<int>{0, 0, 0, 0}));
  for (int l = 1; l < 3; ++l) EXPECT_EQ(entropy_at_cut(s, l), 0.0);
}

TEST(InitFock, AmplitudesAreOrthonormal) {
  const std::vector<int> p = {1, 0, 2};
  const auto s = init_fock(p, 3);
  EXPECT_EQ(amplitude(s, p), cplx(1.0));
  for (const std::vector<int>& q : std::vector<std::vector<int>>{{0, 1, 2}, {2, 1, 0}, {1, 1, 1}, {0, 0, 0}})
    EXPECT_EQ(amplitude(s, q), cplx(0.0));
  EXPECT_THROW(init_fock({3, 0}, 3), TruncationError);
}

TEST(InitSqueezed, VacuumAtZeroSqueezing) {
  const auto s = init_squeezed_product(0.0, 2, 3, 4, 5);
  EXPECT_NEAR(std::abs(amplitude(s, std::vector<int>{0, 0, 0})), 1.0, 1e-15);
  EXPECT_NEAR(norm_squared(s), 1.0, 1e-15);
}

TEST(InitSqueezed, AmplitudesOfFirstSite) {
  const double r = 0.88;
  const int n_max = 8, d = 9;
  const auto s = init_squeezed_product(r, 1, 2, n_max, d);
  const auto c = squeezed_amplitudes(r, n_max);
  for (int n = 0; n <= n_max; ++n) {
    const cplx a = amplitude(s, std::vector<int>{n, 0});
    EXPECT_NEAR(std::abs(a - c[n]), 0.0, 1e-14);
    if (n % 2 == 1) {
      EXPECT_EQ(a, cplx(0.0));
    }
  }
  EXPECT_NEAR(std::norm(amplitude(init_squeezed_product(r, 1, 1, 80, 81), std::vector<int>{0})), 1.0 / std::cosh(r), 1e-10);
  EXPECT_THROW(init_squeezed_product(r, 1, 2, 8, 8), TruncationError);
  EXPECT_THROW(init_squeezed_product(r, 1, 2, 7, 9), DomainError);
}

TEST(ApplyGate, IdentityLeavesStateUnchanged) {
  std::mt19937_64 rng(31);
  auto s = test::random_canonical_pure(rng, 4, 3, 4, 2);
  const Vector before = to_dense(s);
  const auto rep = apply_gate(s, identity_gate(3), 1, test::kFullChi);
  EXPECT_LT((to_dense(s) - before).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(rep.discarded_weight, 1e-24);
}

TEST(ApplyGate, SinglePhotonEntropyIsBinaryEntropy) {
  for (double th : {0.1, 0.5, M_PI / 4, 1.2}) {
    auto s = init_fock({1, 0}, 2);
    apply_gate(s, beam_splitter(th, 0.3, 2), 0, test::kFullChi);
    EXPECT_NEAR(std::abs(amplitude(s, std::vector<int>{1, 0})), std::abs(std::cos(th)), 1e-14);
    EXPECT_NEAR(std::abs(amplitude(s, std::vector<int>{0, 1})), std::abs(std::sin(th)), 1e-14);
    EXPECT_NEAR(entropy_at_cut(s, 1), test::h2(std::cos(th) * std::cos(th)), 1e-12);
  }
}

TEST(ApplyGate, BellPairHasOneBit) {
  auto s = init_fock({1, 0}, 2);
  apply_gate(s, beam_splitter(M_PI / 4, 0.0, 2), 0, test::kFullChi);
  EXPECT_NEAR(entropy_at_cut(s, 1), 1.0, 1e-12);
}

TEST(ApplyGate, SqueezedAndVacuumMatchDenseSchmidt) {
  const double r = 0.88;
  const int n_max = 8, d = 9;
  auto s = init_squeezed_product(r, 1, 2, n_max, d);
  apply_gate(s, beam_splitter(M_PI / 4, 0.0, d), 0, test::kFullChi);
  const auto c = squeezed_amplitudes(r, n_max);
  DenseFockState dense = dense_product({Eigen::Map<const Eigen::VectorXd>(c.data(), d).cast<cplx>(), Vector::Unit(d, 0)});
  dense_apply_gate(dense, beam_splitter(M_PI / 4, 0.0, d), 0);
  EXPECT_NEAR(entropy_at_cut(s, 1), dense_entropy(dense, 1), 1e-10);
}

TEST(ApplyGate, WrongTotalIsExactlyZero) {
  std::mt19937_64 rng(32);
  auto s = init_fock({1, 1, 0, 0}, 3);
  test::scramble(s, rng, 4, test::kFullChi);
  EXPECT_EQ(amplitude(s, std::vector<int>{1, 0, 0, 0}), cplx(0.0));
  EXPECT_EQ(amplitude(s, std::vector<int>{1, 1, 1, 0}), cplx(0.0));
}

TEST(ApplyGate, RandomCircuitMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<int> pattern = {1, 0, 1, 0};
    auto s = init_fock(pattern, 3);
    auto dense = dense_fock(pattern, 3);
    for (const auto& layer : haar_circuit(4, seed).layers) {
      for (const auto& g : layer) {
        apply_gate(s, beam_splitter(g.theta, g.phi, 3), g.site, test::kFullChi);
        dense_apply_gate(dense, beam_splitter(g.theta, g.phi, 3), g.site);
      }
    }
    EXPECT_LT((to_dense(s) - dense.amplitudes).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(norm_squared(s), 1.0, 1e-9);
    for (int l = 1; l < 4; ++l) EXPECT_NEAR(entropy_at_cut(s, l), dense_entropy(dense, l), 1e-8);
  }
}

TEST(ApplyGate, NormBudget) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 3);
    const bool leaky = trial % 2 == 1;
    const int cap = leaky ? d + static_cast<int>(rng() % (d - 1)) : 1 + static_cast<int>(rng() % (d - 1));
    auto s = test::random_canonical_pure(rng, 5, d, cap, leaky ? 0 : 3);
    const double before = norm_squared(s);
    const auto rep = apply_gate(s, test::random_beam_splitter(rng, d), static_cast<int>(rng() % 4), 1 + rng() % 3);
    const double after = norm_squared(s);
    EXPECT_GE(rep.discarded_weight, 0.0);
    EXPECT_GE(rep.leakage, -1e-12);
    EXPECT_NEAR(before - after, rep.discarded_weight + rep.leakage, 1e-10);
  }
}

TEST(ApplyGate, TotalChargeIsInvariant) {
  std::mt19937_64 rng(34);
  auto s = test::random_canonical_pure(rng, 5, 3, 4, 4);
  for (const Charge& c : s.bonds[0].charges()) EXPECT_LE(c.first, 4);
  EXPECT_EQ(s.bonds[5].charges(), (std::vector<Charge>{Charge(0)}));
  for (int k = 0; k < 5; ++k) {
    for (const auto& [key, blk] : s.gammas[k].blocks()) {
      const int p = key.first.first - key.second.first;
      EXPECT_GE(p, 0);
      EXPECT_LT(p, 3);
    }
  }
}

TEST(ApplyGate, ErrorsOnBadArguments) {
  auto s = init_fock({1, 0, 0}, 2);
  EXPECT_THROW(apply_gate(s, identity_gate(2), 2, 4), DomainError);
  EXPECT_THROW(apply_gate(s, identity_gate(3), 0, 4), DimensionError);
  EXPECT_THROW(apply_gate(s, identity_gate(2), 0, 0), DomainError);
  const FockGate g = identity_gate(2);
  const std::vector<LayerGate> overlapping = {{0, &g}, {1, &g}};
  EXPECT_THROW(apply_layer(s, overlapping, 4), ConsistencyError);
}

TEST(ApplyLayer, MatchesSequentialGates) {
  std::mt19937_64 rng(35);
  auto a = test::random_canonical_pure(rng, 6, 3, 5, 1);
  auto b = a;
  std::vector<FockGate> gates;
  for (int i = 0; i < 3; ++i) gates.push_back(test::random_beam_splitter(rng, 3));
  std::vector<LayerGate> lg = {{0, &gates[0]}, {2, &gates[1]}, {4, &gates[2]}};
  apply_layer(a, lg, 8);
  for (const auto& g : lg) apply_gate(b, *g.gate, g.site, 8);
  EXPECT_LT((to_dense(a) - to_dense(b)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Canonical, ConditionsHoldAfterFullRankEvolution) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = test::random_canonical_pure(rng, 5, 3, 2, 4);
    for (int k = 1; k < 4; ++k) {
      const auto [dl, dr] = canonical_defects(s, k);
      EXPECT_LT(dl, 1e-8);
      EXPECT_LT(dr, 1e-8);
    }
  }
}

TEST(Canonical, LeakageBreaksOrthonormalityAwayFromTheGate) {
  std::mt19937_64 rng(39);
  auto s = test::random_canonical_pure(rng, 5, 3, 4, 3);
  double worst = 0.0;
  for (int k = 1; k < 4; ++k) {
    const auto [dl, dr] = canonical_defects(s, k);
    worst = std::max({worst, dl, dr});
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(Entropy, OneSidedMatchesOnCanonicalStates) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    auto s = test::random_canonical_pure(rng, 5, 3, 2, 3);
    for (int l = 1; l < 5; ++l) EXPECT_NEAR(entropy_at_cut(s, l), entropy_at_cut_one_sided(s, l), 1e-10);
  }
}

TEST(Entropy, ExactAfterLeakageAndTruncation) {
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    // cap above d-1 lets gates leak, which breaks right orthonormality.
    auto s = test::random_canonical_pure(rng, 5, 3, 4, 3);
    test::scramble(s, rng, 2, 3);
    DenseFockState psi{5, 3, to_dense(s)};
    for (int l = 1; l < 5; ++l) EXPECT_NEAR(entropy_at_cut(s, l), dense_entropy(psi, l), 1e-9);
  }
}

TEST(Entropy, ProductStateAndErrors) {
  const auto s = init_squeezed_product(0.88, 3, 3, 4, 13);
  for (int l = 1; l < 3; ++l) EXPECT_NEAR(entropy_at_cut(s, l), 0.0, 1e-12);
  EXPECT_THROW(entropy_at_cut(s, 0), DomainError);
  EXPECT_THROW(entropy_at_cut(s, 3), DomainError);
}

TEST(Entropy, ChargeResolvedBoundsPhysical) {
  auto s = init_squeezed_product(0.88, 1, 2, 8, 9);
  apply_gate(s, beam_splitter(M_PI / 4, 0.0, 9), 0, test::kFullChi);
  EXPECT_GE(charge_resolved_entropy(s, 1), entropy_at_cut(s, 1));
}

TEST(ChooseLocalDim, TailBelowOnePercent) {
  const int d = choose_local_dim(0.88, 2, 8);
  EXPECT_GT(d, 8);
  // Total photon number of two truncated squeezed modes beyond d - 1.
  const auto c = squeezed_amplitudes(0.88, 8);
  double tail = 0.0;
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      if (a + b > d - 1) tail += c[a] * c[a] * c[b] * c[b];
  EXPECT_LT(tail, 0.01);
}

TEST(Checkpoint, BitFaithfulRoundTrip) {
  std::mt19937_64 rng(38);
  for (bool doubled : {false, true}) {
    const auto s = doubled ? test::random_canonical_mixed(rng, 3, 2, 2, 2) : test::random_canonical_pure(rng, 4, 3, 4, 3);
    std::stringstream ss;
    write_checkpoint(ss, s);
    const auto back = read_checkpoint(ss);
    EXPECT_EQ(back.phys, s.phys);
    EXPECT_EQ(back.cap, s.cap);
    ASSERT_EQ(back.bonds.size(), s.bonds.size());
    for (std::size_t k = 0; k < s.bonds.size(); ++k) {
      EXPECT_EQ(back.bonds[k], s.bonds[k]);
      EXPECT_EQ(back.lambdas[k], s.lambdas[k]);
    }
    for (std::size_t k = 0; k < s.gammas.size(); ++k) {
      ASSERT_EQ(back.gammas[k].blocks().size(), s.gammas[k].blocks().size());
      for (const auto& [key, blk] : s.gammas[k].blocks()) {
        const Matrix* other = back.gammas[k].block(key.first, key.second);
        ASSERT_NE(other, nullptr);
        EXPECT_EQ(*other, blk);
      }
    }
  }
  std::stringstream bad("NOTACKPT");
  EXPECT_ANY_THROW(read_checkpoint(bad));
}
