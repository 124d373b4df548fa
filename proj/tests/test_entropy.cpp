#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tnbs/entropy.hpp"
#include "tnbs/linalg.hpp"

using namespace tnbs;

TEST(SingleModeOutput, ZeroAngleKeepsPhotonsUp) {
  const auto in = InputSpec::squeezed(0.88, 8);
  const Matrix psi = single_mode_output(in, 0.0, 8);
  for (int u = 0; u <= 8; ++u)
    for (int d = 1; d <= 8; ++d) EXPECT_EQ(psi(u, d), cplx(0.0));
  EXPECT_NEAR(test::table_entropy(psi), 0.0, 1e-12);
}

TEST(SingleModeOutput, SinglePhotonSplitsEvenly) {
  const Matrix psi = single_mode_output(InputSpec::single_photon(), M_PI / 4, 1);
  EXPECT_NEAR(std::abs(psi(1, 0)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::abs(psi(0, 1)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-15);
}

TEST(SingleModeOutput, MatchesMpsForSqueezedInput) {
  const int n_max = 8, d = 9;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  auto s = init_squeezed_product(0.88, 1, 2, n_max, d);
  apply_gate(s, beam_splitter(M_PI / 4, 0.0, d), 0, test::kFullChi);
  EXPECT_NEAR(test::table_entropy(psi), entropy_at_cut(s, 1), 1e-10);
}

TEST(LossyDensity, LimitsAndTrace) {
  const int n_max = 6;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  const Matrix pure = lossy_bipartite_density(psi, 1.0, n_max);
  const auto ev = hermitian_eigenvalues(pure);
  int nonzero = 0;
  for (double x : ev) nonzero += x > 1e-12;
  EXPECT_EQ(nonzero, 1);
  const Matrix vac = lossy_bipartite_density(psi, 0.0, n_max);
  EXPECT_NEAR(std::abs(vac(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(vectorized_mpo_ee(vac, n_max), 0.0, 1e-12);
  for (double mu : {0.1, 0.5, 0.9})
    EXPECT_NEAR(lossy_bipartite_density(psi, mu, n_max).trace().real(), psi.squaredNorm(), 1e-12);
  EXPECT_THROW(lossy_bipartite_density(Matrix::Zero(3, 3), 0.5, n_max), DimensionError);
}

TEST(LossyDensity, FirstRowIsOrderOneAndRestOrderMu) {
  const int n_max = 8;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  auto split = [&](double mu) {
    const Matrix rho = lossy_bipartite_density(psi, mu, n_max);
    double interior = 0.0;
    for (Eigen::Index i = 1; i < rho.rows(); ++i)
      for (Eigen::Index j = 1; j < rho.cols(); ++j) interior = std::max(interior, std::abs(rho(i, j)));
    return std::pair{std::abs(rho(0, 0)), interior};
  };
  const auto [a2, i2] = split(1e-2);
  const auto [a3, i3] = split(1e-3);
  EXPECT_NEAR(a2, 1.0, 0.05);
  EXPECT_NEAR(a3, 1.0, 0.01);
  const double slope = std::log10(i2 / i3);  // exponent of μ
  EXPECT_NEAR(slope, 1.0, 0.1);
}

TEST(VectorizedEe, LosslessIsTwiceSchmidt) {
  const int n_max = 8;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  EXPECT_NEAR(vectorized_mpo_ee(lossy_bipartite_density(psi, 1.0, n_max), n_max), 2.0 * test::table_entropy(psi), 1e-10);
  const Matrix prod = single_mode_output(InputSpec::squeezed(0.88, n_max), 0.0, n_max);
  EXPECT_NEAR(vectorized_mpo_ee(lossy_bipartite_density(prod, 0.4, n_max), n_max), 0.0, 1e-10);
}

TEST(VectorizedEe, ArrowheadClosedFormForTwoLevelTruncation) {
  for (double mu : {0.05, 0.3, 0.9}) {
    const Matrix psi = single_mode_output(InputSpec::from_coefficients({0.8, 0.6}), M_PI / 5, 1);
    const Matrix rp = reduced_vectorized_operator(lossy_bipartite_density(psi, mu, 1), 1);
    // Keeping only the first row and column, as in the expansion.
    Matrix arrow = Matrix::Zero(rp.rows(), rp.cols());
    arrow.row(0) = rp.row(0);
    arrow.col(0) = rp.col(0);
    auto ev = hermitian_eigenvalues(arrow);
    std::sort(ev.begin(), ev.end());
    const auto [hi, lo] = arrowhead_eigenvalues(rp);
    EXPECT_NEAR(ev.back(), hi, 1e-12);
    EXPECT_NEAR(ev.front(), lo, 1e-12);
  }
}

TEST(VectorizedEe, EigenvalueSanity) {
  const int n_max = 6;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  for (double mu : {0.01, 0.3, 1.0}) {
    const Matrix rho = lossy_bipartite_density(psi, mu, n_max);
    const Matrix rp = reduced_vectorized_operator(rho, n_max);
    const auto ev = hermitian_eigenvalues(rp);
    double sum = 0.0;
    for (double x : ev) {
      EXPECT_GE(x, -1e-12);
      sum += x;
    }
    EXPECT_NEAR(sum, rho.squaredNorm(), 1e-12);
  }
  EXPECT_THROW(vectorized_mpo_ee(Matrix::Zero(49, 49), n_max), DomainError);
}

TEST(VectorizedEe, SecondEigenvalueScalesAsMuSquared) {
  const int n_max = 8;
  const Matrix psi = single_mode_output(InputSpec::squeezed(0.88, n_max), M_PI / 4, n_max);
  auto second = [&](double mu) {
    auto ev = hermitian_eigenvalues(reduced_vectorized_operator(lossy_bipartite_density(psi, mu, n_max), n_max));
    std::sort(ev.rbegin(), ev.rend());
    return ev[1];
  };
  const double slope = std::log10(second(1e-2) / second(1e-4)) / 2.0;
  EXPECT_NEAR(slope, 2.0, 0.3);
}

TEST(Asymptotic, LosslessIsLinearInN) {
  const auto in = InputSpec::squeezed(0.88, 8);
  const double one = single_mode_ee(in, 1.0, 8, M_PI / 4);
  for (double N : {1.0, 10.0, 100.0})
    EXPECT_NEAR(asymptotic_total_ee(in, N, ScalingSchedule{1.0, 1.0}, 8), N * one, 1e-9 * N);
}

TEST(Asymptotic, AdditiveOverModes) {
  const auto in = InputSpec::squeezed(0.88, 8);
  const ScalingSchedule sch{1.0, 0.5};
  for (double N : {4.0, 50.0}) {
    const double mu = sch.mu(N);
    EXPECT_NEAR(asymptotic_total_ee(in, N, sch, 8), N * single_mode_ee(in, mu, 8, M_PI / 4), 1e-12 * N);
  }
  EXPECT_NEAR(sch.mu(16.0), 0.25, 1e-15);
  EXPECT_THROW(sch.mu(0.0), DomainError);
}

TEST(Asymptotic, SmallMuLaw) {
  const auto in = InputSpec::squeezed(0.88, 8);
  std::vector<double> ratio;
  for (double mu : {1e-2, 1e-3, 1e-4}) ratio.push_back(single_mode_ee(in, mu, 8, M_PI / 4) / (mu * mu * std::log2(1 / mu)));
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  EXPECT_LT((*hi - *lo) / *hi, 0.1);
}

TEST(Asymptotic, SquareRootScheduleGrowsLikeLog) {
  const auto in = InputSpec::squeezed(0.88, 8);
  std::vector<double> ratio;
  for (double N : {1e2, 1e3, 1e4}) ratio.push_back(asymptotic_total_ee(in, N, ScalingSchedule{1.0, 0.5}, 8) / std::log2(N));
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  EXPECT_LT((*hi - *lo) / *hi, 0.1);
}

TEST(Convergence, DifferencesShrink) {
  const auto rows = nmax_convergence(InputSpec::squeezed(0.88, 8), 50, ScalingSchedule{1.0, 0.5}, {2, 4, 6, 8}, 0.88);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::abs(rows[i].delta), std::abs(rows[i - 1].delta));
  const auto photon = nmax_convergence(InputSpec::single_photon(), 50, ScalingSchedule{1.0, 0.5}, {1, 2, 3});
  for (std::size_t i = 1; i < photon.size(); ++i) EXPECT_NEAR(photon[i].delta, 0.0, 1e-12);
  const auto vac = nmax_convergence(InputSpec::squeezed(0.0, 8), 50, ScalingSchedule{1.0, 0.5}, {2, 4}, 0.0);
  for (const auto& r : vac) EXPECT_NEAR(r.ee_bits, 0.0, 1e-12);
  EXPECT_THROW(nmax_convergence(InputSpec::single_photon(), 5, ScalingSchedule{}, {4, 2}), DomainError);
}

TEST(Asymptotic, MoreSqueezingMoreEntropy) {
  double prev = 0.0;
  for (double r : {0.88, 1.146, 1.44}) {
    const double s = asymptotic_total_ee(InputSpec::squeezed(r, 8), 100, ScalingSchedule{1.0, 0.5}, 8);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Asymptotic, MpoSimulationAgrees) {
  const int n_max = 8, d = 9;
  const double mu = 0.4;
  auto s = init_lossy_squeezed(0.88, mu, 1, 2, n_max, d);
  apply_gate_mpo(s, double_gate(beam_splitter(M_PI / 4, 0.0, d)), 0, test::kFullChi);
  EXPECT_NEAR(mpo_entropy_at_cut(s, 1), single_mode_ee(InputSpec::squeezed(0.88, n_max), mu, n_max, M_PI / 4), 1e-8);
}

TEST(Asymptotic, FiniteMSumsPerMode) {
  const auto in = InputSpec::squeezed(0.88, 8);
  const std::vector<double> th = {0.3, 0.9};
  EXPECT_NEAR(finite_m_total_ee(in, th, 0.5, 8), single_mode_ee(in, 0.5, 8, 0.3) + single_mode_ee(in, 0.5, 8, 0.9), 1e-14);
}

TEST(ScalingCsv, Header) {
  std::ostringstream os;
  write_scaling_csv(os, {{100, 0.1, 1.5, 8, 0.5, 1.0}});
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "N,mu,ee_bits,n_max,gamma,beta");
}

TEST(EntropyBits, Basics) {
  const std::vector<double> bell = {0.5, 0.5};
  EXPECT_NEAR(entropy_bits(bell), 1.0, 1e-15);
  const std::vector<double> unnormalized = {2.0, 2.0, 0.0};
  EXPECT_NEAR(entropy_bits(unnormalized), 1.0, 1e-15);
  const std::vector<double> negative = {1.0, -0.1};
  EXPECT_THROW(entropy_bits(negative), DomainError);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(entropy_bits(zero), DomainError);
}
