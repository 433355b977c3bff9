#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gma/gwlp.hpp"
#include "test_support.hpp"

namespace gma {
namespace {

const std::vector<std::vector<int>> kSpecs = {
    {2, 2}, {2, 3}, {3, 3}, {2, 2, 3}, {2, 2, 2, 2, 2}, {2, 3, 3, 3}, {4, 2}, {5, 2}};

TEST(CoefficientTest, ConstantTermIsRunsOverPoints) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 3}));
  const CountingVector y({3, 0, 1, 2, 0, 1});
  const auto c0 = coefficient(y, lattice, std::vector<int>{0, 0});
  EXPECT_EQ(c0.real(), 7.0 / 6.0);
  EXPECT_NEAR(c0.imag(), 0.0, 1e-12);
}

TEST(CoefficientTest, FullFactorialIsOrthogonal) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 3, 4}));
  const auto y = full_factorial(lattice);
  for (std::size_t a = 1; a < lattice.size(); ++a) {
    EXPECT_NEAR(std::abs(coefficient(y, lattice, lattice.row(a))), 0.0, 1e-12);
  }
}

TEST(CoefficientTest, ThreeLevelExample) {
  // (1/3)(2 + e^{-2 pi i / 3}) = 1/2 - i sqrt(3)/6
  const auto lattice = enumerate_lattice(FactorSpec({3}));
  const CountingVector y({2, 1, 0});
  const auto c = coefficient(y, lattice, std::vector<int>{1});
  EXPECT_NEAR(c.real(), 0.5, 1e-14);
  EXPECT_NEAR(c.imag(), -std::sqrt(3.0) / 6.0, 1e-14);
  EXPECT_NEAR(std::norm(c), 1.0 / 3.0, 1e-14);
  const auto oracle = (2.0 * std::conj(testing::root_of_unity(0, 3)) +
                       std::conj(testing::root_of_unity(1, 3))) / 3.0;
  EXPECT_NEAR(std::abs(c - oracle), 0.0, 1e-14);
}

TEST(CoefficientProperty, MatchesComplexExponentialsAndConjugateSymmetry) {
  std::mt19937_64 rng(7);
  for (const auto& levels : kSpecs) {
    const auto lattice = enumerate_lattice(FactorSpec(levels));
    const auto y = testing::random_counting_vector(lattice.size(), 11, rng);
    for (std::size_t a = 0; a < lattice.size(); ++a) {
      const auto alpha = lattice.row(a);
      std::complex<double> direct = 0.0;
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        direct += static_cast<double>(y[i]) *
                  std::conj(testing::monomial(levels, alpha, lattice.row(i)));
      }
      direct /= static_cast<double>(lattice.size());
      EXPECT_NEAR(std::abs(coefficient(y, lattice, alpha) - direct), 0.0, 1e-12);

      std::vector<int> negated(alpha.begin(), alpha.end());
      for (std::size_t k = 0; k < levels.size(); ++k) {
        negated[k] = (levels[k] - negated[k]) % levels[k];
      }
      EXPECT_NEAR(std::abs(coefficient(y, lattice, negated) -
                           std::conj(coefficient(y, lattice, alpha))),
                  0.0, 1e-12);
    }
  }
}

TEST(HEntryTest, Examples) {
  const FactorSpec two({2});
  const FactorSpec three({3});
  const std::vector<int> one{1};
  const std::vector<int> zero{0};
  EXPECT_EQ(h_entry(two, one, zero, zero), 1.0);
  EXPECT_EQ(h_entry(two, one, zero, one), -1.0);
  EXPECT_EQ(h_entry(three, one, zero, one), -0.5);
  const FactorSpec mixed({2, 3, 4});
  const std::vector<int> alpha{1, 2, 3};
  const std::vector<int> z{1, 2, 3};
  EXPECT_EQ(h_entry(mixed, alpha, z, z), 1.0);
}

TEST(HEntryProperty, EqualsRealPartOfCharacterProduct) {
  for (const auto& levels : kSpecs) {
    const auto lattice = enumerate_lattice(FactorSpec(levels));
    const FactorSpec& spec = lattice.spec();
    for (std::size_t a = 0; a < lattice.size(); a += 3) {
      for (std::size_t p = 0; p < lattice.size(); p += 2) {
        for (std::size_t q = 0; q < lattice.size(); q += 5) {
          const auto alpha = lattice.row(a);
          const auto value = std::conj(testing::monomial(levels, alpha, lattice.row(p))) *
                             testing::monomial(levels, alpha, lattice.row(q));
          EXPECT_NEAR(h_entry(spec, alpha, lattice.row(p), lattice.row(q)), value.real(), 1e-12);
        }
      }
    }
  }
}

TEST(MomentMatrixTest, TwoByTwoFirstOrder) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 2}));
  const auto h = build_moment_matrix(lattice, 1);
  EXPECT_EQ(h.weight_count, 2);
  for (int p = 0; p < 4; ++p) EXPECT_EQ(h.entries(p, p), 2.0);
  // rows (0,0) and (1,1): cos(pi) + cos(pi)
  EXPECT_EQ(h.entries(0, 3), -2.0);
  EXPECT_EQ(h.entries(0, 1), 0.0);
}

TEST(MomentMatrixTest, FiveTwoLevelFactorsSecondOrderDiagonal) {
  const auto lattice = enumerate_lattice(FactorSpec(std::vector<int>(5, 2)));
  const auto h = build_moment_matrix(lattice, 2);
  EXPECT_EQ(h.weight_count, 10);
  for (Eigen::Index p = 0; p < h.entries.rows(); ++p) EXPECT_EQ(h.entries(p, p), 10.0);
}

TEST(MomentMatrixTest, RejectsBadOrder) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 2}));
  EXPECT_THROW(build_moment_matrix(lattice, 0), std::invalid_argument);
  EXPECT_THROW(build_moment_matrix(lattice, 3), std::invalid_argument);
}

TEST(MomentMatrixProperty, SanityForEverySpec) {
  for (const auto& levels : kSpecs) {
    const auto lattice = enumerate_lattice(FactorSpec(levels));
    const auto all = build_moment_matrices(lattice);
    ASSERT_EQ(all.size(), levels.size());
    std::int64_t census_total = 0;
    for (const auto& h : all) {
      std::int64_t census = 0;
      for (std::size_t a = 0; a < lattice.size(); ++a) census += weight(lattice.row(a)) == h.order;
      EXPECT_EQ(h.weight_count, census);
      census_total += census;
      const double k = static_cast<double>(h.weight_count);
      EXPECT_TRUE((h.entries.diagonal().array() == k).all());
      EXPECT_LE((h.entries - h.entries.transpose()).cwiseAbs().maxCoeff(), 1e-12);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(h.entries.rows());
      EXPECT_LE((h.entries * ones).cwiseAbs().maxCoeff(), 1e-8);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.entries, Eigen::EigenvaluesOnly);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9 * k);
    }
    EXPECT_EQ(census_total + 1, static_cast<std::int64_t>(lattice.size()));
  }
}

TEST(MomentMatrixProperty, SingleOrderMatchesBatch) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 3, 3}));
  const auto all = build_moment_matrices(lattice);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ((build_moment_matrix(lattice, i).entries - all[i - 1].entries).cwiseAbs().maxCoeff(),
              0.0);
  }
}

TEST(FactorizeTest, Identity) {
  MomentMatrix h{1, 1, Eigen::MatrixXd::Identity(4, 4)};
  const auto f = factorize(h);
  EXPECT_EQ(f.rank(), 4);
  EXPECT_LE((f.u.transpose() * f.u - h.entries).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FactorizeTest, TwoByTwoFirstOrderHasRankTwoAndKillsOnes) {
  const auto lattice = enumerate_lattice(FactorSpec({2, 2}));
  const auto f = factorize(build_moment_matrix(lattice, 1));
  EXPECT_EQ(f.rank(), 2);
  EXPECT_LE((f.u * Eigen::VectorXd::Ones(4)).norm(), 1e-12);
}

TEST(FactorizeTest, ReconstructsEveryOrderOfFiveTwoLevelFactors) {
  const auto lattice = enumerate_lattice(FactorSpec(std::vector<int>(5, 2)));
  for (const auto& h : build_moment_matrices(lattice)) {
    const auto f = factorize(h);
    EXPECT_LE((f.u.transpose() * f.u - h.entries).cwiseAbs().maxCoeff(),
              1e-8 * static_cast<double>(h.weight_count));
    // rank of H_i equals K_i: the characters of weight i are independent
    EXPECT_EQ(f.rank(), h.weight_count);
  }
}

TEST(FactorizeTest, RejectsIndefiniteMatrix) {
  MomentMatrix h{1, 1, Eigen::MatrixXd::Identity(3, 3)};
  h.entries(2, 2) = -1.0;
  EXPECT_THROW(factorize(h), FactorizationError);
}

TEST(FactorizeProperty, QuadraticFormMatchesForRandomIntegerVectors) {
  std::mt19937_64 rng(99);
  for (const auto& levels : kSpecs) {
    const auto model = GwlpModel::shared(FactorSpec(levels));
    for (int i = 1; i <= model->order_count(); ++i) {
      const auto& u = model->factor(i).u;
      const auto& h = model->moment(i).entries;
      EXPECT_LE((u * Eigen::VectorXd::Ones(h.rows())).norm(), 1e-8);
      for (int trial = 0; trial < 5; ++trial) {
        const auto y = testing::random_counting_vector(model->point_count(), 9, rng);
        Eigen::VectorXd v(h.rows());
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = static_cast<double>(y[j]);
        const double direct = v.dot(h * v);
        EXPECT_NEAR((u * v).squaredNorm(), direct, 1e-8 * std::max(1.0, std::abs(direct)));
      }
    }
  }
}

TEST(WlpTest, FullFactorialHasZeroPattern) {
  for (const auto& levels : kSpecs) {
    const auto model = GwlpModel::shared(FactorSpec(levels));
    const auto y = full_factorial(model->lattice());
    for (double a : model->pattern(y).alpha) EXPECT_NEAR(a, 0.0, 1e-12);
    for (double a : wlp_oracle(y, model->lattice()).alpha) EXPECT_NEAR(a, 0.0, 1e-12);
  }
}

TEST(WlpTest, ThreeLevelExample) {
  const auto model = GwlpModel::shared(FactorSpec({3}));
  const CountingVector y({2, 1, 0});
  EXPECT_NEAR(model->pattern(y)[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(wlp_oracle(y, model->lattice())[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(parseval_total(y, 3), 2.0 / 3.0, 1e-12);
}

TEST(WlpTest, RegularHalfFractionOfFiveFactors) {
  // x1 x2 x3 x4 x5 = 1: only the five-factor word is aliased with the mean.
  const auto model = GwlpModel::shared(FactorSpec(std::vector<int>(5, 2)));
  CountingVector y(std::vector<std::int64_t>(32, 0));
  for (std::size_t i = 0; i < 32; ++i) {
    int parity = 0;
    for (int z : model->lattice().row(i)) parity ^= z;
    y[i] = parity == 0;
  }
  const auto w = model->pattern(y);
  const std::vector<double> expected{0, 0, 0, 0, 1};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w[i], expected[i], 1e-12);
  EXPECT_EQ(strength_from_wlp(w), 4);
}

TEST(WlpProperty, OracleEquivalenceParsevalAndReplication) {
  std::mt19937_64 rng(31337);
  for (const auto& levels : kSpecs) {
    const auto model = GwlpModel::shared(FactorSpec(levels));
    for (int trial = 0; trial < 40; ++trial) {
      const auto y = testing::random_counting_vector(model->point_count(), 1 + trial % 23, rng);
      const auto quadratic = model->pattern(y);
      const auto oracle = wlp_oracle(y, model->lattice());
      const auto direct = testing::brute_force_wlp(y, model->lattice());
      for (std::size_t i = 0; i < quadratic.size(); ++i) {
        EXPECT_NEAR(quadratic[i], oracle[i], 1e-8);
        EXPECT_NEAR(oracle[i], direct[i], 1e-8);
        EXPECT_GE(quadratic[i], 0.0);
      }
      const double closure = parseval_total(y, model->point_count());
      EXPECT_NEAR(quadratic.total(), closure, 1e-8 * std::max(1.0, closure));

      CountingVector tripled = y;
      for (auto& c : tripled.counts) c *= 3;
      const auto replicated = model->pattern(tripled);
      for (std::size_t i = 0; i < quadratic.size(); ++i) {
        EXPECT_NEAR(replicated[i], quadratic[i], 1e-10);
      }
    }
  }
}

TEST(StrengthFromWlpTest, Examples) {
  EXPECT_EQ(strength_from_wlp({{0, 0, 2, 1, 0}}), 2);
  EXPECT_EQ(strength_from_wlp({{0, 0, 0, 0, 1}}), 4);
  EXPECT_EQ(strength_from_wlp({{0.5, 0, 0}}), 0);
  EXPECT_EQ(strength_from_wlp({{0, 0, 0}}), 3);
  EXPECT_EQ(strength_from_wlp({{5e-8, 0.3}}), 1);
}

TEST(GwlpModelTest, SharedInstanceIsCached) {
  const FactorSpec spec({2, 3});
  EXPECT_EQ(GwlpModel::shared(spec).get(), GwlpModel::shared(spec).get());
  EXPECT_THROW(GwlpModel::shared(FactorSpec(std::vector<int>(13, 2))), InstanceTooLarge);
}

}  // namespace
}  // namespace gma
