#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dlsgd/error.hpp"
#include "dlsgd/rng.hpp"
#include "dlsgd/topology.hpp"
#include "oracles/oracles.hpp"

namespace dlsgd {
namespace {

Eigen::MatrixXd row_centered_normal(Eigen::Index d, Eigen::Index n, RngStream& rng) {
  Eigen::MatrixXd y(d, n);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < n; ++j) y(i, j) = rng.normal();
  const Eigen::VectorXd mean = y.rowwise().mean();
  y.colwise() -= mean;
  return y;
}

TEST(Graph, PathShapes) {
  EXPECT_TRUE(gen_path(1).edges().empty());
  const Graph p2 = gen_path(2);
  ASSERT_EQ(p2.edges().size(), 1u);
  EXPECT_EQ(p2.edges()[0], Edge(0, 1));
  EXPECT_EQ(p2.degrees(), (std::vector<std::size_t>{1, 1}));
  const Graph p4 = gen_path(4);
  EXPECT_EQ(p4.edges().size(), 3u);
  EXPECT_EQ(p4.degrees(), (std::vector<std::size_t>{1, 2, 2, 1}));
  EXPECT_THROW(gen_path(0), InvalidParameter);
}

TEST(Graph, CompleteShapes) {
  EXPECT_EQ(gen_complete(3).edges().size(), 3u);
  EXPECT_EQ(gen_complete(1).edges().size(), 0u);
  EXPECT_EQ(gen_complete(10).edges().size(), 45u);
  EXPECT_THROW(gen_complete(0), InvalidParameter);
}

TEST(Graph, RejectsBadEdgeSets) {
  EXPECT_THROW(Graph(3, {{0, 1}}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 0}, {0, 1}}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 1}, {1, 0}}), InvalidInput);
  EXPECT_THROW(Graph(2, {{0, 2}}), InvalidInput);
  EXPECT_NO_THROW(Graph(3, {{2, 1}, {1, 0}}));
}

TEST(Graph, Bipartite) {
  EXPECT_TRUE(gen_path(5).is_bipartite());
  EXPECT_FALSE(gen_complete(3).is_bipartite());
  EXPECT_TRUE(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}).is_bipartite());
}

TEST(ErdosRenyi, ForcedAndInvalid) {
  const Graph g = gen_erdos_renyi(2, 1.0, 12345);
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0], Edge(0, 1));
  EXPECT_THROW(gen_erdos_renyi(5, 0.0, 1), InvalidParameter);
  EXPECT_THROW(gen_erdos_renyi(5, 1.5, 1), InvalidParameter);
  EXPECT_EQ(gen_erdos_renyi(1, 0.0, 1).size(), 1u);
  EXPECT_THROW(gen_erdos_renyi(200, 1e-4, 1, 5), GenerationFailure);
}

TEST(ErdosRenyi, ConnectedAndDeterministic) {
  const Graph g = gen_erdos_renyi(20, 0.3, 7);
  EXPECT_EQ(g.size(), 20u);
  EXPECT_TRUE(oracle::connected_by_union_find(20, g.edges()));
  EXPECT_EQ(gen_erdos_renyi(20, 0.3, 7).edges(), g.edges());
  EXPECT_NE(gen_erdos_renyi(20, 0.3, 8).edges(), g.edges());
}

TEST(ErdosRenyi, BfsAgreesWithUnionFind) {
  RngStream rng(99, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(15);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.2) edges.emplace_back(i, j);
    EXPECT_EQ(is_connected(n, edges), oracle::connected_by_union_find(n, edges));
  }
}

TEST(ErdosRenyi, ProbabilityFromDelta) {
  EXPECT_NEAR(er_probability_from_delta(64, 0.1), 1.1 * std::log(64.0) / 64.0, 1e-15);
  EXPECT_NEAR(er_probability_from_delta(64, 0.1), 0.0715, 5e-5);
  EXPECT_EQ(er_probability_from_delta(3, 2.0), 1.0);
}

TEST(Metropolis, ThreePathLiteralRule) {
  const MixingMatrix w = metropolis_weights(gen_path(3), WeightRule::kMaxDegree);
  EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(w(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(w(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(w(2, 2), 0.5);
  EXPECT_DOUBLE_EQ(w(1, 1), 0.0);
  EXPECT_EQ(w(0, 2), 0.0);
  EXPECT_NEAR(w.rho(), 0.5, 1e-12);
  EXPECT_NEAR(w.gap_factor(), 4.0 / 3.0, 1e-12);
}

TEST(Metropolis, CompleteThreeLiteralRule) {
  const MixingMatrix w = metropolis_weights(gen_complete(3), WeightRule::kMaxDegree);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(w(i, i), 0.0);
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) EXPECT_DOUBLE_EQ(w(i, j), 0.5);
  }
  EXPECT_NEAR(w.rho(), 0.5, 1e-12);
}

TEST(Metropolis, DefaultRuleThreePath) {
  const MixingMatrix w = metropolis_weights(gen_path(3));
  EXPECT_DOUBLE_EQ(w(0, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(w(0, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w(1, 1), 1.0 / 3.0);
  // Eigenvalues of this matrix are {1, 2/3, 0}.
  EXPECT_NEAR(w.rho(), 2.0 / 3.0, 1e-12);
}

TEST(Metropolis, SingleNode) {
  const MixingMatrix w = metropolis_weights(gen_path(1));
  EXPECT_EQ(w.size(), 1u);
  EXPECT_EQ(w(0, 0), 1.0);
  EXPECT_EQ(w.rho(), 0.0);
  EXPECT_EQ(w.gap_factor(), 1.0);
}

TEST(Metropolis, LiteralRuleBipartiteHasUnitRho) {
  const Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const MixingMatrix literal = metropolis_weights(c4, WeightRule::kMaxDegree);
  EXPECT_NEAR(literal.rho(), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(literal.gap_factor()));
  EXPECT_LT(metropolis_weights(c4).rho(), 1.0 - 1e-12);
}

TEST(Metropolis, PathGapFactors) {
  const std::vector<std::pair<std::size_t, double>> expected = {
      {4, 2.84}, {8, 10.1}, {16, 39.3}, {32, 156.0}, {64, 623.0}};
  for (const auto& [n, value] : expected) {
    const MixingMatrix w = metropolis_weights(gen_path(n));
    EXPECT_NEAR(w.gap_factor(), value, 0.01 * value) << "n=" << n;
    // Closed form for the lazy path chain: lambda_2 = 1/3 + 2/3 cos(pi/n).
    EXPECT_NEAR(w.rho(), 1.0 / 3.0 + 2.0 / 3.0 * std::cos(M_PI / static_cast<double>(n)), 1e-10);
  }
}

TEST(Metropolis, InvariantsOnRandomGraphs) {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(30);
    const double p = 0.2 + 0.8 * rng.uniform();
    const Graph g = gen_erdos_renyi(n, p, static_cast<std::uint64_t>(trial));
    for (const WeightRule rule : {WeightRule::kMetropolisHastings, WeightRule::kMaxDegree}) {
      const MixingMatrix w = metropolis_weights(g, rule);
      const auto& m = w.weights();
      EXPECT_TRUE(m == m.transpose());
      EXPECT_GE(m.minCoeff(), 0.0);
      for (Eigen::Index i = 0; i < m.rows(); ++i) EXPECT_NEAR(m.row(i).sum(), 1.0, 1e-12);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) EXPECT_EQ(w(i, j) > 0.0, g.has_edge(i, j));
      if (w.rho() < 1.0) {
        EXPECT_NEAR(w.gap_factor(), 1.0 / (1.0 - w.rho() * w.rho()), 1e-9 * w.gap_factor());
      } else {
        EXPECT_TRUE(std::isinf(w.gap_factor()));
        EXPECT_TRUE(g.is_bipartite());
      }
      const double jacobi = oracle::second_magnitude(oracle::jacobi_eigenvalues(m));
      EXPECT_NEAR(w.rho(), std::min(jacobi, 1.0), 1e-10);
      if (rule == WeightRule::kMetropolisHastings) EXPECT_LE(w.rho(), 1.0 - 1e-12);
    }
  }
}

TEST(Spectral, IdentityAndUniform) {
  EXPECT_NEAR(MixingMatrix::identity(5).rho(), 1.0, 1e-15);
  EXPECT_NEAR(MixingMatrix::uniform(5).rho(), 0.0, 1e-12);
  EXPECT_TRUE(MixingMatrix::uniform(5).is_uniform_average());
  EXPECT_NEAR(second_eigenvalue_magnitude(Eigen::MatrixXd::Identity(3, 3)), 1.0, 1e-15);
}

TEST(FromDense, Validation) {
  Eigen::MatrixXd bad_rows(2, 2);
  bad_rows << 0.5, 0.4, 0.4, 0.6;
  EXPECT_THROW(MixingMatrix::from_dense(bad_rows), InvalidInput);
  Eigen::MatrixXd asym(2, 2);
  asym << 0.5, 0.5, 0.4, 0.6;
  EXPECT_THROW(MixingMatrix::from_dense(asym), InvalidInput);
  Eigen::MatrixXd negative(2, 2);
  negative << 1.5, -0.5, -0.5, 1.5;
  EXPECT_THROW(MixingMatrix::from_dense(negative), InvalidInput);
  EXPECT_THROW(MixingMatrix::from_dense(Eigen::MatrixXd::Identity(2, 3)), InvalidInput);
}

TEST(Mixing, MatchesDenseProductAndPreservesAverage) {
  RngStream rng(17, 0);
  const MixingMatrix w = metropolis_weights(gen_erdos_renyi(12, 0.4, 3));
  Eigen::MatrixXd x(6, 12);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const Eigen::MatrixXd dense = x * w.weights();
  Eigen::MatrixXd mixed = x;
  w.mix(mixed);
  EXPECT_LE((mixed - dense).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((mixed.rowwise().mean() - x.rowwise().mean()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mixing, UniformGivesExactConsensus) {
  RngStream rng(1, 1);
  Eigen::MatrixXd x(4, 7);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  MixingMatrix::uniform(7).mix(x);
  for (Eigen::Index j = 1; j < x.cols(); ++j) EXPECT_EQ(x.col(j), x.col(0));
}

TEST(Mixing, EqualColumnsStayBitwiseEqual) {
  const MixingMatrix w = metropolis_weights(gen_erdos_renyi(9, 0.5, 11));
  Eigen::MatrixXd x(3, 9);
  for (Eigen::Index j = 0; j < 9; ++j) x.col(j) << 0.1, -1.0 / 3.0, 7.25;
  const Eigen::MatrixXd before = x;
  w.mix(x);
  EXPECT_EQ(x, before);
}

TEST(Contraction, TrivialCases) {
  const MixingMatrix w = metropolis_weights(gen_path(5));
  const auto zero = contraction_check(w, Eigen::MatrixXd::Zero(3, 5));
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  RngStream rng(3, 0);
  const auto y = row_centered_normal(4, 5, rng);
  EXPECT_NEAR(contraction_check(MixingMatrix::uniform(5), y).lhs, 0.0, 1e-24);
  Eigen::MatrixXd off = y;
  off(0, 0) += 1.0;
  EXPECT_THROW(contraction_check(w, off), InvalidInput);
}

TEST(Contraction, RandomPairs) {
  RngStream rng(2024, 0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.index(20);
    const Graph g = gen_erdos_renyi(n, 0.3 + 0.7 * rng.uniform(), static_cast<std::uint64_t>(trial));
    const MixingMatrix w = metropolis_weights(g);
    const auto y = row_centered_normal(static_cast<Eigen::Index>(1 + rng.index(8)), static_cast<Eigen::Index>(n), rng);
    const auto c = contraction_check(w, y);
    if (c.lhs > c.rhs + 1e-9) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(Serialization, EdgeListRoundTrip) {
  const Graph g = gen_erdos_renyi(10, 0.4, 2);
  std::stringstream buf;
  write_edge_list(buf, g);
  const Graph back = read_edge_list(buf);
  EXPECT_EQ(back.size(), g.size());
  EXPECT_EQ(back.edges(), g.edges());
  std::istringstream text("3 2\n1 2\n2 3\n");
  EXPECT_EQ(read_edge_list(text).edges(), gen_path(3).edges());
  std::istringstream wrong_count("3 3\n1 2\n2 3\n");
  EXPECT_THROW(read_edge_list(wrong_count), ParseError);
}

TEST(Serialization, MatrixCsvRoundTrip) {
  const MixingMatrix w = metropolis_weights(gen_erdos_renyi(8, 0.5, 4));
  std::stringstream buf;
  write_matrix_csv(buf, w);
  const MixingMatrix back = read_matrix_csv(buf);
  EXPECT_EQ(back.weights(), w.weights());
  EXPECT_EQ(back.rho(), w.rho());
}

}  // namespace
}  // namespace dlsgd
