#include <gtest/gtest.h>

#include "cgi/central.hpp"
#include "cgi/errors.hpp"
#include "cgi/instances.hpp"
#include "test_util.hpp"

namespace cgi {
namespace {

using testing::binary_tree;

// Declares one query and then asks a different one.
class LyingTester final : public QueryTester {
 public:
  void reset(NodeId, std::uint64_t) override { asked_ = false; }
  std::optional<Query> next() override {
    if (asked_) return std::nullopt;
    asked_ = true;
    return Query::degree(1);
  }
  void feed(const Answer&) override {}
  bool verdict() const override { return true; }
  std::optional<std::vector<Query>> declared_queries() const override {
    return std::vector<Query>{Query::degree(0)};
  }

 private:
  bool asked_ = false;
};

TEST(QueryOracleTest, AnswersAndCounts) {
  Graph g = testing::make_graph(4, {{0, 1}, {0, 3}, {2, 3}});
  QueryOracle oracle(g);
  EXPECT_EQ(oracle.answer(Query::adjacency(0, 3)), Answer{1});
  EXPECT_EQ(oracle.answer(Query::adjacency(1, 2)), Answer{0});
  EXPECT_EQ(oracle.answer(Query::degree(0)), Answer{2});
  EXPECT_EQ(oracle.answer(Query::incidence(0, 1)), Answer{3});
  EXPECT_EQ(oracle.answer(Query::incidence(0, 2)), std::nullopt);
  EXPECT_EQ(oracle.count(), 5u);
  EXPECT_THROW(oracle.answer(Query::degree(4)), InputError);
  for (const Query q : {Query::adjacency(3, 2), Query::degree(3), Query::incidence(3, 0)})
    EXPECT_EQ(local_answer(g, q), oracle.answer(q));
}

TEST(AdaptiveTest, NoQueriesOnlyVerdict) {
  Graph g = binary_tree(31);
  DegreeTester tester(0, 10.0);
  auto run = run_adaptive(tester, g, NetworkConfig::congest(31, 1));
  EXPECT_EQ(run.depth, 4u);
  EXPECT_EQ(run.queries, 0u);
  EXPECT_TRUE(run.verdict);
  EXPECT_LE(run.rounds, run.depth + 2u);
}

TEST(AdaptiveTest, RoundsPerQuery) {
  Graph g = binary_tree(31);
  DegreeTester tester(30, 10.0);
  auto run = run_adaptive(tester, g, NetworkConfig::congest(31, 2));
  EXPECT_EQ(run.queries, 30u);
  EXPECT_LE(run.rounds, 8u * 30 + 5);
}

TEST(NonAdaptiveTest, PipelinedRounds) {
  Graph g = binary_tree(31);
  DensityTester one(1, 0.5);
  auto r1 = run_nonadaptive(one, g, NetworkConfig::congest(31, 3));
  EXPECT_LE(r1.rounds, 2u * r1.depth + 5);
  DensityTester many(50, 0.5);
  auto r50 = run_nonadaptive(many, g, NetworkConfig::congest(31, 3));
  EXPECT_EQ(r50.queries, 50u);
  EXPECT_LE(r50.rounds, 2u * (4 + 50) + 5);
}

TEST(NonAdaptiveTest, UndeclaredQueryIsContractViolation) {
  Graph g = binary_tree(7);
  LyingTester tester;
  EXPECT_THROW(run_nonadaptive(tester, g, NetworkConfig::congest(7, 0)), ContractViolation);
}

TEST(FidelityTest, MatchesCentralizedRun) {
  Rng rng(21);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = random_connected_gnp(20, 0.2, rng);
    DensityTester d1(25, 0.2), d2(25, 0.2), d3(25, 0.2);
    const auto ref = run_centralized(d1, g, seed);
    EXPECT_EQ(run_nonadaptive(d2, g, NetworkConfig::congest(20, seed)).verdict, ref.verdict);
    EXPECT_EQ(run_adaptive(d3, g, NetworkConfig::congest(20, seed)).verdict, ref.verdict);

    RandomWalkTester w1(15, 2), w2(15, 2);
    const auto walk = run_centralized(w1, g, seed);
    const auto dist = run_adaptive(w2, g, NetworkConfig::congest(20, seed));
    EXPECT_EQ(dist.verdict, walk.verdict);
    EXPECT_EQ(dist.queries, walk.queries);

    DegreeTester g1(10, 4.0), g2(10, 4.0);
    EXPECT_EQ(run_adaptive(g2, g, NetworkConfig::congest(20, seed)).verdict,
              run_centralized(g1, g, seed).verdict);
  }
}

TEST(FidelityTest, BandwidthRespected) {
  Graph g = binary_tree(15);
  DensityTester tester(40, 0.3);
  auto run = run_nonadaptive(tester, g, NetworkConfig::congest(15, 5));
  EXPECT_GT(run.transcript.total_bits, 0u);
  EXPECT_GE(run.transcript.rounds, run.rounds);
}

}  // namespace
}  // namespace cgi
