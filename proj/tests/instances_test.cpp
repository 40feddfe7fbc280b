#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cgi/errors.hpp"
#include "cgi/instances.hpp"
#include "cgi/oracles.hpp"
#include "test_util.hpp"

namespace cgi {
namespace {

TEST(RandomGraphTest, EdgeProbabilityExtremes) {
  Rng rng(1);
  EXPECT_EQ(random_gnp(7, 0.0, rng).num_edges(), 0u);
  EXPECT_EQ(random_gnp(7, 1.0, rng).num_edges(), 21u);
  EXPECT_TRUE(is_connected(random_connected_gnp(30, 0.1, rng)));
  EXPECT_THROW(random_connected_gnp(3, 0.0, rng), InputError);
}

TEST(IsoPairTest, CompleteGraphs) {
  CertifiedPair pair = gen_isomorphic_pair(6, 1.0, 3);
  EXPECT_EQ(pair.gu, testing::complete_graph(6));
  EXPECT_EQ(pair.gk, testing::complete_graph(6));
  EXPECT_TRUE(pair.verify());
}

TEST(IsoPairTest, CertificateChecks) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CertifiedPair pair = gen_isomorphic_pair(8, 0.5, seed);
    ASSERT_TRUE(pair.iso.has_value());
    EXPECT_EQ(hamming_distance(apply(*pair.iso, pair.gu), pair.gk), 0u);
    EXPECT_TRUE(brute_iso(pair.gu, pair.gk).has_value());
    EXPECT_TRUE(is_connected(pair.gu));
    EXPECT_TRUE(pair.verify());
  }
  CertifiedPair a = gen_isomorphic_pair(10, 0.4, 9), b = gen_isomorphic_pair(10, 0.4, 9);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(IsoPairTest, TamperedCertificateFails) {
  CertifiedPair pair = gen_isomorphic_pair(8, 0.5, 1);
  const Edge e = pair.gk.edges().front();
  pair.gk.remove_edge(e.first, e.second);
  EXPECT_FALSE(pair.verify());
}

TEST(FarPairTest, GapExceedsEpsNSquared) {
  CertifiedPair pair = gen_far_pair(10, 0.3, 2);
  EXPECT_EQ(pair.edge_gap, 31u);
  EXPECT_EQ(pair.gu.num_edges() - pair.gk.num_edges(), 31u);
  EXPECT_GT(static_cast<double>(pair.edge_gap), 0.3 * 100);
  EXPECT_TRUE(pair.verify());
  EXPECT_TRUE(is_connected(pair.gu));
}

TEST(FarPairTest, OracleConfirmsDistance) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CertifiedPair pair = gen_far_pair(7, 0.3, seed);
    const std::size_t d = min_bijection_distance(pair.gu, pair.gk);
    EXPECT_GE(d, 2 * pair.edge_gap);
    EXPECT_GT(d / 2.0, 0.3 * 49);
  }
}

TEST(FarPairTest, SurvivesRelabeling) {
  CertifiedPair pair = gen_far_pair(12, 0.2, 4);
  Rng rng(4);
  pair.gk = apply(random_bijection(12, rng), pair.gk);
  EXPECT_TRUE(pair.verify());
}

TEST(FarPairTest, InfeasibleIsInputError) {
  EXPECT_THROW(gen_far_pair(5, 0.5, 0), InputError);
}

TEST(DecisionLbTest, MatrixEnumeration) {
  auto all = all_bit_matrices(2);
  ASSERT_EQ(all.size(), 16u);
  EXPECT_EQ(all[0], BitMatrix(2, std::vector<bool>(2, false)));
  EXPECT_EQ(all[15], BitMatrix(2, std::vector<bool>(2, true)));
  EXPECT_EQ(all_bit_matrices(1).size(), 2u);
}

TEST(DecisionLbTest, NodeCount) {
  for (std::size_t k : {1u, 2u, 3u}) {
    BitMatrix x(k, std::vector<bool>(k, false));
    auto pair = gen_decision_lb(x, x);
    EXPECT_EQ(pair.gu.n(), 4 * k + 15);
  }
  BitMatrix x3(3, std::vector<bool>(3, true));
  EXPECT_EQ(decision_lb_graph(x3, x3).n(), 27u);
}

TEST(DecisionLbTest, IsomorphicIffEqualAtKTwo) {
  const auto all = all_bit_matrices(2);
  for (const auto& x : all)
    for (const auto& y : all) {
      auto pair = gen_decision_lb(x, y);
      EXPECT_TRUE(is_connected(pair.gu));
      EXPECT_EQ(find_isomorphism(pair.gu, pair.gk).has_value(), x == y);
    }
}

TEST(DecisionLbTest, SingleBitGadgets) {
  const auto all = all_bit_matrices(1);
  for (const auto& x : all)
    for (const auto& y : all) {
      Graph g = decision_lb_graph(x, y), h = decision_lb_graph(x, x);
      auto iso = find_isomorphism(g, h);
      EXPECT_EQ(iso.has_value(), x == y);
      if (iso) EXPECT_EQ(apply(*iso, g), h);
    }
}

TEST(DecisionLbTest, DecoderRecoversInputs) {
  Rng rng(13);
  for (std::size_t k : {1u, 2u}) {
    const auto all = all_bit_matrices(k);
    for (const auto& x : all)
      for (const auto& y : all) {
        Graph g = apply(random_bijection(static_cast<NodeId>(4 * k + 15), rng),
                        decision_lb_graph(x, y));
        auto got = decode_decision_lb(g, k);
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(got->first, x);
        EXPECT_EQ(got->second, y);
      }
  }
  const auto all3 = all_bit_matrices(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& x = all3[uniform_below(rng, all3.size())];
    const auto& y = all3[uniform_below(rng, all3.size())];
    Graph g = apply(random_bijection(27, rng), decision_lb_graph(x, y));
    auto got = decode_decision_lb(g, 3);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(*got, std::make_pair(x, y));
  }
  EXPECT_FALSE(decode_decision_lb(testing::path_graph(23), 2).has_value());
}

TEST(TestingLbTest, BasePairEdgeRatio) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    LbBasePair base = gen_lb_base_pair(12, 0.25, seed);
    EXPECT_TRUE(is_connected(base.g1));
    EXPECT_TRUE(is_connected(base.g2));
    const double ratio = static_cast<double>(base.g1.num_edges()) / base.g2.num_edges();
    EXPECT_NEAR(ratio, 1.25, 0.5 / base.g2.num_edges());
  }
}

TEST(TestingLbTest, NodeCountAndShape) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 1);
  for (std::uint32_t d : {2u, 3u, 6u, 9u}) {
    Graph g = gen_testing_lb(1, 2, d, base.g1, base.g2);
    EXPECT_EQ(g.n(), 2 * 6 + d - 2);
    EXPECT_TRUE(is_connected(g));
    EXPECT_EQ(bfs_distances(g, 0)[6], d - 1);
  }
}

TEST(TestingLbTest, SwappedSidesIsomorphic) {
  LbBasePair base = gen_lb_base_pair(3, 0.5, 2);
  Graph a = gen_testing_lb(1, 2, 3, base.g1, base.g2);
  Graph b = gen_testing_lb(2, 1, 3, base.g1, base.g2);
  ASSERT_LE(a.n(), kBruteForceCap);
  EXPECT_TRUE(brute_iso(a, b).has_value());
}

TEST(TestingLbTest, SameSidedPairsAreFar) {
  LbBasePair base = gen_lb_base_pair(8, 0.5, 3);
  Graph g11 = gen_testing_lb(1, 1, 4, base.g1, base.g2);
  Graph g22 = gen_testing_lb(2, 2, 4, base.g1, base.g2);
  const std::size_t gap = g11.num_edges() - g22.num_edges();
  EXPECT_EQ(gap, 2 * (base.g1.num_edges() - base.g2.num_edges()));
  CertifiedPair far{g11, g22, std::nullopt, gap, 0.0, "edge gap"};
  far.eps = (static_cast<double>(gap) - 0.5) / (g11.n() * g11.n());
  EXPECT_TRUE(far.verify());
}

TEST(LabeledLbTest, OddDiameterRejected) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 1);
  EXPECT_THROW(gen_testing_lb_labeled(1, 2, 5, LabelSet::kA, LabelSet::kB,
                                      Orientation::kAscending, base.g1, base.g2),
               InputError);
}

TEST(LabeledLbTest, LabelsAndPorts) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 1);
  LabeledGraph lg = gen_testing_lb_labeled(1, 1, 6, LabelSet::kA, LabelSet::kB,
                                           Orientation::kAscending, base.g1, base.g2);
  auto labels = lg.label;
  std::sort(labels.begin(), labels.end());
  for (std::uint32_t x = 0; x < labels.size(); ++x) EXPECT_EQ(labels[x], x + 1);
  for (NodeId v = 0; v < lg.g.n(); ++v) {
    auto ports = lg.ports[v];
    std::sort(ports.begin(), ports.end());
    EXPECT_EQ(ports, lg.g.neighbors(v));
  }
  // Both path ends reach the graphs through port 1.
  EXPECT_EQ(lg.port_of(12, 0), 1u);
  EXPECT_EQ(lg.port_of(15, 6), 1u);
}

TEST(LabeledLbTest, OrientationsDifferOnlyOnPath) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 1);
  auto asc = gen_testing_lb_labeled(1, 1, 6, LabelSet::kA, LabelSet::kB,
                                    Orientation::kAscending, base.g1, base.g2);
  auto desc = gen_testing_lb_labeled(1, 1, 6, LabelSet::kA, LabelSet::kB,
                                     Orientation::kDescending, base.g1, base.g2);
  EXPECT_EQ(asc.g, desc.g);
  EXPECT_EQ(asc.ports, desc.ports);
  for (NodeId v = 0; v < 12; ++v) EXPECT_EQ(asc.label[v], desc.label[v]);
  for (NodeId v = 12; v < 16; ++v) EXPECT_NE(asc.label[v], desc.label[v]);
}

TEST(LabeledLbTest, ViewsStartWithOwnLabel) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 1);
  auto lg = gen_testing_lb_labeled(1, 2, 6, LabelSet::kB, LabelSet::kA,
                                   Orientation::kAscending, base.g1, base.g2);
  for (NodeId v = 0; v < lg.g.n(); ++v) {
    auto view = labeled_view(lg, v, 2);
    EXPECT_EQ(view.front(), lg.label[v]);
    EXPECT_EQ(view.size(), 1 + [&] {
      std::size_t recs = 0;
      auto dist = bfs_distances(lg.g, v);
      for (NodeId x = 0; x < lg.g.n(); ++x)
        if (dist[x] <= 1) recs += lg.g.degree(x);
      return recs;
    }());
  }
}

TEST(LabeledLbTest, SameSidedNodesLookLikeMixedOnes) {
  LbBasePair base = gen_lb_base_pair(6, 0.5, 7);
  const std::uint32_t d = 8, r = d / 3;
  std::vector<std::vector<std::uint64_t>> mixed;
  for (auto [s1, s2] : {std::pair{LabelSet::kA, LabelSet::kB}, std::pair{LabelSet::kB, LabelSet::kA}})
    for (Orientation o : {Orientation::kAscending, Orientation::kDescending}) {
      auto lg = gen_testing_lb_labeled(1, 2, d, s1, s2, o, base.g1, base.g2);
      for (NodeId v = 0; v < lg.g.n(); ++v) mixed.push_back(labeled_view(lg, v, r));
    }
  std::sort(mixed.begin(), mixed.end());
  for (int side : {1, 2})
    for (Orientation o : {Orientation::kAscending, Orientation::kDescending}) {
      auto lg = gen_testing_lb_labeled(side, side, d, LabelSet::kA, LabelSet::kB, o, base.g1,
                                       base.g2);
      for (NodeId v = 0; v < lg.g.n(); ++v)
        EXPECT_TRUE(std::binary_search(mixed.begin(), mixed.end(), labeled_view(lg, v, r)))
            << "side " << side << " node " << v;
    }
}

}  // namespace
}  // namespace cgi
