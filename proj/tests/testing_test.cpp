#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "cgi/errors.hpp"
#include "cgi/instances.hpp"
#include "cgi/labels.hpp"
#include "cgi/oracles.hpp"
#include "cgi/testing.hpp"
#include "test_util.hpp"

namespace cgi {
namespace {

// Root view computed centrally from G_U, C and the sampled pairs.
RootView central_view(const Graph& gu, const NodeSeq& c,
                      const std::vector<std::pair<NodeId, NodeId>>& pairs, double eps) {
  RootView view;
  view.eps = eps;
  view.c = c;
  const auto labels = c_labels(gu, c);
  for (NodeId x : c) view.c_labels.push_back(labels[x]);
  view.sample.pairs = pairs;
  for (const auto& [i, j] : pairs) view.sample.answers.push_back(i != j && gu.adjacent(i, j));
  for (NodeId v : view.sample.nodes()) view.sample.labels[v] = labels[v];
  for (NodeId x : c) view.sample.labels[x] = labels[x];
  const auto sizes = class_sizes(gu, c);
  for (const auto& [v, l] : view.sample.labels)
    if (!l.is_zero()) view.class_sizes[l] = sizes.at(l);
  return view;
}

std::vector<std::pair<NodeId, NodeId>> random_pairs(NodeId n, std::size_t t, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> pairs(t);
  for (auto& [i, j] : pairs) {
    i = static_cast<NodeId>(uniform_below(rng, n));
    j = static_cast<NodeId>(uniform_below(rng, n));
  }
  return pairs;
}

NodeSeq random_seq(NodeId n, std::size_t s, Rng& rng) {
  Bijection b = random_bijection(n, rng);
  return NodeSeq(b.image().begin(), b.image().begin() + static_cast<std::ptrdiff_t>(s));
}

TEST(TestParamsTest, Formulas) {
  TestParams p = TestParams::standard(24, 0.3);
  EXPECT_EQ(p.s, 24u);  // ceil(8 ln 24 / 0.3) = 85, clamped to n
  EXPECT_EQ(p.t, static_cast<std::size_t>(std::ceil(8.0 * 24 * std::log(24.0) / 0.3)));
  TestParams d = TestParams::desk(24, 0.3, 3);
  EXPECT_EQ(d.t, static_cast<std::size_t>(std::ceil(8.0 * 3 * std::log(24.0) / 0.3)));
  EXPECT_NO_THROW(d.validate(24));
  EXPECT_NO_THROW(p.validate(24));
}

TEST(TestParamsTest, Validation) {
  EXPECT_THROW(TestParams::desk(24, 1.5, 3).validate(24), InputError);
  EXPECT_THROW(TestParams::desk(24, 0.0, 3).validate(24), InputError);
  EXPECT_THROW(TestParams::desk(24, 0.3, 0).validate(24), InputError);
  EXPECT_THROW(TestParams::desk(24, 0.3, 25).validate(24), InputError);
  TestParams p = TestParams::standard(24, 0.3);
  p.t = 10;
  EXPECT_THROW(p.validate(24), InputError);
}

TEST(EnumerationTest, Counts) {
  std::set<NodeSeq> seen;
  EXPECT_EQ(enumerate_sequences(4, 2, [&](const NodeSeq& p) {
              seen.insert(p);
              return false;
            }),
            12u);
  EXPECT_EQ(seen.size(), 12u);
  std::vector<NodeSeq> perms;
  enumerate_sequences(3, 3, [&](const NodeSeq& p) {
    perms.push_back(p);
    return false;
  });
  ASSERT_EQ(perms.size(), 6u);
  EXPECT_EQ(perms.front(), (NodeSeq{0, 1, 2}));
  EXPECT_EQ(perms.back(), (NodeSeq{2, 1, 0}));
  EXPECT_EQ(enumerate_sequences(5, 2, [](const NodeSeq&) { return true; }), 1u);
}

TEST(EnumerationTest, PrunedIsTheAnchorConsistentSubset) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Graph gu = random_gnp(8, 0.5, rng);
    Graph gk = random_gnp(8, 0.5, rng);
    NodeSeq c = random_seq(8, 3, rng);
    const auto lu = c_labels(gu, c);
    std::vector<Label> cl;
    for (NodeId x : c) cl.push_back(lu[x]);
    std::vector<NodeSeq> full, pruned;
    enumerate_sequences(8, 3, [&](const NodeSeq& p) {
      const auto lk = c_labels(gk, p);
      bool ok = true;
      for (std::size_t i = 0; i < 3; ++i) ok &= lk[p[i]] == cl[i];
      if (ok) full.push_back(p);
      return false;
    });
    enumerate_consistent_sequences(gk, cl, [&](const NodeSeq& p) {
      pruned.push_back(p);
      return false;
    });
    EXPECT_EQ(pruned, full);
  }
}

TEST(EnumerationTest, PrunedAndFullVerdictsAgree) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    CertifiedPair pair = seed % 2 ? gen_isomorphic_pair(8, 0.5, seed) : gen_far_pair(8, 0.1, seed);
    TestParams params = TestParams::desk(8, 0.1, 2, 40);
    TesterOptions pruned, full;
    full.full_enumeration = true;
    auto a = run_tester(pair.gu, pair.gk, params, NetworkConfig::congest(8, seed), pruned);
    auto b = run_tester(pair.gu, pair.gk, params, NetworkConfig::congest(8, seed), full);
    EXPECT_EQ(a.accept, b.accept) << "seed " << seed;
    EXPECT_EQ(a.sequences_tried, b.sequences_tried);
  }
}

TEST(SequenceCheckTest, IsomorphismImagePassesFirstChecks) {
  Rng rng(21);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CertifiedPair pair = gen_isomorphic_pair(12, 0.5, seed);
    NodeSeq c = random_seq(12, 3, rng);
    RootView view = central_view(pair.gu, c, random_pairs(12, 60, rng), 0.3);
    CheckOutcome out = sequence_check(pair.gk, view, pair.iso->map(c), rng);
    EXPECT_TRUE(out.stage == CheckOutcome::Stage::kMismatches ||
                out.stage == CheckOutcome::Stage::kPassed);
    EXPECT_EQ(out.f.size(), view.sample.nodes().size());
  }
}

TEST(SequenceCheckTest, AnchorLabelMismatchFailsFirstCheck) {
  Graph g = testing::path_graph(4);
  Rng rng(1);
  RootView view = central_view(g, {0, 1}, {{0, 1}}, 0.3);
  // c_1 = 0 is adjacent to c_2 = 1; p = (0, 2) is not.
  CheckOutcome out = sequence_check(g, view, {0, 2}, rng);
  EXPECT_EQ(out.stage, CheckOutcome::Stage::kAnchors);
  EXPECT_TRUE(out.f.empty());
}

TEST(SequenceCheckTest, ClassSizeMismatchFailsSecondCheck) {
  Graph gu = testing::star_graph(5);
  Graph gk = testing::path_graph(5);
  Rng rng(1);
  // C = (1): in the star only the center is labeled 1, in the path P = (0)
  // also labels node 1 alone, but P = (2) labels two nodes.
  RootView view = central_view(gu, {1}, {{0, 2}}, 0.3);
  EXPECT_EQ(sequence_check(gk, view, {2}, rng).stage, CheckOutcome::Stage::kClassSizes);
}

TEST(SequenceCheckTest, SingletonClassesForceIdentity) {
  // All labels distinct under C = V, so f is the identity and nothing mismatches.
  Rng rng(4);
  Graph g;
  do {
    g = random_gnp(8, 0.5, rng);
  } while ([&] {
    auto sizes = class_sizes(g, {0, 1, 2, 3, 4, 5, 6, 7});
    return sizes.size() != 8;
  }());
  NodeSeq c{0, 1, 2, 3, 4, 5, 6, 7};
  RootView view = central_view(g, c, random_pairs(8, 50, rng), 0.3);
  CheckOutcome out = sequence_check(g, view, c, rng);
  EXPECT_TRUE(out.passed());
  EXPECT_EQ(out.mismatches, 0u);
  for (const auto& [v, w] : out.f) EXPECT_EQ(v, w);
}

TEST(SequenceCheckTest, FDependsOnlyOnSeedAndP) {
  CertifiedPair pair = gen_isomorphic_pair(10, 0.5, 3);
  Rng rng(5);
  NodeSeq c{1, 4};
  RootView view = central_view(pair.gu, c, random_pairs(10, 30, rng), 0.3);
  NodeSeq p = pair.iso->map(c);
  Rng r1 = bijection_rng(99, p), r2 = bijection_rng(99, p);
  EXPECT_EQ(sequence_check(pair.gk, view, p, r1).f, sequence_check(pair.gk, view, p, r2).f);
  EXPECT_NE(bijection_rng(99, {p[1], p[0]})(), bijection_rng(99, p)());
  EXPECT_NE(bijection_rng(98, p)(), bijection_rng(99, p)());
}

TEST(SequenceCheckTest, FIndependentOfA) {
  // 6-node graph with one class of size 3 under C = (0): {1, 2, 3}.
  Graph g = testing::make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {4, 5}, {1, 4}});
  NodeSeq c{0};
  const NodeId v0 = 2;
  ASSERT_EQ(label_class(g, c, c_label(g, c, v0)).size(), 3u);
  Rng a_rng(77);
  std::uint64_t seed = 0;
  auto tally = [&](bool redraw_a) {
    std::vector<int> counts(6, 0);
    auto fixed = random_pairs(6, 8, a_rng);
    fixed.insert(fixed.begin(), {v0, v0});
    for (int draw = 0; draw < 10000; ++draw) {
      auto pairs = fixed;
      if (redraw_a) {
        pairs = random_pairs(6, 8, a_rng);
        pairs.insert(pairs.begin() + static_cast<std::ptrdiff_t>(uniform_below(a_rng, 9)),
                     {v0, v0});
      }
      RootView view = central_view(g, c, pairs, 0.3);
      Rng f_rng = bijection_rng(seed++, c);
      for (const auto& [v, w] : sequence_check(g, view, c, f_rng).f)
        if (v == v0) ++counts[w];
    }
    return counts;
  };
  for (bool redraw : {false, true}) {
    auto counts = tally(redraw);
    double chi2 = 0;
    for (NodeId w : {1u, 2u, 3u}) chi2 += std::pow(counts[w] - 10000.0 / 3, 2) / (10000.0 / 3);
    EXPECT_EQ(counts[1] + counts[2] + counts[3], 10000);
    // Two degrees of freedom; 13.8 is the 0.001 quantile.
    EXPECT_LT(chi2, 13.8) << "redraw " << redraw;
  }
}

TEST(SequenceCheckTest, SoundnessScaffold) {
  const double eps = 0.3;
  const std::size_t t = 40;
  CertifiedPair pair = gen_far_pair(10, eps, 5);
  ASSERT_TRUE(pair.verify());
  Rng rng(1000);
  int passed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    NodeSeq c = random_seq(10, 2, rng);
    RootView view = central_view(pair.gu, c, random_pairs(10, t, rng), eps);
    NodeSeq p = random_seq(10, 2, rng);
    try {
      passed += sequence_check(pair.gk, view, p, rng).passed();
    } catch (const ProtocolAbort&) {
    }
  }
  const double bound = std::exp(-eps * t / 8.0) + 0.02;
  EXPECT_LE(passed / 1000.0, bound);
}

TEST(SequenceCheckTest, CompletenessScaffold) {
  const double eps = 0.3;
  Rng rng(55);
  int separating_runs = 0, passes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CertifiedPair pair = gen_isomorphic_pair(16, 0.5, seed);
    NodeSeq c = random_seq(16, 8, rng);
    if (!is_beta_separating(pair.gu, c, eps / 2)) continue;
    ++separating_runs;
    const std::size_t t = static_cast<std::size_t>(std::ceil(8.0 * 8 * std::log(16.0) / eps));
    RootView view = central_view(pair.gu, c, random_pairs(16, t, rng), eps);
    NodeSeq p = pair.iso->map(c);
    Rng f_rng = bijection_rng(seed, p);
    CheckOutcome out = sequence_check(pair.gk, view, p, f_rng);
    ASSERT_NE(out.stage, CheckOutcome::Stage::kAnchors);
    ASSERT_NE(out.stage, CheckOutcome::Stage::kClassSizes);
    passes += out.passed();
  }
  ASSERT_GE(separating_runs, 10);
  EXPECT_GE(passes, 0.95 * separating_runs);
}

TEST(TesterTest, IdentityAtStandardParametersAccepts) {
  Rng rng(24);
  int accepts = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = random_connected_gnp(24, 0.5, rng);
    auto res = run_tester(g, g, TestParams::standard(24, 0.3), NetworkConfig::congest(24, seed));
    accepts += res.accept;
  }
  EXPECT_GE(accepts, 27);
}

TEST(TesterTest, FarPairsRejectAtDeskParameters) {
  int rejects = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CertifiedPair pair = gen_far_pair(24, 0.3, seed);
    auto res = run_tester(pair.gu, pair.gk, TestParams::desk(24, 0.3, 3),
                          NetworkConfig::congest(24, seed));
    rejects += !res.accept;
  }
  EXPECT_GE(rejects, 27);
}

TEST(TesterTest, RoundsOnDiameterThree) {
  // Two dense halves joined through a path of three nodes.
  Rng rng(3);
  Graph g(24);
  Graph a = random_connected_gnp(11, 0.6, rng), b = random_connected_gnp(11, 0.6, rng);
  for (const Edge& e : a.edges()) g.add_edge(e.first, e.second);
  for (const Edge& e : b.edges()) g.add_edge(11 + e.first, 11 + e.second);
  for (NodeId v = 0; v < 11; ++v) g.add_edge(v, 22);
  for (NodeId v = 11; v < 22; ++v) g.add_edge(v, 23);
  g.add_edge(22, 23);
  ASSERT_EQ(diameter(g), 3u);
  TestParams params = TestParams::desk(24, 0.3, 3);
  auto res = run_tester(g, g, params, NetworkConfig::congest(24, 1));
  EXPECT_LE(res.rounds, 2 * (3 + params.s + params.t + 2 * params.t) + 10);
  for (const auto& out : res.transcript.outputs) EXPECT_EQ(out, res.accept ? "accept" : "reject");
}

TEST(TesterTest, JsonAndDeterminism) {
  CertifiedPair pair = gen_isomorphic_pair(12, 0.5, 1);
  TestParams params = TestParams::desk(12, 0.3, 2);
  auto a = run_tester(pair.gu, pair.gk, params, NetworkConfig::congest(12, 9));
  auto b = run_tester(pair.gu, pair.gk, params, NetworkConfig::congest(12, 9));
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  auto j = a.to_json();
  for (const char* key : {"verdict", "rounds", "bits", "s", "t", "sequences_tried"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["s"], 2);
}

TEST(TesterTest, RejectsMismatchedSizes) {
  EXPECT_THROW(run_tester(Graph(5), Graph(6), TestParams::desk(5, 0.3, 2),
                          NetworkConfig::congest(5, 0)),
               InputError);
}

}  // namespace
}  // namespace cgi
