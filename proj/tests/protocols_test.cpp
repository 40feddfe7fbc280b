#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cgi/errors.hpp"
#include "cgi/instances.hpp"
#include "cgi/labels.hpp"
#include "cgi/protocols.hpp"
#include "test_util.hpp"

namespace cgi {
namespace {

using testing::path_graph;
using testing::star_graph;

BitString bits_of(std::uint64_t value, unsigned width) {
  BitString b;
  b.append(value, width);
  return b;
}

// Coordinator indices and per-port neighbor labels, as nodes hold them after
// the label exchange.
struct LabelKnowledge {
  std::vector<Label> labels;
  std::vector<std::optional<std::size_t>> coord;
  std::vector<std::vector<Label>> neighbor_labels;
};

LabelKnowledge label_knowledge(const Graph& g, const NodeSeq& c) {
  LabelKnowledge k;
  k.labels = c_labels(g, c);
  k.coord.assign(g.n(), std::nullopt);
  for (std::size_t i = 0; i < c.size(); ++i) k.coord[c[i]] = i + 1;
  k.neighbor_labels.resize(g.n());
  for (NodeId v = 0; v < g.n(); ++v)
    for (NodeId w : g.neighbors(v)) k.neighbor_labels[v].push_back(k.labels[w]);
  return k;
}

TEST(BfsTest, StarFromCenter) {
  Network net(star_graph(7), NetworkConfig::congest(7, 0));
  BfsTree t = build_bfs(net, 0);
  EXPECT_EQ(t.depth, 1u);
  for (NodeId v = 1; v < 7; ++v) EXPECT_EQ(t.layer[v], 1u);
  EXPECT_EQ(t.child_ports[0].size(), 6u);
  // Leaves hear the root in round 2; the root learns its children in round 3.
  EXPECT_EQ(net.transcript().rounds, 3u);
}

TEST(BfsTest, PathFromEnd) {
  Network net(path_graph(5), NetworkConfig::congest(5, 0));
  BfsTree t = build_bfs(net, 0);
  EXPECT_EQ(t.layer, (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(t.parent(net.topology(), 3), 2u);
  EXPECT_EQ(t.parent(net.topology(), 0), 0u);
}

TEST(BfsTest, RoundsWithinTwiceDepthPlusThree) {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_connected_gnp(64, 0.04 + 0.01 * trial, rng);
    Network net(g, NetworkConfig::congest(64, trial));
    BfsTree t = build_bfs(net, static_cast<NodeId>(trial));
    auto dist = bfs_distances(g, static_cast<NodeId>(trial));
    for (NodeId v = 0; v < 64; ++v) EXPECT_EQ(t.layer[v], dist[v]);
    EXPECT_LE(net.transcript().rounds, 2u * t.depth + 3);
  }
}

TEST(ElectionTest, AllNodes) {
  Graph g = testing::binary_tree(12);
  Network net(g, NetworkConfig::congest(12, 4));
  BfsTree t = build_bfs(net, 0);
  Election e = elect_random_nodes(net, t, 12);
  std::set<NodeId> got(e.seq.begin(), e.seq.end());
  EXPECT_EQ(got.size(), 12u);
  // Highest draw first.
  for (std::size_t i = 1; i < e.seq.size(); ++i)
    EXPECT_GT(e.draws[e.seq[i - 1]], e.draws[e.seq[i]]);
}

TEST(ElectionTest, SingleWinnerIsUniform) {
  Graph g = testing::cycle_graph(8);
  std::vector<int> hits(8, 0);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Network net(g, NetworkConfig::congest(8, seed));
    BfsTree t = build_bfs(net, 0);
    Election e = elect_random_nodes(net, t, 1);
    ASSERT_EQ(e.seq.size(), 1u);
    NodeId best = 0;
    for (NodeId v = 1; v < 8; ++v)
      if (e.draws[v] > e.draws[best]) best = v;
    EXPECT_EQ(e.seq[0], best);
    ++hits[e.seq[0]];
  }
  for (int h : hits) EXPECT_NEAR(h, 250, 60);
}

TEST(ElectionTest, CollectRoundsWithinDepthPlusS) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_connected_gnp(40, 0.08, rng);
    Network net(g, NetworkConfig::congest(40, trial));
    BfsTree t = build_bfs(net, 0);
    const std::size_t s = 1 + trial % 8;
    Election e = elect_random_nodes(net, t, s);
    EXPECT_EQ(e.seq.size(), s);
    EXPECT_LE(e.collect_rounds, t.depth + s + 3);
  }
}

TEST(ElectionTest, CollisionsRare) {
  Graph g = testing::binary_tree(16);
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Network net(g, NetworkConfig::congest(16, seed));
    BfsTree t = build_bfs(net, 0);
    if (elect_random_nodes(net, t, 4).restarts == 0) ++clean;
  }
  EXPECT_GE(clean, 990);
}

TEST(ElectionTest, TooManyRaises) {
  Network net(path_graph(3), NetworkConfig::congest(3, 0));
  BfsTree t = build_bfs(net, 0);
  EXPECT_THROW(elect_random_nodes(net, t, 4), InputError);
}

TEST(ConvergecastTest, AllOnes) {
  Rng rng(3);
  Graph g = random_connected_gnp(30, 0.1, rng);
  Network net(g, NetworkConfig::congest(30, 0));
  BfsTree t = build_bfs(net, 5);
  EXPECT_EQ(convergecast_sum(net, t, std::vector<std::uint64_t>(30, 1), 5), 30u);
}

TEST(ConvergecastTest, ModularOnPath) {
  Network net(path_graph(3), NetworkConfig::congest(3, 0));
  BfsTree t = build_bfs(net, 0);
  EXPECT_EQ(convergecast_sum(net, t, {3, 5, 6}, 3, 7), 0u);
}

TEST(BroadcastTest, PayloadReachesEveryone) {
  Graph g = testing::binary_tree(20);
  Network net(g, NetworkConfig::congest(20, 0));
  BfsTree t = build_bfs(net, 0);
  BitString payload;
  for (int i = 0; i < 77; ++i) payload.push_bit((i * 5) % 3 == 1);
  for (const BitString& got : broadcast(net, t, payload)) EXPECT_EQ(got, payload);
}

TEST(CollectTest, TenItemsDepthFive) {
  Network net(path_graph(6), NetworkConfig::congest(6, 0));
  BfsTree t = build_bfs(net, 0);
  ASSERT_EQ(t.depth, 5u);
  std::vector<std::vector<BitString>> items(6);
  for (std::uint64_t k = 0; k < 10; ++k) items[5].push_back(bits_of(k, 4));
  const std::uint64_t before = net.transcript().rounds;
  auto got = pipelined_collect(net, t, items, 4);
  EXPECT_LE(net.transcript().rounds - before, 18u);
  ASSERT_EQ(got.size(), 10u);
  for (std::uint64_t k = 0; k < 10; ++k) EXPECT_EQ(got[k].read(0, 4), k);
}

TEST(CollectTest, ItemsFromEverywhere) {
  Rng rng(12);
  Graph g = random_connected_gnp(25, 0.15, rng);
  Network net(g, NetworkConfig::congest(25, 0));
  BfsTree t = build_bfs(net, 0);
  std::vector<std::vector<BitString>> items(25);
  std::multiset<std::uint64_t> expect;
  for (NodeId v = 0; v < 25; ++v)
    for (NodeId k = 0; k < v % 3; ++k) {
      items[v].push_back(bits_of(v * 4 + k, 7));
      expect.insert(v * 4 + k);
    }
  std::multiset<std::uint64_t> got;
  for (const auto& b : pipelined_collect(net, t, items, 7)) got.insert(b.read(0, 7));
  EXPECT_EQ(got, expect);
}

TEST(ExchangeTest, NeighborsHearPayloads) {
  Graph g = testing::complete_graph(5);
  Network net(g, NetworkConfig::congest(5, 0));
  std::vector<BitString> payload;
  for (NodeId v = 0; v < 5; ++v) payload.push_back(bits_of(v * 1000 + 7, 70));
  auto heard = exchange_with_neighbors(net, payload, 70);
  for (NodeId v = 0; v < 5; ++v)
    for (std::size_t p = 0; p < g.degree(v); ++p)
      EXPECT_EQ(heard[v][p], payload[g.neighbors(v)[p]]);
}

TEST(ZeroLabelTest, Examples) {
  Graph g = star_graph(6);
  Network net(g, NetworkConfig::congest(6, 0));
  BfsTree t = build_bfs(net, 0);
  // C = (0, 1) covers every neighborhood: leaves see 0, the center sees 1.
  EXPECT_EQ(count_zero_label(net, t, c_labels(g, {0, 1})), 0u);
  EXPECT_EQ(count_zero_label(net, t, c_labels(g, {})), 6u);
}

TEST(ZeroLabelTest, MatchesCentralizedCount) {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_connected_gnp(16, 0.5, rng);
    NodeSeq c{static_cast<NodeId>(trial), 12, 15};
    Network net(g, NetworkConfig::congest(16, trial));
    BfsTree t = build_bfs(net, 0);
    EXPECT_EQ(count_zero_label(net, t, c_labels(g, c)),
              label_class(g, c, Label(3)).size());
  }
}

TEST(ClassSizeTest, CompleteGraph) {
  Graph g = testing::complete_graph(4);
  Network net(g, NetworkConfig::congest(4, 0));
  BfsTree t = build_bfs(net, 0);
  LabelKnowledge k = label_knowledge(g, {0});
  EXPECT_EQ(label_class_size(net, t, k.coord, k.neighbor_labels, {Label::from_string("1")}),
            (std::vector<std::uint64_t>{3}));
}

TEST(ClassSizeTest, AbsentLabelCountsZero) {
  Graph g = path_graph(5);
  Network net(g, NetworkConfig::congest(5, 0));
  BfsTree t = build_bfs(net, 0);
  LabelKnowledge k = label_knowledge(g, {0, 4});
  EXPECT_EQ(label_class_size(net, t, k.coord, k.neighbor_labels, {Label::from_string("11")}),
            (std::vector<std::uint64_t>{0}));
  EXPECT_THROW(
      label_class_size(net, t, k.coord, k.neighbor_labels, {Label::from_string("00")}),
      ContractViolation);
}

TEST(ClassSizeTest, BatchOfTwelve) {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    // Dense core plus a two-node tail, root at the tail end.
    Graph core = random_connected_gnp(30, 0.4, rng);
    Graph g(32);
    for (const Edge& e : core.edges()) g.add_edge(e.first, e.second);
    g.add_edge(0, 30);
    g.add_edge(30, 31);
    NodeSeq c{3, 8, 13, 21, 27};
    LabelKnowledge k = label_knowledge(g, c);
    std::vector<Label> queries;
    for (const auto& [label, size] : class_sizes(g, c))
      if (!label.is_zero() && queries.size() < 12) queries.push_back(label);
    for (std::uint64_t x = 1; queries.size() < 12 && x < 32; ++x) {
      Label l(5);
      for (unsigned b = 0; b < 5; ++b) l.set(b, (x >> b) & 1u);
      if (std::find(queries.begin(), queries.end(), l) == queries.end()) queries.push_back(l);
    }
    ASSERT_EQ(queries.size(), 12u);

    Network net(g, NetworkConfig::congest(32, trial));
    BfsTree t = build_bfs(net, 31);
    const std::uint64_t before = net.transcript().rounds;
    auto counts = label_class_size(net, t, k.coord, k.neighbor_labels, queries);
    EXPECT_LE(net.transcript().rounds - before, t.depth + 12 + 3) << "depth " << t.depth;
    for (std::size_t q = 0; q < 12; ++q)
      EXPECT_EQ(counts[q], label_class(g, c, queries[q]).size());
  }
}

void expect_numbering(const std::vector<std::optional<std::uint32_t>>& idx,
                      const std::vector<bool>& member) {
  std::set<std::uint32_t> seen;
  std::size_t members = 0;
  for (std::size_t v = 0; v < idx.size(); ++v) {
    EXPECT_EQ(idx[v].has_value(), static_cast<bool>(member[v]));
    if (idx[v]) seen.insert(*idx[v]);
    members += member[v];
  }
  EXPECT_EQ(seen.size(), members);
  if (members > 0) {
    EXPECT_EQ(*seen.begin(), 1u);
    EXPECT_EQ(*seen.rbegin(), members);
  }
}

TEST(NumberingTest, Examples) {
  Graph g = testing::binary_tree(10);
  Network net(g, NetworkConfig::congest(10, 0));
  BfsTree t = build_bfs(net, 0);
  std::vector<bool> all(10, true);
  expect_numbering(assign_unique_numbers(net, t, all), all);
  std::vector<bool> one(10, false);
  one[7] = true;
  auto idx = assign_unique_numbers(net, t, one);
  EXPECT_EQ(idx[7], 1u);
  expect_numbering(idx, one);
}

TEST(NumberingTest, RandomMembers) {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_connected_gnp(32, 0.1, rng);
    std::vector<bool> member(32);
    for (NodeId v = 0; v < 32; ++v) member[v] = rng() & 1u;
    Network net(g, NetworkConfig::congest(32, trial));
    BfsTree t = build_bfs(net, 0);
    expect_numbering(assign_unique_numbers(net, t, member), member);
  }
}

TEST(VerdictTest, Unanimous) {
  Rng rng(2);
  Graph g = random_connected_gnp(20, 0.2, rng);
  for (bool accept : {true, false}) {
    Network net(g, NetworkConfig::congest(20, 0));
    BfsTree t = build_bfs(net, 0);
    broadcast_verdict(net, t, accept);
    for (const auto& out : net.transcript().outputs)
      EXPECT_EQ(out, accept ? "accept" : "reject");
  }
}

}  // namespace
}  // namespace cgi
