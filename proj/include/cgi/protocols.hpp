#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cgi/bits.hpp"
#include "cgi/graph.hpp"
#include "cgi/labels.hpp"
#include "cgi/sim.hpp"

namespace cgi {

/// BFS spanning tree as the nodes know it: each node holds its own entry.
struct BfsTree {
  NodeId root = 0;
  std::vector<std::optional<std::size_t>> parent_port;
  std::vector<std::vector<std::size_t>> child_ports;
  std::vector<std::uint32_t> layer;
  std::uint32_t depth = 0;

  /// Parent id of v (v itself for the root).
  NodeId parent(const Graph& g, NodeId v) const;
};

/// Flooding BFS from `root`. Takes depth + 2 rounds: the last layer hears its
/// parent in round depth + 1 and the parent learns its children one round later.
BfsTree build_bfs(Network& net, NodeId root);

struct Election {
  /// Elected nodes, highest drawn number first.
  NodeSeq seq;
  std::uint32_t restarts = 0;
  /// Numbers drawn in the final attempt, per node.
  std::vector<std::uint64_t> draws;
  /// Rounds until the root held the top numbers, final attempt only.
  std::uint64_t collect_rounds = 0;
};

/// Every node draws a number in [1, n^(c+2)]; the root learns the ids of the
/// s highest by priority forwarding of the top s+1 and announces them to all
/// nodes. A repeated number among the top s+1 restarts with fresh draws.
Election elect_random_nodes(Network& net, const BfsTree& tree, std::size_t s,
                            unsigned c = 2);

/// Root's fixed-width items delivered to every node, in order.
std::vector<std::vector<BitString>> broadcast_items(
    Network& net, const BfsTree& tree, const std::vector<BitString>& items,
    unsigned width, std::string_view phase = "broadcast");

/// Arbitrary payload from the root to every node.
std::vector<BitString> broadcast(Network& net, const BfsTree& tree,
                                 const BitString& payload,
                                 std::string_view phase = "broadcast");

/// Sum of per-node values at the root. Partial sums are reduced mod
/// `modulus` at every hop when given. Every partial sum must fit `width` bits.
std::uint64_t convergecast_sum(Network& net, const BfsTree& tree,
                               const std::vector<std::uint64_t>& values,
                               unsigned width,
                               std::optional<std::uint64_t> modulus = std::nullopt,
                               std::string_view phase = "convergecast");

/// All nodes' fixed-width items gathered at the root (arrival order).
std::vector<BitString> pipelined_collect(
    Network& net, const BfsTree& tree,
    const std::vector<std::vector<BitString>>& items, unsigned width,
    std::string_view phase = "collect");

/// Every node sends the same `bits`-bit payload to all its neighbors,
/// fragmented. Result[v][port] is what v heard on that port.
std::vector<std::vector<BitString>> exchange_with_neighbors(
    Network& net, const std::vector<BitString>& payload, std::size_t bits,
    std::string_view phase = "exchange");

/// |S_C(0...0)| at the root; labels[v] is known to v alone.
std::uint64_t count_zero_label(Network& net, const BfsTree& tree,
                               const std::vector<Label>& labels);

/// Class sizes |S_C(l)| at the root for nonzero labels `queries`. Node v knows
/// coord_index[v] (i when v = c_i) and the labels of its neighbors by port.
/// The coordinator c_msb(l) counts its neighbors carrying l.
std::vector<std::uint64_t> label_class_size(
    Network& net, const BfsTree& tree,
    const std::vector<std::optional<std::size_t>>& coord_index,
    const std::vector<std::vector<Label>>& neighbor_labels,
    const std::vector<Label>& queries);

/// Members learn distinct indices 1..|Y| via subtree counts and interval
/// splitting. Non-members get nullopt.
std::vector<std::optional<std::uint32_t>> assign_unique_numbers(
    Network& net, const BfsTree& tree, const std::vector<bool>& member,
    std::string_view phase = "numbering");

/// Root's verdict to every node; each node records it as its output.
void broadcast_verdict(Network& net, const BfsTree& tree, bool accept);

}  // namespace cgi
