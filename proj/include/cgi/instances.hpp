#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgi/graph.hpp"
#include "cgi/random.hpp"

namespace cgi {

/// G(n, p).
Graph random_gnp(NodeId n, double p, Rng& rng);
/// G(n, p) resampled until connected. Throws InputError when p = 0 and n > 1.
Graph random_connected_gnp(NodeId n, double p, Rng& rng);
/// Uniformly random permutation of 0..n-1.
Bijection random_bijection(NodeId n, Rng& rng);

/// A (G_U, G_K) pair with a checkable claim about it.
struct CertifiedPair {
  Graph gu;
  Graph gk;
  /// Set for isomorphic pairs: gk = iso(gu).
  std::optional<Bijection> iso;
  /// For far pairs: |E(gu)| - |E(gk)|, a lower bound on the edge distance
  /// under every bijection.
  std::size_t edge_gap = 0;
  /// Distance parameter the far certificate was issued for.
  double eps = 0.0;
  std::string reason;

  /// Re-checks the certificate against the graphs.
  bool verify() const;
  nlohmann::json to_json() const;
};

/// gu ~ G(n, p) conditioned on connectivity, gk = pi(gu) for a uniform pi.
CertifiedPair gen_isomorphic_pair(NodeId n, double edge_prob, std::uint64_t seed);

/// Connected gu and a relabeled subgraph gk with floor(eps n^2) + 1 fewer
/// edges, so every bijection leaves more than eps n^2 differing edges.
/// Throws InputError when n(n-1)/2 cannot hold the gap.
CertifiedPair gen_far_pair(NodeId n, double eps, std::uint64_t seed);

/// k x k bit matrix; x[a][b] = 1 iff (a_1^a, a_2^b) is in the set.
using BitMatrix = std::vector<std::vector<bool>>;

/// All 2^(k^2) matrices, in the order of their row-major bit value.
std::vector<BitMatrix> all_bit_matrices(std::size_t k);

/// The gadget G_{x,y} on 4k + 15 nodes. Alice's half holds u, u', u'', the
/// paths A_1 and A_2, two tails on u and one on each path start; Bob's half
/// mirrors it with three tails on v. The halves meet on the edge (u, v).
Graph decision_lb_graph(const BitMatrix& x, const BitMatrix& y);

struct DecisionLbPair {
  Graph gu;  ///< G_{x,y}
  Graph gk;  ///< G_{x,x}
};
DecisionLbPair gen_decision_lb(const BitMatrix& x, const BitMatrix& y);

/// Recovers (x, y) from any relabeling of G_{x,y} by peeling u and v (two and
/// three leaf neighbors), then u', u'', the paths and their tails. nullopt
/// when the graph does not have the gadget's shape.
std::optional<std::pair<BitMatrix, BitMatrix>> decode_decision_lb(const Graph& g,
                                                                  std::size_t k);

/// G_1 and G_2 on n nodes, both connected, with |E(G_1)| = (1+eps)|E(G_2)|
/// (rounded when no exact integer split exists).
struct LbBasePair {
  Graph g1;
  Graph g2;
};
LbBasePair gen_lb_base_pair(NodeId n, double eps, std::uint64_t seed);

/// G_{i,j}: G_i on 0..n-1, G_j on n..2n-1 and a path of D nodes from node 0
/// to node n, interior nodes 2n..2n+D-3.
Graph gen_testing_lb(int i, int j, std::uint32_t d, const Graph& g1, const Graph& g2);

/// Graph with node labels and explicit port numbers.
struct LabeledGraph {
  Graph g;
  std::vector<std::uint32_t> label;
  /// ports[v][p] is the neighbor behind port p + 1.
  std::vector<std::vector<NodeId>> ports;

  std::size_t port_of(NodeId v, NodeId w) const;
};

enum class Orientation { kAscending, kDescending };
enum class LabelSet { kA, kB };

/// G_{i,j}(S_1, S_2, o) with A = 1..n, B = n+1..2n, L = 2n+1..2n+D-2. Ports
/// inside G_i follow ascending neighbor index; the path port at an attachment
/// node is deg + 1. Path ports alternate so the labeled path reads the same
/// from both ends. Throws InputError for odd D.
LabeledGraph gen_testing_lb_labeled(int i, int j, std::uint32_t d, LabelSet s1, LabelSet s2,
                                    Orientation o, const Graph& g1, const Graph& g2);

/// What v can learn in r rounds: its label and every (label, port, label,
/// port) edge record whose near end lies within distance r - 1, sorted.
std::vector<std::uint64_t> labeled_view(const LabeledGraph& lg, NodeId v, std::uint32_t r);

}  // namespace cgi
