#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cgi {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple graph on dense node ids 0..n-1.
///
/// Keeps both an adjacency matrix (O(1) adjacency queries) and sorted
/// neighbor lists (port order for the simulator).
class Graph {
 public:
  Graph() = default;
  explicit Graph(NodeId n);

  /// Throws InputError on self-loops, duplicates, or out-of-range ids.
  static Graph from_edges(NodeId n, std::span<const Edge> edges);

  NodeId n() const { return n_; }
  std::size_t num_edges() const { return m_; }

  bool adjacent(NodeId u, NodeId v) const { return adj_[index(u, v)] != 0; }
  /// Range-checked adjacency query.
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<NodeId>& neighbors(NodeId v) const { return nbrs_[v]; }
  std::size_t degree(NodeId v) const { return nbrs_[v].size(); }

  void add_edge(NodeId u, NodeId v);
  void remove_edge(NodeId u, NodeId v);

  /// All edges as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

  void check_node(NodeId v) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  std::size_t index(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * n_ + v;
  }

  NodeId n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<NodeId>> nbrs_;
};

/// Ordered list of distinct node ids (anchor sequences C and P).
using NodeSeq = std::vector<NodeId>;

/// Throws InputError unless every entry is < g.n() and entries are distinct.
void validate_seq(const Graph& g, const NodeSeq& seq);

/// Total one-to-one map {0..n-1} -> {0..n-1}.
class Bijection {
 public:
  Bijection() = default;
  /// Throws InputError unless `image` is a permutation of 0..n-1.
  explicit Bijection(std::vector<NodeId> image);

  static Bijection identity(NodeId n);

  NodeId size() const { return static_cast<NodeId>(image_.size()); }
  NodeId operator()(NodeId v) const { return image_[v]; }
  const std::vector<NodeId>& image() const { return image_; }

  Bijection inverse() const;
  /// (this ∘ inner)(v) = this(inner(v)).
  Bijection after(const Bijection& inner) const;

  NodeSeq map(const NodeSeq& seq) const;

  friend bool operator==(const Bijection&, const Bijection&) = default;

 private:
  std::vector<NodeId> image_;
};

/// f(G): the graph with edge set {{f(u), f(v)} : {u, v} in E(G)}.
Graph apply(const Bijection& f, const Graph& g);

/// BFS distances from `src`; unreachable nodes get UINT32_MAX.
std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId src);
bool is_connected(const Graph& g);
/// Eccentricity of `v` (throws InputError when g is disconnected).
std::uint32_t eccentricity(const Graph& g, NodeId v);
std::uint32_t diameter(const Graph& g);

// Text format: line 1 "n m", then m lines "u v" with 0 <= u < v < n.
// Lines starting with '#' are ignored.
Graph read_graph(std::istream& in);
Graph load_graph(const std::string& path);
void write_graph(std::ostream& out, const Graph& g);
void save_graph(const std::string& path, const Graph& g);

/// Edge stream: the graph format without the header line. Calls `on_edge`
/// once per line, in file order, without buffering the stream.
void scan_edge_stream(
    std::istream& in,
    const std::function<void(std::uint64_t, std::uint64_t)>& on_edge);

}  // namespace cgi
