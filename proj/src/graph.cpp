#include "cgi/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>

#include "cgi/errors.hpp"

namespace cgi {

Graph::Graph(NodeId n)
    : n_(n), adj_(static_cast<std::size_t>(n) * n, 0), nbrs_(n) {}

Graph Graph::from_edges(NodeId n, std::span<const Edge> edges) {
  Graph g(n);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::check_node(NodeId v) const {
  if (v >= n_)
    throw InputError("node " + std::to_string(v) + " out of range (n=" +
                     std::to_string(n_) + ")");
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  return adjacent(u, v);
}

void Graph::add_edge(NodeId u, NodeId v) {
  check_node(u);
  check_node(v);
  if (u == v) throw InputError("self-loop at node " + std::to_string(u));
  if (adjacent(u, v))
    throw InputError("duplicate edge " + std::to_string(u) + " " +
                     std::to_string(v));
  adj_[index(u, v)] = adj_[index(v, u)] = 1;
  nbrs_[u].insert(std::lower_bound(nbrs_[u].begin(), nbrs_[u].end(), v), v);
  nbrs_[v].insert(std::lower_bound(nbrs_[v].begin(), nbrs_[v].end(), u), u);
  ++m_;
}

void Graph::remove_edge(NodeId u, NodeId v) {
  check_node(u);
  check_node(v);
  if (!adjacent(u, v))
    throw InputError("no edge " + std::to_string(u) + " " + std::to_string(v));
  adj_[index(u, v)] = adj_[index(v, u)] = 0;
  nbrs_[u].erase(std::lower_bound(nbrs_[u].begin(), nbrs_[u].end(), v));
  nbrs_[v].erase(std::lower_bound(nbrs_[v].begin(), nbrs_[v].end(), u));
  --m_;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (NodeId u = 0; u < n_; ++u)
    for (NodeId v : nbrs_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

void validate_seq(const Graph& g, const NodeSeq& seq) {
  std::vector<bool> seen(g.n(), false);
  for (NodeId v : seq) {
    g.check_node(v);
    if (seen[v])
      throw InputError("node sequence repeats node " + std::to_string(v));
    seen[v] = true;
  }
}

Bijection::Bijection(std::vector<NodeId> image) : image_(std::move(image)) {
  std::vector<bool> hit(image_.size(), false);
  for (NodeId v : image_) {
    if (v >= image_.size() || hit[v])
      throw InputError("not a bijection on 0.." +
                       std::to_string(image_.size()) + "-1");
    hit[v] = true;
  }
}

Bijection Bijection::identity(NodeId n) {
  std::vector<NodeId> id(n);
  std::iota(id.begin(), id.end(), NodeId{0});
  return Bijection(std::move(id));
}

Bijection Bijection::inverse() const {
  std::vector<NodeId> inv(image_.size());
  for (NodeId v = 0; v < image_.size(); ++v) inv[image_[v]] = v;
  return Bijection(std::move(inv));
}

Bijection Bijection::after(const Bijection& inner) const {
  if (inner.size() != size()) throw InputError("bijection size mismatch");
  std::vector<NodeId> out(image_.size());
  for (NodeId v = 0; v < image_.size(); ++v) out[v] = image_[inner(v)];
  return Bijection(std::move(out));
}

NodeSeq Bijection::map(const NodeSeq& seq) const {
  NodeSeq out;
  out.reserve(seq.size());
  for (NodeId v : seq) out.push_back(image_.at(v));
  return out;
}

Graph apply(const Bijection& f, const Graph& g) {
  if (f.size() != g.n()) throw InputError("bijection/graph size mismatch");
  Graph out(g.n());
  for (const auto& [u, v] : g.edges()) out.add_edge(f(u), f(v));
  return out;
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, NodeId src) {
  g.check_node(src);
  std::vector<std::uint32_t> dist(g.n(), std::numeric_limits<std::uint32_t>::max());
  std::queue<NodeId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

bool is_connected(const Graph& g) {
  if (g.n() == 0) return true;
  const auto d = bfs_distances(g, 0);
  return std::none_of(d.begin(), d.end(), [](std::uint32_t x) {
    return x == std::numeric_limits<std::uint32_t>::max();
  });
}

std::uint32_t eccentricity(const Graph& g, NodeId v) {
  const auto d = bfs_distances(g, v);
  const std::uint32_t e = *std::max_element(d.begin(), d.end());
  if (e == std::numeric_limits<std::uint32_t>::max())
    throw InputError("graph is disconnected");
  return e;
}

std::uint32_t diameter(const Graph& g) {
  std::uint32_t d = 0;
  for (NodeId v = 0; v < g.n(); ++v) d = std::max(d, eccentricity(g, v));
  return d;
}

namespace {

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace

Graph read_graph(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) throw InputError("graph file: missing header");
  std::istringstream header(line);
  long long n = -1, m = -1;
  if (!(header >> n >> m) || n < 0 || m < 0)
    throw InputError("graph file: bad header '" + line + "'");
  Graph g(static_cast<NodeId>(n));
  for (long long i = 0; i < m; ++i) {
    if (!next_data_line(in, line))
      throw InputError("graph file: expected " + std::to_string(m) +
                       " edges, got " + std::to_string(i));
    std::istringstream row(line);
    long long u = -1, v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0 || u >= n || v >= n)
      throw InputError("graph file: bad edge line '" + line + "'");
    g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  if (next_data_line(in, line))
    throw InputError("graph file: trailing data '" + line + "'");
  return g;
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.n() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_graph(out, g);
}

void scan_edge_stream(
    std::istream& in,
    const std::function<void(std::uint64_t, std::uint64_t)>& on_edge) {
  std::string line;
  while (next_data_line(in, line)) {
    std::istringstream row(line);
    long long u = -1, v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0)
      throw InputError("edge stream: bad line '" + line + "'");
    on_edge(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(v));
  }
}

}  // namespace cgi
