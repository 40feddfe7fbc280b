#include "cgi/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cgi/errors.hpp"

namespace cgi {

Graph random_gnp(NodeId n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0,1]");
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

Graph random_connected_gnp(NodeId n, double p, Rng& rng) {
  if (n > 1 && p <= 0.0) throw InputError("G(n, 0) is never connected for n > 1");
  for (;;) {
    Graph g = random_gnp(n, p, rng);
    if (is_connected(g)) return g;
  }
}

Bijection random_bijection(NodeId n, Rng& rng) {
  std::vector<NodeId> image(n);
  std::iota(image.begin(), image.end(), NodeId{0});
  std::shuffle(image.begin(), image.end(), rng);
  return Bijection(std::move(image));
}

bool CertifiedPair::verify() const {
  if (gu.n() != gk.n()) return false;
  if (iso) return iso->size() == gu.n() && apply(*iso, gu) == gk;
  if (gu.num_edges() < gk.num_edges()) return false;
  const double n = gu.n();
  return gu.num_edges() - gk.num_edges() == edge_gap &&
         static_cast<double>(edge_gap) > eps * n * n;
}

nlohmann::json CertifiedPair::to_json() const {
  nlohmann::json j = {{"n", gu.n()},
                      {"edges_gu", gu.num_edges()},
                      {"edges_gk", gk.num_edges()},
                      {"reason", reason}};
  if (iso) {
    j["kind"] = "isomorphism";
    j["pi"] = iso->image();
  } else {
    j["kind"] = "edge_gap";
    j["edge_gap"] = edge_gap;
    j["eps"] = eps;
  }
  return j;
}

CertifiedPair gen_isomorphic_pair(NodeId n, double edge_prob, std::uint64_t seed) {
  if (n < 2) throw InputError("isomorphic pair needs n >= 2");
  Rng rng(derive_seed(seed, {stream::kInstance, 1}));
  CertifiedPair pair;
  pair.gu = random_connected_gnp(n, edge_prob, rng);
  pair.iso = random_bijection(n, rng);
  pair.gk = apply(*pair.iso, pair.gu);
  pair.reason = "gk = pi(gu)";
  return pair;
}

CertifiedPair gen_far_pair(NodeId n, double eps, std::uint64_t seed) {
  if (n < 2) throw InputError("far pair needs n >= 2");
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  const double nn = static_cast<double>(n) * n;
  const std::size_t gap = static_cast<std::size_t>(std::floor(eps * nn)) + 1;
  const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  if (gap > pairs)
    throw InputError("eps=" + std::to_string(eps) + " needs an edge gap of " +
                     std::to_string(gap) + " but n=" + std::to_string(n) +
                     " has only " + std::to_string(pairs) + " pairs");
  Rng rng(derive_seed(seed, {stream::kInstance, 2}));
  const double p = std::min(1.0, 0.5 + static_cast<double>(gap) / (2.0 * pairs));
  Graph gu;
  do {
    gu = random_connected_gnp(n, p, rng);
  } while (gu.num_edges() < gap);
  auto edges = gu.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  Graph h = gu;
  for (std::size_t e = 0; e < gap; ++e) h.remove_edge(edges[e].first, edges[e].second);
  CertifiedPair pair;
  pair.gu = std::move(gu);
  pair.gk = apply(random_bijection(n, rng), h);
  pair.edge_gap = gap;
  pair.eps = eps;
  pair.reason = "edge counts differ by " + std::to_string(gap) + " > eps*n^2 = " +
                std::to_string(eps * nn);
  return pair;
}

std::vector<BitMatrix> all_bit_matrices(std::size_t k) {
  if (k * k > 20) throw RefusalError("too many matrices to enumerate");
  std::vector<BitMatrix> out;
  const std::uint64_t count = 1ULL << (k * k);
  for (std::uint64_t code = 0; code < count; ++code) {
    BitMatrix m(k, std::vector<bool>(k, false));
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        m[a][b] = (code >> (a * k + b)) & 1;
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::size_t matrix_size(const BitMatrix& x) {
  for (const auto& row : x)
    if (row.size() != x.size()) throw InputError("bit matrix must be square");
  return x.size();
}

// Half of the gadget starting at `base`: hub, hub', hub'', two paths of k,
// one tail per path start, then `tails` tails on the hub.
void add_half(Graph& g, NodeId base, std::size_t k, const BitMatrix& m, unsigned tails) {
  const NodeId hub = base, prime = base + 1, dprime = base + 2;
  const auto p1 = [&](std::size_t i) { return static_cast<NodeId>(base + 3 + i); };
  const auto p2 = [&](std::size_t i) { return static_cast<NodeId>(base + 3 + k + i); };
  g.add_edge(hub, prime);
  g.add_edge(prime, dprime);
  for (std::size_t i = 0; i < k; ++i) {
    g.add_edge(hub, p1(i));
    g.add_edge(dprime, p2(i));
    if (i + 1 < k) {
      g.add_edge(p1(i), p1(i + 1));
      g.add_edge(p2(i), p2(i + 1));
    }
    for (std::size_t j = 0; j < k; ++j)
      if (m[i][j]) g.add_edge(p1(i), p2(j));
  }
  const NodeId t = static_cast<NodeId>(base + 3 + 2 * k);
  g.add_edge(p1(0), t);
  g.add_edge(p2(0), t + 1);
  for (unsigned a = 0; a < tails; ++a) g.add_edge(hub, t + 2 + a);
}

}  // namespace

Graph decision_lb_graph(const BitMatrix& x, const BitMatrix& y) {
  const std::size_t k = matrix_size(x);
  if (k == 0) throw InputError("gadget needs k >= 1");
  if (matrix_size(y) != k) throw InputError("x and y must have the same size");
  const NodeId half = static_cast<NodeId>(2 * k + 7);
  Graph g(static_cast<NodeId>(4 * k + 15));
  add_half(g, 0, k, x, 2);
  add_half(g, half, k, y, 3);
  g.add_edge(0, half);
  return g;
}

DecisionLbPair gen_decision_lb(const BitMatrix& x, const BitMatrix& y) {
  return {decision_lb_graph(x, y), decision_lb_graph(x, x)};
}

namespace {

struct HalfView {
  BitMatrix m;
  // Node ids of g in canonical half order (hub tails last).
  std::vector<NodeId> order;
};

std::optional<HalfView> peel_half(const Graph& g, NodeId hub, NodeId other, std::size_t k,
                                  const std::vector<bool>& leaf) {
  std::vector<NodeId> hub_tails, inner;
  for (NodeId w : g.neighbors(hub)) {
    if (w == other) continue;
    (leaf[w] ? hub_tails : inner).push_back(w);
  }
  std::optional<NodeId> prime;
  for (NodeId w : inner) {
    if (g.degree(w) != 2) continue;
    const NodeId far = g.neighbors(w)[0] == hub ? g.neighbors(w)[1] : g.neighbors(w)[0];
    if (leaf[far] || g.adjacent(far, hub)) continue;
    if (prime) return std::nullopt;
    prime = w;
  }
  if (!prime) return std::nullopt;
  const NodeId dprime =
      g.neighbors(*prime)[0] == hub ? g.neighbors(*prime)[1] : g.neighbors(*prime)[0];
  std::set<NodeId> s1, s2;
  for (NodeId w : inner)
    if (w != *prime) s1.insert(w);
  for (NodeId w : g.neighbors(dprime))
    if (w != *prime) s2.insert(w);
  if (s1.size() != k || s2.size() != k) return std::nullopt;

  // Path start is the member with a tail; walk the path inside the set.
  auto walk = [&](const std::set<NodeId>& s) -> std::optional<std::pair<std::vector<NodeId>, NodeId>> {
    std::optional<NodeId> start, tail;
    for (NodeId w : s)
      for (NodeId z : g.neighbors(w))
        if (leaf[z]) {
          if (start) return std::nullopt;
          start = w;
          tail = z;
        }
    if (!start) return std::nullopt;
    std::vector<NodeId> path{*start};
    std::optional<NodeId> prev;
    while (path.size() < k) {
      std::optional<NodeId> next;
      for (NodeId z : g.neighbors(path.back()))
        if (s.count(z) && z != prev) {
          if (next) return std::nullopt;
          next = z;
        }
      if (!next) return std::nullopt;
      prev = path.back();
      path.push_back(*next);
    }
    return std::make_pair(path, *tail);
  };
  const auto w1 = walk(s1);
  const auto w2 = walk(s2);
  if (!w1 || !w2) return std::nullopt;

  HalfView hv;
  hv.m.assign(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) hv.m[a][b] = g.adjacent(w1->first[a], w2->first[b]);
  hv.order = {hub, *prime, dprime};
  hv.order.insert(hv.order.end(), w1->first.begin(), w1->first.end());
  hv.order.insert(hv.order.end(), w2->first.begin(), w2->first.end());
  hv.order.push_back(w1->second);
  hv.order.push_back(w2->second);
  hv.order.insert(hv.order.end(), hub_tails.begin(), hub_tails.end());
  return hv;
}

}  // namespace

std::optional<std::pair<BitMatrix, BitMatrix>> decode_decision_lb(const Graph& g,
                                                                  std::size_t k) {
  if (k == 0 || g.n() != 4 * k + 15) return std::nullopt;
  std::vector<bool> leaf(g.n());
  for (NodeId v = 0; v < g.n(); ++v) leaf[v] = g.degree(v) == 1;
  std::vector<NodeId> two, three;
  for (NodeId v = 0; v < g.n(); ++v) {
    const auto c = std::count_if(g.neighbors(v).begin(), g.neighbors(v).end(),
                                 [&](NodeId w) { return leaf[w]; });
    if (c == 2) two.push_back(v);
    if (c == 3) three.push_back(v);
  }
  if (two.size() != 1 || three.size() != 1) return std::nullopt;
  const NodeId u = two[0], v = three[0];
  if (!g.adjacent(u, v)) return std::nullopt;
  const auto a = peel_half(g, u, v, k, leaf);
  const auto b = peel_half(g, v, u, k, leaf);
  if (!a || !b) return std::nullopt;

  std::vector<NodeId> order = a->order;
  order.insert(order.end(), b->order.begin(), b->order.end());
  if (order.size() != g.n()) return std::nullopt;
  std::vector<NodeId> image(g.n(), g.n());
  for (NodeId pos = 0; pos < order.size(); ++pos) {
    if (image[order[pos]] != g.n()) return std::nullopt;
    image[order[pos]] = pos;
  }
  if (apply(Bijection(image), g) != decision_lb_graph(a->m, b->m)) return std::nullopt;
  return std::make_pair(a->m, b->m);
}

namespace {

Graph connected_with_edges(NodeId n, double p, std::size_t m, Rng& rng) {
  Graph g = random_connected_gnp(n, p, rng);
  while (g.num_edges() < m) {
    const NodeId a = static_cast<NodeId>(uniform_below(rng, n));
    const NodeId b = static_cast<NodeId>(uniform_below(rng, n));
    if (a != b && !g.adjacent(a, b)) g.add_edge(a, b);
  }
  while (g.num_edges() > m) {
    auto edges = g.edges();
    std::shuffle(edges.begin(), edges.end(), rng);
    for (const auto& [a, b] : edges) {
      g.remove_edge(a, b);
      if (is_connected(g)) break;
      g.add_edge(a, b);
    }
  }
  return g;
}

}  // namespace

LbBasePair gen_lb_base_pair(NodeId n, double eps, std::uint64_t seed) {
  if (n < 3) throw InputError("base pair needs n >= 3");
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  Rng rng(derive_seed(seed, {stream::kInstance, 3}));
  Graph g1;
  std::size_t m2 = 0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    g1 = random_connected_gnp(n, 0.6, rng);
    const double target = static_cast<double>(g1.num_edges()) / (1.0 + eps);
    m2 = static_cast<std::size_t>(std::llround(target));
    if (m2 >= n - 1u && std::abs(target - static_cast<double>(m2)) < 1e-9) break;
  }
  if (m2 < n - 1u) throw InputError("G_2 would have fewer than n-1 edges");
  LbBasePair out;
  out.g2 = connected_with_edges(n, 0.6 / (1.0 + eps), m2, rng);
  out.g1 = std::move(g1);
  return out;
}

Graph gen_testing_lb(int i, int j, std::uint32_t d, const Graph& g1, const Graph& g2) {
  if ((i != 1 && i != 2) || (j != 1 && j != 2)) throw InputError("i, j must be 1 or 2");
  if (d < 2) throw InputError("path length D must be at least 2");
  if (g1.n() != g2.n()) throw InputError("G_1 and G_2 must have the same size");
  const NodeId n = g1.n();
  const Graph& left = i == 1 ? g1 : g2;
  const Graph& right = j == 1 ? g1 : g2;
  Graph g(2 * n + d - 2);
  for (const auto& [a, b] : left.edges()) g.add_edge(a, b);
  for (const auto& [a, b] : right.edges()) g.add_edge(n + a, n + b);
  // p_1 = 0, p_2..p_{D-1} = 2n.., p_D = n.
  auto path = [&](std::uint32_t l) -> NodeId {
    if (l == 1) return 0;
    if (l == d) return n;
    return 2 * n + l - 2;
  };
  for (std::uint32_t l = 1; l < d; ++l) g.add_edge(path(l), path(l + 1));
  return g;
}

std::size_t LabeledGraph::port_of(NodeId v, NodeId w) const {
  const auto& p = ports.at(v);
  const auto it = std::find(p.begin(), p.end(), w);
  if (it == p.end()) throw InputError("no port from " + std::to_string(v) + " to " + std::to_string(w));
  return static_cast<std::size_t>(it - p.begin()) + 1;
}

LabeledGraph gen_testing_lb_labeled(int i, int j, std::uint32_t d, LabelSet s1, LabelSet s2,
                                    Orientation o, const Graph& g1, const Graph& g2) {
  if (d % 2 != 0) throw InputError("labeled family needs even D, got " + std::to_string(d));
  if (s1 == s2) throw InputError("the two halves need different label sets");
  LabeledGraph lg;
  lg.g = gen_testing_lb(i, j, d, g1, g2);
  const NodeId n = g1.n();
  const NodeId total = lg.g.n();
  lg.label.assign(total, 0);
  auto base = [&](LabelSet s) { return s == LabelSet::kA ? 1u : n + 1u; };
  for (NodeId v = 0; v < n; ++v) {
    lg.label[v] = base(s1) + v;
    lg.label[n + v] = base(s2) + v;
  }
  for (std::uint32_t l = 2; l + 1 <= d; ++l) {
    const std::uint32_t idx = o == Orientation::kAscending ? l - 2 : d - 1 - l;
    lg.label[2 * n + l - 2] = 2 * n + 1 + idx;
  }

  auto path = [&](std::uint32_t l) -> NodeId {
    if (l == 1) return 0;
    if (l == d) return n;
    return 2 * n + l - 2;
  };
  lg.ports.assign(total, {});
  for (NodeId v = 0; v < 2 * n; ++v)
    for (NodeId w : lg.g.neighbors(v))
      if (w < 2 * n && (v < n) == (w < n)) lg.ports[v].push_back(w);
  lg.ports[0].push_back(path(2));
  lg.ports[n].push_back(path(d - 1));
  // Even positions face p_1 on port 1, odd positions face p_D; the port
  // pattern is then symmetric under reversing the path.
  for (std::uint32_t l = 2; l + 1 <= d; ++l) {
    const NodeId v = path(l);
    if (l % 2 == 0) lg.ports[v] = {path(l - 1), path(l + 1)};
    else lg.ports[v] = {path(l + 1), path(l - 1)};
  }
  return lg;
}

std::vector<std::uint64_t> labeled_view(const LabeledGraph& lg, NodeId v, std::uint32_t r) {
  lg.g.check_node(v);
  const auto dist = bfs_distances(lg.g, v);
  std::vector<std::uint64_t> records;
  for (NodeId x = 0; x < lg.g.n(); ++x) {
    if (r == 0 || dist[x] > r - 1) continue;
    for (std::size_t p = 0; p < lg.ports[x].size(); ++p) {
      const NodeId y = lg.ports[x][p];
      records.push_back((std::uint64_t{lg.label[x]} << 48) | (std::uint64_t{p + 1} << 32) |
                        (std::uint64_t{lg.label[y]} << 16) | lg.port_of(y, x));
    }
  }
  std::sort(records.begin(), records.end());
  records.insert(records.begin(), lg.label[v]);
  return records;
}

}  // namespace cgi
