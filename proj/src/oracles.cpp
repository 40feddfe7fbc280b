#include "cgi/oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "cgi/errors.hpp"

namespace cgi {

namespace {

void require_same_n(const Graph& g, const Graph& h) {
  if (g.n() != h.n())
    throw InputError("graphs differ in node count: " + std::to_string(g.n()) +
                     " vs " + std::to_string(h.n()));
}

void require_cap(NodeId n, NodeId cap) {
  if (n > cap)
    throw RefusalError("exhaustive search refused: n=" + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
}

std::vector<std::size_t> sorted_degrees(const Graph& g) {
  std::vector<std::size_t> d(g.n());
  for (NodeId v = 0; v < g.n(); ++v) d[v] = g.degree(v);
  std::sort(d.begin(), d.end());
  return d;
}

bool preserves_edges(const Graph& g, const Graph& h,
                     const std::vector<NodeId>& perm) {
  for (NodeId u = 0; u < g.n(); ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v && !h.adjacent(perm[u], perm[v])) return false;
  return true;
}

}  // namespace

std::size_t hamming_distance(const Graph& g, const Graph& h) {
  return 2 * edge_distance(g, h);
}

std::size_t edge_distance(const Graph& g, const Graph& h) {
  require_same_n(g, h);
  std::size_t d = 0;
  for (NodeId u = 0; u < g.n(); ++u)
    for (NodeId v = u + 1; v < g.n(); ++v)
      if (g.adjacent(u, v) != h.adjacent(u, v)) ++d;
  return d;
}

std::optional<Bijection> brute_iso(const Graph& g, const Graph& h, NodeId cap) {
  require_same_n(g, h);
  require_cap(g.n(), cap);
  if (g.num_edges() != h.num_edges() || sorted_degrees(g) != sorted_degrees(h))
    return std::nullopt;
  std::vector<NodeId> perm(g.n());
  std::iota(perm.begin(), perm.end(), NodeId{0});
  do {
    if (preserves_edges(g, h, perm)) return Bijection(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

std::size_t min_bijection_distance(const Graph& g, const Graph& h, NodeId cap) {
  require_same_n(g, h);
  require_cap(g.n(), cap);
  const NodeId n = g.n();
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::size_t best = static_cast<std::size_t>(n) * n;
  do {
    std::size_t d = 0;
    for (NodeId u = 0; u < n && d < best; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (g.adjacent(u, v) != h.adjacent(perm[u], perm[v])) ++d;
    best = std::min(best, d);
  } while (best > 0 && std::next_permutation(perm.begin(), perm.end()));
  return 2 * best;
}

namespace {

using Coloring = std::vector<std::uint32_t>;

// Refines colorings of g and h jointly so equal colors mean the same class in
// both graphs. Returns false when the class sizes diverge.
bool refine(const Graph& g, const Graph& h, Coloring& cg, Coloring& ch) {
  const NodeId n = g.n();
  std::size_t classes = 0;
  while (true) {
    using Sig = std::pair<std::uint32_t, std::vector<std::uint32_t>>;
    std::map<Sig, std::uint32_t> ids;
    std::vector<Sig> sg(n), sh(n);
    auto signature = [](const Graph& gr, const Coloring& c, NodeId v) {
      Sig s{c[v], {}};
      for (NodeId w : gr.neighbors(v)) s.second.push_back(c[w]);
      std::sort(s.second.begin(), s.second.end());
      return s;
    };
    for (NodeId v = 0; v < n; ++v) {
      sg[v] = signature(g, cg, v);
      sh[v] = signature(h, ch, v);
      ids.emplace(sg[v], 0);
      ids.emplace(sh[v], 0);
    }
    std::uint32_t next = 0;
    for (auto& [sig, id] : ids) id = next++;
    std::vector<std::size_t> count_g(next, 0), count_h(next, 0);
    for (NodeId v = 0; v < n; ++v) {
      cg[v] = ids[sg[v]];
      ch[v] = ids[sh[v]];
      ++count_g[cg[v]];
      ++count_h[ch[v]];
    }
    if (count_g != count_h) return false;
    if (next == classes) return true;
    classes = next;
  }
}

std::optional<std::vector<NodeId>> search(const Graph& g, const Graph& h,
                                          Coloring cg, Coloring ch) {
  if (!refine(g, h, cg, ch)) return std::nullopt;
  const NodeId n = g.n();
  std::vector<std::size_t> size(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) ++size[cg[v]];
  // Target cell: the first non-singleton color, split on its lowest g-node.
  NodeId pick = n;
  for (NodeId v = 0; v < n; ++v) {
    if (size[cg[v]] > 1 && (pick == n || cg[v] < cg[pick])) pick = v;
  }
  if (pick == n) {
    std::vector<NodeId> perm(n);
    std::vector<NodeId> by_color(n);
    for (NodeId w = 0; w < n; ++w) by_color[ch[w]] = w;
    for (NodeId v = 0; v < n; ++v) perm[v] = by_color[cg[v]];
    if (preserves_edges(g, h, perm)) return perm;
    return std::nullopt;
  }
  const std::uint32_t fresh = static_cast<std::uint32_t>(n);
  for (NodeId w = 0; w < n; ++w) {
    if (ch[w] != cg[pick]) continue;
    Coloring ng = cg, nh = ch;
    ng[pick] = fresh;
    nh[w] = fresh;
    if (auto found = search(g, h, std::move(ng), std::move(nh))) return found;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Bijection> find_isomorphism(const Graph& g, const Graph& h) {
  require_same_n(g, h);
  if (g.num_edges() != h.num_edges()) return std::nullopt;
  if (g.n() == 0) return Bijection{};
  auto perm = search(g, h, Coloring(g.n(), 0), Coloring(h.n(), 0));
  if (!perm) return std::nullopt;
  return Bijection(std::move(*perm));
}

}  // namespace cgi
