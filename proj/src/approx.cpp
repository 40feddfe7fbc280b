#include "cgi/approx.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cgi/errors.hpp"
#include "cgi/oracles.hpp"
#include "cgi/protocols.hpp"

namespace cgi {

std::vector<std::uint64_t> known_order(NodeId n, const NodeSeq& p) {
  std::vector<std::uint64_t> rank(n);
  for (NodeId u = 0; u < n; ++u) rank[u] = u;
  for (NodeId u : p) rank.at(u) = std::uint64_t{n} + u;
  return rank;
}

bool ClusterPlan::is_reserved(NodeId u) const {
  return std::find(reserved.begin(), reserved.end(), u) != reserved.end();
}

namespace {

std::size_t msb_of(const Label& l) { return l.msb().value_or(0); }

void sort_by_rank(std::vector<NodeId>& v, const std::vector<std::uint64_t>& rank) {
  std::sort(v.begin(), v.end(), [&](NodeId a, NodeId b) { return rank[a] < rank[b]; });
}

}  // namespace

ClusterPlan build_cluster_plan(const Graph& gk, const NodeSeq& p,
                               const std::vector<std::int64_t>& j) {
  const std::size_t s = p.size();
  if (j.size() != s) throw InputError("need one j_i per anchor");
  validate_seq(gk, p);
  std::int64_t sum = 0;
  for (auto x : j) sum += x;
  if (sum != 0)
    throw ProtocolAbort("cluster size differences sum to " + std::to_string(sum) +
                        ", the zero classes differ in size");
  ClusterPlan plan;
  plan.j = j;
  plan.rank = known_order(gk.n(), p);
  const auto lk = c_labels(gk, p);
  std::vector<std::vector<NodeId>> clusters(s);
  for (NodeId u = 0; u < gk.n(); ++u)
    if (auto m = msb_of(lk[u]); m != 0) clusters[m - 1].push_back(u);
  plan.jk.resize(s);
  std::vector<bool> in_p(gk.n(), false);
  for (NodeId u : p) in_p[u] = true;
  for (std::size_t i = 0; i < s; ++i) {
    plan.jk[i] = clusters[i].size();
    if (j[i] >= 0) continue;
    auto& cl = clusters[i];
    sort_by_rank(cl, plan.rank);
    const std::size_t need = static_cast<std::size_t>(-j[i]);
    if (need > cl.size() || std::any_of(cl.begin(), cl.begin() + need, [&](NodeId u) { return in_p[u]; }))
      throw ProtocolAbort("cluster " + std::to_string(i + 1) + " cannot give up " +
                          std::to_string(need) + " nodes outside P");
    plan.reserved.insert(plan.reserved.end(), cl.begin(), cl.begin() + need);
  }
  sort_by_rank(plan.reserved, plan.rank);
  plan.slice_begin.assign(s, 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < s; ++i) {
    plan.slice_begin[i] = offset;
    if (j[i] > 0) offset += static_cast<std::size_t>(j[i]);
  }
  return plan;
}

std::vector<std::pair<NodeId, NodeId>> assign_g_cluster(
    std::size_t i, const ClusterPlan& plan, const Graph& gk, const NodeSeq& c,
    const NodeSeq& p, const std::vector<std::pair<NodeId, Label>>& members, Rng& rng) {
  if (i < 1 || i > plan.j.size()) throw InputError("cluster index out of range");
  const auto lk = c_labels(gk, p);
  const std::int64_t ji = plan.j[i - 1];
  std::set<NodeId> reserved(plan.reserved.begin(), plan.reserved.end());

  std::vector<std::pair<NodeId, NodeId>> out;
  std::map<Label, std::vector<NodeId>> dom, cod;
  std::set<NodeId> taken;
  for (const auto& [v, l] : members) {
    if (msb_of(l) != i)
      throw ContractViolation("node " + std::to_string(v) + " with label " + l.to_string() +
                              " is not in cluster " + std::to_string(i));
    const auto a = std::find(c.begin(), c.end(), v);
    if (a != c.end()) {
      const NodeId image = p[static_cast<std::size_t>(a - c.begin())];
      if (lk[image] != l) throw ProtocolAbort("anchor labels differ between C and P");
      out.emplace_back(v, image);
      taken.insert(image);
    } else {
      dom[l].push_back(v);
    }
  }
  for (NodeId u = 0; u < gk.n(); ++u)
    if (msb_of(lk[u]) == i && !taken.count(u)) cod[lk[u]].push_back(u);
  for (auto& [l, v] : cod) sort_by_rank(v, plan.rank);

  std::vector<NodeId> rest_dom, rest_cod;
  std::set<Label> labels;
  for (const auto& [l, v] : dom) labels.insert(l);
  for (const auto& [l, v] : cod) labels.insert(l);
  for (const Label& l : labels) {
    auto d = dom[l];
    std::vector<NodeId> k_free, k_all = cod[l];
    for (NodeId u : k_all)
      if (!reserved.count(u)) k_free.push_back(u);
    if (d.size() == k_all.size()) {
      std::shuffle(k_free.begin(), k_free.end(), rng);
      if (k_free.size() < d.size()) std::shuffle(d.begin(), d.end(), rng);
      for (std::size_t a = 0; a < k_free.size(); ++a) out.emplace_back(d[a], k_free[a]);
      rest_dom.insert(rest_dom.end(), d.begin() + static_cast<std::ptrdiff_t>(k_free.size()), d.end());
    } else {
      rest_dom.insert(rest_dom.end(), d.begin(), d.end());
      rest_cod.insert(rest_cod.end(), k_free.begin(), k_free.end());
    }
  }

  const std::size_t surplus = ji > 0 ? static_cast<std::size_t>(ji) : 0;
  if (rest_dom.size() != rest_cod.size() + surplus)
    throw ProtocolAbort("cluster " + std::to_string(i) + ": " + std::to_string(rest_dom.size()) +
                        " unmatched members for " + std::to_string(rest_cod.size()) +
                        " free nodes and " + std::to_string(surplus) + " reserved ones");
  std::shuffle(rest_dom.begin(), rest_dom.end(), rng);
  std::shuffle(rest_cod.begin(), rest_cod.end(), rng);
  for (std::size_t a = 0; a < rest_cod.size(); ++a) out.emplace_back(rest_dom[a], rest_cod[a]);
  for (std::size_t a = 0; a < surplus; ++a) {
    const std::size_t pos = plan.slice_begin[i - 1] + a;
    if (pos >= plan.reserved.size()) throw ProtocolAbort("surplus slice runs past R");
    out.emplace_back(rest_dom[rest_cod.size() + a], plan.reserved[pos]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::optional<NodeId>> match_zero_class(Network& net, const BfsTree& tree,
                                                    const std::vector<bool>& in_y,
                                                    const std::vector<NodeId>& y_prime) {
  const auto index = assign_unique_numbers(net, tree, in_y, "approx/numbering");
  std::vector<std::optional<NodeId>> out(net.n());
  std::size_t count = 0;
  for (NodeId v = 0; v < net.n(); ++v) {
    if (!index[v]) continue;
    ++count;
    if (*index[v] > y_prime.size())
      throw ProtocolAbort("zero class of G_U is larger than that of G_K");
    out[v] = y_prime[*index[v] - 1];
  }
  if (count != y_prime.size())
    throw ProtocolAbort("zero class sizes differ: " + std::to_string(count) + " vs " +
                        std::to_string(y_prime.size()));
  return out;
}

namespace {

// Coordinators send g(v) to their cluster members; members listen.
class AssignNode final : public NodeProgram {
 public:
  AssignNode(std::optional<std::size_t> coord, const std::vector<Label>* nbr_labels,
             bool expects, unsigned width, const ClusterPlan* plan, const Graph* gk,
             const NodeSeq* c, const NodeSeq* p)
      : coord_(coord), nbr_labels_(nbr_labels), expects_(expects), width_(width),
        plan_(plan), gk_(gk), c_(c), p_(p) {}

  void step(NodeContext& ctx) override {
    for (std::size_t q = 0; q < ctx.degree(); ++q)
      if (ctx.has_message(q)) {
        if (image_) throw ProtocolAbort("node " + std::to_string(ctx.id()) + " got two images");
        image_ = static_cast<NodeId>(ctx.message(q).read(0, width_));
      }
    if (coord_ && !sent_) {
      std::vector<std::pair<NodeId, Label>> members;
      for (std::size_t q = 0; q < ctx.degree(); ++q)
        if ((*nbr_labels_)[q].msb() == coord_) members.emplace_back(ctx.peer(q), (*nbr_labels_)[q]);
      for (const auto& [v, u] : assign_g_cluster(*coord_, *plan_, *gk_, *c_, *p_, members, ctx.rng())) {
        BitString msg;
        msg.append(u, width_);
        ctx.send(ctx.port_of(v), std::move(msg));
      }
      sent_ = true;
    }
  }

  bool done() const override { return (!coord_ || sent_) && (!expects_ || image_); }

  std::optional<NodeId> image_;

 private:
  std::optional<std::size_t> coord_;
  const std::vector<Label>* nbr_labels_;
  bool expects_;
  unsigned width_;
  const ClusterPlan* plan_;
  const Graph* gk_;
  const NodeSeq* c_;
  const NodeSeq* p_;
  bool sent_ = false;
};

std::map<Label, std::vector<NodeId>> classes_of(const std::vector<Label>& labels) {
  std::map<Label, std::vector<NodeId>> out;
  for (NodeId v = 0; v < labels.size(); ++v) out[labels[v]].push_back(v);
  return out;
}

}  // namespace

nlohmann::json ApproxResult::to_json() const {
  nlohmann::json j = {{"success", success},
                      {"delta", delta},
                      {"tester", tester.to_json()},
                      {"rounds", transcript.rounds},
                      {"bits", transcript.total_bits},
                      {"y", y_size},
                      {"r", plan.reserved.size()},
                      {"b", b_size}};
  if (success) j["g"] = g;
  return j;
}

ApproxResult run_approx_iso(const Graph& topology, const Graph& gk, const TestParams& params,
                            const NetworkConfig& cfg) {
  Network net(topology, cfg);
  const NodeId n = net.n();
  TesterState st;
  TesterOptions topts;
  topts.zero_label_check = true;
  ApproxResult res;
  res.tester = run_tester_on(net, gk, params, topts, &st);
  res.c = st.c;
  if (!res.tester.accept) {
    res.transcript = net.take_transcript();
    return res;
  }
  const NodeSeq& c = st.c;
  res.p = *res.tester.accepting_p;
  const NodeSeq& p = res.p;
  const std::size_t s = c.size();
  const unsigned id_bits = bits_for(n - 1);

  // P to every node.
  std::vector<BitString> p_items;
  for (NodeId u : p) {
    BitString b;
    b.append(u, id_bits);
    p_items.push_back(std::move(b));
  }
  broadcast_items(net, st.tree, p_items, id_bits, "approx/p");

  // (i, j_i) up the tree and back down.
  const auto lk = c_labels(gk, p);
  const unsigned i_bits = bits_for(s - 1);
  const unsigned j_bits = bits_for(n);
  const unsigned width = i_bits + 1 + j_bits;
  std::vector<std::vector<BitString>> up(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!st.coord_index[v]) continue;
    const std::size_t i = *st.coord_index[v];
    std::int64_t ju = 0, jk = 0;
    for (const Label& l : st.neighbor_labels[v]) ju += l.msb() == i;
    for (const Label& l : lk) jk += l.msb() == i;
    const std::int64_t ji = ju - jk;
    BitString b;
    b.append(i - 1, i_bits);
    b.push_bit(ji < 0);
    b.append(static_cast<std::uint64_t>(ji < 0 ? -ji : ji), j_bits);
    up[v].push_back(std::move(b));
  }
  auto gathered = pipelined_collect(net, st.tree, up, width, "approx/clusters");
  std::sort(gathered.begin(), gathered.end(), [&](const BitString& a, const BitString& b) {
    return a.read(0, i_bits) < b.read(0, i_bits);
  });
  const auto heard = broadcast_items(net, st.tree, gathered, width, "approx/plan");
  std::vector<std::int64_t> j(s, 0);
  for (const BitString& b : heard[st.tree.root]) {
    const auto mag = static_cast<std::int64_t>(b.read(i_bits + 1, j_bits));
    j.at(b.read(0, i_bits)) = b.bit(i_bits) ? -mag : mag;
  }
  res.plan = build_cluster_plan(gk, p, j);

  // Zero class.
  std::vector<bool> in_y(n, false);
  for (NodeId v = 0; v < n; ++v) in_y[v] = st.labels[v].is_zero() && !st.coord_index[v];
  std::vector<bool> in_p(n, false);
  for (NodeId u : p) in_p[u] = true;
  std::vector<NodeId> y_prime;
  for (NodeId u = 0; u < n; ++u)
    if (lk[u].is_zero() && !in_p[u]) y_prime.push_back(u);
  sort_by_rank(y_prime, res.plan.rank);
  const auto zero = match_zero_class(net, st.tree, in_y, y_prime);

  // Coordinators hand out g.
  std::vector<AssignNode> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    nodes.emplace_back(st.coord_index[v], &st.neighbor_labels[v], !st.labels[v].is_zero(),
                       id_bits, &res.plan, &gk, &c, &p);
  net.run("approx/assign", nodes);

  res.g.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (zero[v]) res.g[v] = *zero[v];
    else if (nodes[v].image_) res.g[v] = *nodes[v].image_;
    else if (st.coord_index[v]) res.g[v] = p[*st.coord_index[v] - 1];
    else throw ProtocolAbort("node " + std::to_string(v) + " has no image");
  }
  std::vector<NodeId> sorted = res.g;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ProtocolAbort("assembled g is not a bijection");
  for (NodeId v = 0; v < n; ++v) net.set_output(v, std::to_string(res.g[v]));

  res.success = true;
  res.delta = edge_distance(apply(Bijection(res.g), topology), gk);
  const auto lu = c_labels(topology, c);
  res.y_size = static_cast<std::size_t>(std::count_if(lu.begin(), lu.end(), [](const Label& l) { return l.is_zero(); }));
  const auto su = classes_of(lu), sk = classes_of(lk);
  for (const auto& [l, v] : su) {
    const auto it = sk.find(l);
    if (it == sk.end() || it->second.size() != v.size()) res.b_size += v.size();
  }
  res.transcript = net.take_transcript();
  return res;
}

Bijection coupled_reference(const Graph& gu, const Graph& gk, const NodeSeq& c,
                            const NodeSeq& p, const std::vector<NodeId>& g, Rng& rng) {
  const NodeId n = gu.n();
  if (gk.n() != n || g.size() != n) throw InputError("size mismatch");
  const auto lu = c_labels(gu, c), lk = c_labels(gk, p);
  const auto su = classes_of(lu), sk = classes_of(lk);
  auto equal = [&](const Label& l) {
    const auto a = su.find(l), b = sk.find(l);
    return a != su.end() && b != sk.end() && a->second.size() == b->second.size();
  };
  std::vector<std::optional<NodeId>> f(n);
  std::vector<bool> used(n, false);
  for (std::size_t a = 0; a < c.size(); ++a) {
    f[c[a]] = p[a];
    used[p[a]] = true;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (f[v] || used[g[v]]) continue;
    const bool keep = equal(lu[v]) ? lk[g[v]] == lu[v] : !equal(lk[g[v]]);
    if (keep) {
      f[v] = g[v];
      used[g[v]] = true;
    }
  }
  // Equal classes complete inside themselves, the rest among the leftovers.
  std::vector<NodeId> loose_dom, loose_cod;
  for (const auto& [l, members] : su) {
    std::vector<NodeId> d, k;
    for (NodeId v : members)
      if (!f[v]) d.push_back(v);
    if (equal(l)) {
      for (NodeId u : sk.at(l))
        if (!used[u]) k.push_back(u);
      std::shuffle(k.begin(), k.end(), rng);
      for (std::size_t a = 0; a < d.size(); ++a) {
        f[d[a]] = k[a];
        used[k[a]] = true;
      }
    } else {
      loose_dom.insert(loose_dom.end(), d.begin(), d.end());
    }
  }
  for (NodeId u = 0; u < n; ++u)
    if (!used[u]) loose_cod.push_back(u);
  std::shuffle(loose_cod.begin(), loose_cod.end(), rng);
  if (loose_cod.size() != loose_dom.size()) throw ProtocolAbort("reference completion failed");
  for (std::size_t a = 0; a < loose_dom.size(); ++a) f[loose_dom[a]] = loose_cod[a];
  std::vector<NodeId> image(n);
  for (NodeId v = 0; v < n; ++v) image[v] = *f[v];
  return Bijection(std::move(image));
}

}  // namespace cgi
