#include "cgi/central.hpp"

#include <map>

#include "cgi/bits.hpp"
#include "cgi/errors.hpp"
#include "cgi/protocols.hpp"

namespace cgi {

namespace {

void check_query(const Graph& g, const Query& q) {
  if (q.u >= g.n()) throw InputError("query node " + std::to_string(q.u) + " out of range");
  if (q.kind == Query::Kind::kAdjacency && q.arg >= g.n())
    throw InputError("query node " + std::to_string(q.arg) + " out of range");
}

std::uint64_t tester_seed(std::uint64_t seed) { return derive_seed(seed, {stream::kTester}); }

}  // namespace

Answer local_answer(const Graph& g, const Query& q) {
  switch (q.kind) {
    case Query::Kind::kAdjacency:
      return q.u != q.arg && g.adjacent(q.u, q.arg) ? 1 : 0;
    case Query::Kind::kIncidence:
      if (q.arg >= g.degree(q.u)) return std::nullopt;
      return g.neighbors(q.u)[q.arg];
    case Query::Kind::kDegree:
      return g.degree(q.u);
  }
  return std::nullopt;
}

Answer QueryOracle::answer(const Query& q) {
  check_query(*g_, q);
  ++count_;
  return local_answer(*g_, q);
}

void DensityTester::reset(NodeId n, std::uint64_t seed) {
  Rng rng(seed);
  plan_.clear();
  pos_ = hits_ = 0;
  if (n < 2) return;
  for (std::size_t k = 0; k < q_; ++k) {
    const NodeId u = static_cast<NodeId>(uniform_below(rng, n));
    NodeId v = static_cast<NodeId>(uniform_below(rng, n - 1));
    if (v >= u) ++v;
    plan_.push_back(Query::adjacency(u, v));
  }
}

std::optional<Query> DensityTester::next() {
  if (pos_ == plan_.size()) return std::nullopt;
  return plan_[pos_++];
}

void DensityTester::feed(const Answer& a) { hits_ += a.value_or(0) == 1; }

bool DensityTester::verdict() const {
  return static_cast<double>(hits_) >= rho_ * static_cast<double>(plan_.size());
}

void DegreeTester::reset(NodeId n, std::uint64_t seed) {
  n_ = n;
  rng_.seed(seed);
  asked_ = 0;
  sum_ = 0;
}

std::optional<Query> DegreeTester::next() {
  if (asked_ == q_ || n_ == 0) return std::nullopt;
  ++asked_;
  return Query::degree(static_cast<NodeId>(uniform_below(rng_, n_)));
}

void DegreeTester::feed(const Answer& a) { sum_ += a.value_or(0); }

bool DegreeTester::verdict() const {
  if (asked_ == 0) return true;
  return static_cast<double>(sum_) / static_cast<double>(asked_) <= max_mean_;
}

void RandomWalkTester::reset(NodeId n, std::uint64_t seed) {
  rng_.seed(seed);
  at_ = n == 0 ? 0 : static_cast<NodeId>(uniform_below(rng_, n));
  moves_ = 0;
  pending_degree_.reset();
  awaiting_degree_ = true;
  ok_ = n > 0;
}

std::optional<Query> RandomWalkTester::next() {
  if (!ok_ || moves_ == steps_) return std::nullopt;
  if (awaiting_degree_) return Query::degree(at_);
  return Query::incidence(at_, static_cast<NodeId>(uniform_below(rng_, *pending_degree_)));
}

void RandomWalkTester::feed(const Answer& a) {
  if (awaiting_degree_) {
    const std::uint64_t d = a.value_or(0);
    if (d < min_degree_) ok_ = false;
    if (d == 0) {
      moves_ = steps_;
      return;
    }
    pending_degree_ = d;
    awaiting_degree_ = false;
    return;
  }
  if (!a) throw ContractViolation("incidence query on a valid port came back empty");
  at_ = static_cast<NodeId>(*a);
  ++moves_;
  awaiting_degree_ = true;
}

CentralRun run_centralized(QueryTester& tester, const Graph& g, std::uint64_t seed) {
  QueryOracle oracle(g);
  tester.reset(g.n(), tester_seed(seed));
  while (auto q = tester.next()) tester.feed(oracle.answer(*q));
  CentralRun run;
  run.verdict = tester.verdict();
  run.queries = oracle.count();
  return run;
}

namespace {

struct Codec {
  unsigned id_bits;

  BitString query(const Query& q) const {
    BitString b;
    b.push_bit(false);
    b.append(static_cast<std::uint64_t>(q.kind), 2);
    b.append(q.u, id_bits);
    b.append(q.arg, id_bits);
    return b;
  }
  Query read_query(const BitString& b) const {
    return {static_cast<Query::Kind>(b.read(1, 2)), static_cast<NodeId>(b.read(3, id_bits)),
            static_cast<NodeId>(b.read(3 + id_bits, id_bits))};
  }
  static BitString verdict(bool accept) {
    BitString b;
    b.push_bit(true);
    b.push_bit(accept);
    return b;
  }
  void append_answer(BitString& b, const Answer& a) const {
    b.push_bit(a.has_value());
    b.append(a.value_or(0), id_bits);
  }
  Answer read_answer(const BitString& b, std::size_t pos) const {
    if (!b.bit(pos)) return std::nullopt;
    return b.read(pos + 1, id_bits);
  }
};

// Shared tree plumbing: down messages are forwarded to every child, up
// messages to the parent.
class TreeNode : public NodeProgram {
 public:
  TreeNode(const BfsTree& tree, NodeId v, const Graph& g, const Codec& codec)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]), g_(&g), codec_(codec) {}

  bool done() const override { return finished_ && up_.empty(); }

  bool accept_ = false;

 protected:
  void send_down(NodeContext& ctx, const BitString& b) {
    for (std::size_t c : children_) ctx.send(c, b);
  }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  const Graph* g_;
  Codec codec_;
  std::vector<BitString> up_;
  bool finished_ = false;
};

class AdaptiveNode final : public TreeNode {
 public:
  AdaptiveNode(const BfsTree& tree, NodeId v, const Graph& g, const Codec& codec,
               QueryTester* tester)
      : TreeNode(tree, v, g, codec), tester_(tester) {}

  void step(NodeContext& ctx) override {
    if (!parent_) {
      root_step(ctx);
      return;
    }
    for (std::size_t p = 0; p < ctx.degree(); ++p) {
      if (!ctx.has_message(p)) continue;
      const BitString& m = ctx.message(p);
      if (p == *parent_) {
        send_down(ctx, m);
        if (m.bit(0)) {
          accept_ = m.bit(1);
          finished_ = true;
        } else if (const Query q = codec_.read_query(m); q.u == ctx.id()) {
          BitString a;
          codec_.append_answer(a, local_answer(*g_, q));
          ctx.send(*parent_, std::move(a));
        }
      } else {
        ctx.send(*parent_, m);
      }
    }
  }

  std::size_t queries_ = 0;

 private:
  void root_step(NodeContext& ctx) {
    bool answered = ctx.round() == 1;
    for (std::size_t p = 0; p < ctx.degree(); ++p)
      if (ctx.has_message(p)) {
        tester_->feed(codec_.read_answer(ctx.message(p), 0));
        answered = true;
      }
    if (!answered || finished_) return;
    while (auto q = tester_->next()) {
      check_query(*g_, *q);
      ++queries_;
      if (q->u != ctx.id()) {
        send_down(ctx, codec_.query(*q));
        return;
      }
      tester_->feed(local_answer(*g_, *q));
    }
    accept_ = tester_->verdict();
    send_down(ctx, Codec::verdict(accept_));
    finished_ = true;
  }

  QueryTester* tester_;
};

class NonAdaptiveNode final : public TreeNode {
 public:
  NonAdaptiveNode(const BfsTree& tree, NodeId v, const Graph& g, const Codec& codec,
                  unsigned k_bits, QueryTester* tester, const std::vector<Query>* plan)
      : TreeNode(tree, v, g, codec), k_bits_(k_bits), tester_(tester), plan_(plan) {
    if (plan_) answers_.resize(plan_->size());
  }

  void step(NodeContext& ctx) override {
    if (!parent_) {
      root_step(ctx);
      return;
    }
    for (std::size_t p = 0; p < ctx.degree(); ++p) {
      if (!ctx.has_message(p)) continue;
      const BitString& m = ctx.message(p);
      if (p != *parent_) {
        up_.push_back(m);
        continue;
      }
      send_down(ctx, m);
      if (m.bit(0)) {
        accept_ = m.bit(1);
        finished_ = true;
      } else {
        const Query q = codec_.read_query(m);
        if (q.u == ctx.id()) {
          BitString a;
          a.append(seen_, k_bits_);
          codec_.append_answer(a, local_answer(*g_, q));
          up_.push_back(std::move(a));
        }
        ++seen_;
      }
    }
    if (!up_.empty()) {
      ctx.send(*parent_, up_.front());
      up_.erase(up_.begin());
    }
  }

 private:
  void root_step(NodeContext& ctx) {
    for (std::size_t p = 0; p < ctx.degree(); ++p)
      if (ctx.has_message(p)) {
        const BitString& m = ctx.message(p);
        store(m.read(0, k_bits_), codec_.read_answer(m, k_bits_));
      }
    if (seen_ < plan_->size()) {
      const Query& q = (*plan_)[seen_];
      send_down(ctx, codec_.query(q));
      if (q.u == ctx.id()) store(seen_, local_answer(*g_, q));
      ++seen_;
    }
    if (finished_ || got_ < plan_->size()) return;
    std::map<Query, Answer> cache;
    for (std::size_t k = 0; k < plan_->size(); ++k) cache[(*plan_)[k]] = *answers_[k];
    while (auto q = tester_->next()) {
      const auto it = cache.find(*q);
      if (it == cache.end())
        throw ContractViolation("non-adaptive tester asked an undeclared query");
      tester_->feed(it->second);
    }
    accept_ = tester_->verdict();
    send_down(ctx, Codec::verdict(accept_));
    finished_ = true;
  }

  void store(std::uint64_t k, Answer a) {
    if (answers_.at(k)) throw ProtocolAbort("query answered twice");
    answers_[k] = std::optional<Answer>(a);
    ++got_;
  }

  unsigned k_bits_;
  QueryTester* tester_;
  const std::vector<Query>* plan_;
  std::vector<std::optional<Answer>> answers_;
  std::size_t got_ = 0;
  std::uint64_t seen_ = 0;
};

}  // namespace

CentralRun run_adaptive(QueryTester& tester, const Graph& topology, const NetworkConfig& cfg,
                        NodeId root) {
  Network net(topology, cfg);
  const BfsTree tree = build_bfs(net, root);
  const std::uint64_t before = net.transcript().rounds;
  tester.reset(topology.n(), tester_seed(cfg.seed));
  const Codec codec{bits_for(topology.n() - 1)};
  std::vector<AdaptiveNode> nodes;
  nodes.reserve(topology.n());
  for (NodeId v = 0; v < topology.n(); ++v)
    nodes.emplace_back(tree, v, topology, codec, v == root ? &tester : nullptr);
  net.run("central/adaptive", nodes);
  CentralRun run;
  run.verdict = nodes[root].accept_;
  run.queries = nodes[root].queries_;
  for (NodeId v = 0; v < topology.n(); ++v) net.set_output(v, nodes[v].accept_ ? "accept" : "reject");
  run.depth = tree.depth;
  run.rounds = net.transcript().rounds - before;
  run.transcript = net.take_transcript();
  return run;
}

CentralRun run_nonadaptive(QueryTester& tester, const Graph& topology, const NetworkConfig& cfg,
                           NodeId root) {
  Network net(topology, cfg);
  const BfsTree tree = build_bfs(net, root);
  const std::uint64_t before = net.transcript().rounds;
  tester.reset(topology.n(), tester_seed(cfg.seed));
  const auto declared = tester.declared_queries();
  if (!declared) throw InputError("tester does not declare its queries up front");
  for (const Query& q : *declared) check_query(topology, q);
  const Codec codec{bits_for(topology.n() - 1)};
  const unsigned k_bits = bits_for(declared->empty() ? 0 : declared->size() - 1);
  std::vector<NonAdaptiveNode> nodes;
  nodes.reserve(topology.n());
  for (NodeId v = 0; v < topology.n(); ++v)
    nodes.emplace_back(tree, v, topology, codec, k_bits, v == root ? &tester : nullptr,
                       v == root ? &*declared : nullptr);
  net.run("central/nonadaptive", nodes);
  CentralRun run;
  run.verdict = nodes[root].accept_;
  run.queries = declared->size();
  for (NodeId v = 0; v < topology.n(); ++v) net.set_output(v, nodes[v].accept_ ? "accept" : "reject");
  run.depth = tree.depth;
  run.rounds = net.transcript().rounds - before;
  run.transcript = net.take_transcript();
  return run;
}

}  // namespace cgi
