#include "cgi/protocols.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "cgi/errors.hpp"
#include "cgi/pipeline.hpp"

namespace cgi {

NodeId BfsTree::parent(const Graph& g, NodeId v) const {
  if (!parent_port[v]) return v;
  return g.neighbors(v)[*parent_port[v]];
}

namespace {

BitString value_bits(std::uint64_t value, unsigned width) {
  if (width < 64 && (value >> width) != 0)
    throw InputError("value " + std::to_string(value) + " does not fit " +
                     std::to_string(width) + " bits");
  BitString b;
  b.append(value, width);
  return b;
}

std::uint64_t as_value(const BitString& b) { return b.read(0, static_cast<unsigned>(b.size())); }

// ---------------------------------------------------------------- BFS

class BfsNode final : public NodeProgram {
 public:
  explicit BfsNode(bool is_root) : is_root_(is_root) {}

  void step(NodeContext& ctx) override {
    seen_round_ = ctx.round();
    if (!joined_) {
      std::optional<std::size_t> from;
      for (std::size_t p = 0; p < ctx.degree() && !from; ++p)
        if (ctx.has_message(p)) from = p;
      if (is_root_ && ctx.round() == 1) {
        layer_ = 0;
      } else if (from) {
        parent_ = from;
        layer_ = static_cast<std::uint32_t>(ctx.round() - 1);
      } else {
        return;
      }
      joined_ = true;
      join_round_ = ctx.round();
      for (std::size_t p = 0; p < ctx.degree(); ++p) {
        BitString m;
        m.push_bit(parent_ == p);
        ctx.send(p, std::move(m));
      }
      return;
    }
    for (std::size_t p = 0; p < ctx.degree(); ++p)
      if (ctx.has_message(p) && ctx.message(p).bit(0)) children_.push_back(p);
  }

  bool done() const override { return joined_ && seen_round_ > join_round_; }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  std::uint32_t layer_ = 0;

 private:
  bool is_root_;
  bool joined_ = false;
  std::uint64_t join_round_ = 0;
  std::uint64_t seen_round_ = 0;
};

// ------------------------------------------------------------ broadcast

class BroadcastNode final : public NodeProgram {
 public:
  BroadcastNode(const BfsTree& tree, NodeId v, unsigned width,
                const std::vector<BitString>* root_items)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        reader_(width), writers_(children_.size()), queues_(children_.size()) {
    if (root_items) {
      received_ = *root_items;
      for (auto& q : queues_) {
        for (const auto& it : *root_items) q.push(it);
        q.close();
      }
    }
  }

  void step(NodeContext& ctx) override {
    if (parent_ && ctx.has_message(*parent_)) {
      reader_.feed(ctx.message(*parent_));
      while (reader_.has_item()) {
        BitString it = reader_.pop();
        for (auto& q : queues_) q.push(it);
        received_.push_back(std::move(it));
      }
      if (reader_.ended())
        for (auto& q : queues_) q.close();
    }
    for (std::size_t i = 0; i < children_.size(); ++i)
      writers_[i].pump(ctx, children_[i], queues_[i]);
  }

  bool done() const override {
    if (parent_ && !reader_.ended()) return false;
    return std::all_of(writers_.begin(), writers_.end(),
                       [](const StreamWriter& w) { return w.finished(); });
  }

  std::vector<BitString> received_;

 private:
  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  StreamReader reader_;
  std::vector<StreamWriter> writers_;
  std::vector<ItemQueue> queues_;
};

// ---------------------------------------------------------- convergecast

class SumNode final : public NodeProgram {
 public:
  SumNode(const BfsTree& tree, NodeId v, std::uint64_t value, unsigned width,
          std::optional<std::uint64_t> modulus)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        width_(width), modulus_(modulus), writer_(false) {
    total_ = reduce(value);
    for (std::size_t i = 0; i < children_.size(); ++i)
      readers_.emplace_back(width, false);
  }

  void step(NodeContext& ctx) override {
    for (std::size_t i = 0; i < children_.size(); ++i)
      if (ctx.has_message(children_[i])) readers_[i].feed(ctx.message(children_[i]));
    if (!complete_ &&
        std::all_of(readers_.begin(), readers_.end(),
                    [](const StreamReader& r) { return r.has_item(); })) {
      for (auto& r : readers_) total_ = reduce(total_ + as_value(r.pop()));
      complete_ = true;
    }
    if (parent_) {
      writer_.pump(ctx, *parent_, [&]() {
        if (!complete_) return Pull::wait();
        if (sent_) return Pull::end();
        sent_ = true;
        return Pull::of(value_bits(total_, width_));
      });
    }
  }

  bool done() const override { return complete_ && (!parent_ || writer_.finished()); }

  std::uint64_t total_ = 0;

 private:
  std::uint64_t reduce(std::uint64_t x) const { return modulus_ ? x % *modulus_ : x; }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  unsigned width_;
  std::optional<std::uint64_t> modulus_;
  std::vector<StreamReader> readers_;
  StreamWriter writer_;
  bool complete_ = false;
  bool sent_ = false;
};

// -------------------------------------------------------------- collect

/// Forwards own items and everything heard from children toward the root.
class CollectNode final : public NodeProgram {
 public:
  CollectNode(const BfsTree& tree, NodeId v, std::vector<BitString> own,
              unsigned width)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        readers_(children_.size(), StreamReader(width)) {
    for (auto& it : own) queue_.push(std::move(it));
  }

  void step(NodeContext& ctx) override {
    for (std::size_t i = 0; i < children_.size(); ++i) {
      if (!ctx.has_message(children_[i])) continue;
      readers_[i].feed(ctx.message(children_[i]));
      while (readers_[i].has_item()) queue_.push(readers_[i].pop());
    }
    if (!queue_.closed() &&
        std::all_of(readers_.begin(), readers_.end(),
                    [](const StreamReader& r) { return r.ended(); }))
      queue_.close();
    if (parent_) {
      writer_.pump(ctx, *parent_, queue_);
    } else {
      while (!queue_.empty()) gathered_.push_back(queue_().item);
    }
  }

  bool done() const override {
    return queue_.closed() && (parent_ ? writer_.finished() : queue_.empty());
  }

  std::vector<BitString> gathered_;

 private:
  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  std::vector<StreamReader> readers_;
  StreamWriter writer_;
  ItemQueue queue_;
};

// ------------------------------------------------------------- exchange

class ExchangeNode final : public NodeProgram {
 public:
  ExchangeNode(std::vector<BitString> fragments, std::size_t degree)
      : out_(std::move(fragments)), in_(degree) {}

  void step(NodeContext& ctx) override {
    for (std::size_t p = 0; p < ctx.degree(); ++p)
      if (ctx.has_message(p)) in_[p].push_back(ctx.message(p));
    if (next_ < out_.size()) {
      for (std::size_t p = 0; p < ctx.degree(); ++p) ctx.send(p, out_[next_]);
      ++next_;
    }
  }

  bool done() const override {
    return next_ == out_.size() &&
           std::all_of(in_.begin(), in_.end(), [&](const auto& f) {
             return f.size() == out_.size();
           });
  }

  std::vector<BitString> out_;
  std::vector<std::vector<BitString>> in_;

 private:
  std::size_t next_ = 0;
};

// -------------------------------------------------------------- election

struct Ticket {
  std::uint64_t number;
  NodeId id;
  bool operator<(const Ticket& o) const {
    return number != o.number ? number > o.number : id < o.id;
  }
};

class ElectNode final : public NodeProgram {
 public:
  ElectNode(const BfsTree& tree, NodeId v, std::size_t quota,
            std::uint64_t range, unsigned num_bits, unsigned id_bits)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        quota_(quota), range_(range), num_bits_(num_bits), id_bits_(id_bits),
        readers_(children_.size(), StreamReader(num_bits + id_bits)) {}

  void step(NodeContext& ctx) override {
    if (ctx.round() == 1) own_ = Ticket{uniform_below(ctx.rng(), range_) + 1, ctx.id()};
    for (std::size_t i = 0; i < children_.size(); ++i)
      if (ctx.has_message(children_[i])) readers_[i].feed(ctx.message(children_[i]));
    auto source = [&]() { return next(); };
    if (parent_) {
      writer_.pump(ctx, *parent_, source);
    } else {
      while (!root_done_) {
        Pull p = next();
        if (p.kind == Pull::Kind::kWait) break;
        if (p.kind == Pull::Kind::kEnd) {
          root_done_ = true;
          finished_round_ = ctx.round();
          break;
        }
        top_.push_back(decode(p.item));
      }
    }
  }

  bool done() const override { return parent_ ? writer_.finished() : root_done_; }

  Ticket own_{0, 0};
  std::vector<Ticket> top_;
  std::uint64_t finished_round_ = 0;

 private:
  // Emits the best remaining ticket once no child can still beat it: every
  // child has either closed its stream or has a ticket waiting.
  Pull next() {
    if (sent_ == quota_) return Pull::end();
    std::optional<Ticket> best;
    std::optional<std::size_t> from;
    if (!own_used_) best = own_;
    for (std::size_t i = 0; i < readers_.size(); ++i) {
      if (readers_[i].has_item()) {
        const Ticket t = decode(readers_[i].front());
        if (!best || t < *best) {
          best = t;
          from = i;
        }
      } else if (!readers_[i].ended()) {
        return Pull::wait();
      }
    }
    if (!best) return Pull::end();
    if (from) readers_[*from].pop();
    else own_used_ = true;
    ++sent_;
    BitString b;
    b.append(best->number, num_bits_);
    b.append(best->id, id_bits_);
    return Pull::of(std::move(b));
  }

  Ticket decode(const BitString& b) const {
    return Ticket{b.read(0, num_bits_), static_cast<NodeId>(b.read(num_bits_, id_bits_))};
  }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  std::size_t quota_;
  std::uint64_t range_;
  unsigned num_bits_;
  unsigned id_bits_;
  std::vector<StreamReader> readers_;
  StreamWriter writer_;
  bool own_used_ = false;
  std::size_t sent_ = 0;
  bool root_done_ = false;
};

// ----------------------------------------------------- label class sizes

class ClassSizeNode final : public NodeProgram {
 public:
  ClassSizeNode(const BfsTree& tree, NodeId v, std::optional<std::size_t> coord,
                const std::vector<Label>* neighbor_labels, std::size_t s,
                unsigned index_bits, unsigned count_bits,
                const std::vector<Label>* root_queries)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        coord_(coord), neighbor_labels_(neighbor_labels), s_(s),
        index_bits_(index_bits), count_bits_(count_bits),
        down_reader_(static_cast<unsigned>(s)),
        down_writers_(children_.size()), down_queues_(children_.size()),
        up_readers_(children_.size(), StreamReader(index_bits + count_bits)) {
    if (root_queries) {
      for (const Label& q : *root_queries) {
        BitString b = encode(q);
        for (auto& dq : down_queues_) dq.push(b);
        answer(q);
      }
      for (auto& dq : down_queues_) dq.close();
      down_done_ = true;
    }
  }

  void step(NodeContext& ctx) override {
    if (parent_ && ctx.has_message(*parent_)) {
      down_reader_.feed(ctx.message(*parent_));
      while (down_reader_.has_item()) {
        BitString b = down_reader_.pop();
        for (auto& dq : down_queues_) dq.push(b);
        answer(decode(b));
      }
      if (down_reader_.ended()) {
        for (auto& dq : down_queues_) dq.close();
        down_done_ = true;
      }
    }
    for (std::size_t i = 0; i < children_.size(); ++i) {
      down_writers_[i].pump(ctx, children_[i], down_queues_[i]);
      if (!ctx.has_message(children_[i])) continue;
      up_readers_[i].feed(ctx.message(children_[i]));
      while (up_readers_[i].has_item()) up_queue_.push(up_readers_[i].pop());
    }
    if (down_done_ && !up_queue_.closed() &&
        std::all_of(up_readers_.begin(), up_readers_.end(),
                    [](const StreamReader& r) { return r.ended(); }))
      up_queue_.close();
    if (parent_) {
      up_writer_.pump(ctx, *parent_, up_queue_);
    } else {
      while (!up_queue_.empty()) {
        const BitString b = up_queue_().item;
        answers_.emplace_back(b.read(0, index_bits_), b.read(index_bits_, count_bits_));
      }
    }
  }

  bool done() const override {
    const bool down = std::all_of(down_writers_.begin(), down_writers_.end(),
                                  [](const StreamWriter& w) { return w.finished(); });
    return down && up_queue_.closed() &&
           (parent_ ? up_writer_.finished() : up_queue_.empty());
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> answers_;

 private:
  BitString encode(const Label& l) const {
    BitString b;
    for (std::size_t i = 0; i < l.size(); ++i) b.push_bit(l[i]);
    return b;
  }
  Label decode(const BitString& b) const {
    Label l(s_);
    for (std::size_t i = 0; i < s_; ++i) l.set(i, b.bit(i));
    return l;
  }

  // Coordinator c_i reports the class size of every query whose msb is i.
  void answer(const Label& q) {
    const std::uint64_t index = seen_++;
    if (!coord_ || q.msb() != coord_) return;
    std::uint64_t count = 0;
    for (const Label& l : *neighbor_labels_)
      if (l == q) ++count;
    BitString b;
    b.append(index, index_bits_);
    b.append(count, count_bits_);
    up_queue_.push(std::move(b));
  }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  std::optional<std::size_t> coord_;
  const std::vector<Label>* neighbor_labels_;
  std::size_t s_;
  unsigned index_bits_;
  unsigned count_bits_;
  StreamReader down_reader_;
  std::vector<StreamWriter> down_writers_;
  std::vector<ItemQueue> down_queues_;
  std::vector<StreamReader> up_readers_;
  StreamWriter up_writer_;
  ItemQueue up_queue_;
  bool down_done_ = false;
  std::uint64_t seen_ = 0;
};

// ------------------------------------------------------------- numbering

class IntervalNode final : public NodeProgram {
 public:
  IntervalNode(const BfsTree& tree, NodeId v, std::uint32_t start,
               const std::vector<std::uint32_t>* child_counts, bool member,
               unsigned width)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        child_counts_(child_counts), member_(member), width_(width),
        reader_(width, false) {
    if (!parent_) assign(start);
  }

  void step(NodeContext& ctx) override {
    if (!start_ && parent_ && ctx.has_message(*parent_)) {
      reader_.feed(ctx.message(*parent_));
      if (reader_.has_item()) assign(static_cast<std::uint32_t>(as_value(reader_.pop())));
    }
    if (start_ && !sent_) {
      std::uint32_t next = *start_ + (member_ ? 1 : 0);
      for (std::size_t i = 0; i < children_.size(); ++i) {
        ctx.send(children_[i], value_bits(next, width_));
        next += (*child_counts_)[i];
      }
      sent_ = true;
    }
  }

  bool done() const override { return sent_; }

  std::optional<std::uint32_t> index_;

 private:
  void assign(std::uint32_t start) {
    start_ = start;
    if (member_) index_ = start;
  }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  const std::vector<std::uint32_t>* child_counts_;
  bool member_;
  unsigned width_;
  StreamReader reader_;
  std::optional<std::uint32_t> start_;
  bool sent_ = false;
};

/// Subtree member counts, reporting each child's count separately.
class SubtreeCountNode final : public NodeProgram {
 public:
  SubtreeCountNode(const BfsTree& tree, NodeId v, bool member, unsigned width)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]),
        width_(width), readers_(children_.size(), StreamReader(width, false)) {
    total_ = member ? 1 : 0;
    child_counts_.assign(children_.size(), 0);
  }

  void step(NodeContext& ctx) override {
    for (std::size_t i = 0; i < children_.size(); ++i)
      if (ctx.has_message(children_[i])) readers_[i].feed(ctx.message(children_[i]));
    if (!complete_ && std::all_of(readers_.begin(), readers_.end(),
                                  [](const StreamReader& r) { return r.has_item(); })) {
      for (std::size_t i = 0; i < children_.size(); ++i) {
        child_counts_[i] = static_cast<std::uint32_t>(as_value(readers_[i].pop()));
        total_ += child_counts_[i];
      }
      complete_ = true;
      if (parent_) ctx.send(*parent_, value_bits(total_, width_));
    }
  }

  bool done() const override { return complete_; }

  std::uint32_t total_ = 0;
  std::vector<std::uint32_t> child_counts_;

 private:
  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  unsigned width_;
  std::vector<StreamReader> readers_;
  bool complete_ = false;
};

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
      throw InputError("number range n^(c+2) overflows 64 bits");
    r *= base;
  }
  return r;
}

}  // namespace

BfsTree build_bfs(Network& net, NodeId root) {
  net.topology().check_node(root);
  const NodeId n = net.n();
  std::vector<BfsNode> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v) nodes.emplace_back(v == root);
  net.run("bfs", nodes);
  BfsTree tree;
  tree.root = root;
  tree.parent_port.resize(n);
  tree.child_ports.resize(n);
  tree.layer.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    tree.parent_port[v] = nodes[v].parent_;
    tree.child_ports[v] = nodes[v].children_;
    tree.layer[v] = nodes[v].layer_;
    tree.depth = std::max(tree.depth, nodes[v].layer_);
  }
  return tree;
}

std::vector<std::vector<BitString>> broadcast_items(
    Network& net, const BfsTree& tree, const std::vector<BitString>& items,
    unsigned width, std::string_view phase) {
  for (const auto& it : items)
    if (it.size() != width) throw InputError("broadcast item width mismatch");
  std::vector<BroadcastNode> nodes;
  nodes.reserve(net.n());
  for (NodeId v = 0; v < net.n(); ++v)
    nodes.emplace_back(tree, v, width, v == tree.root ? &items : nullptr);
  net.run(phase, nodes);
  std::vector<std::vector<BitString>> out;
  out.reserve(net.n());
  for (auto& node : nodes) out.push_back(std::move(node.received_));
  return out;
}

std::vector<BitString> broadcast(Network& net, const BfsTree& tree,
                                 const BitString& payload, std::string_view phase) {
  constexpr unsigned kChunk = 32;
  std::vector<BitString> items{value_bits(payload.size(), kChunk)};
  for (std::size_t pos = 0; pos < payload.size(); pos += kChunk) {
    const std::size_t len = std::min<std::size_t>(kChunk, payload.size() - pos);
    BitString chunk = payload.slice(pos, len);
    chunk.append(0, static_cast<unsigned>(kChunk - len));
    items.push_back(std::move(chunk));
  }
  const auto got = broadcast_items(net, tree, items, kChunk, phase);
  std::vector<BitString> out;
  for (const auto& node_items : got) {
    const std::size_t len = node_items.at(0).read(0, kChunk);
    BitString p;
    for (std::size_t i = 1; i < node_items.size(); ++i) p.append(node_items[i]);
    out.push_back(p.slice(0, len));
  }
  return out;
}

std::uint64_t convergecast_sum(Network& net, const BfsTree& tree,
                               const std::vector<std::uint64_t>& values,
                               unsigned width, std::optional<std::uint64_t> modulus,
                               std::string_view phase) {
  if (values.size() != net.n()) throw InputError("need one value per node");
  if (modulus && *modulus == 0) throw InputError("modulus must be positive");
  std::vector<SumNode> nodes;
  nodes.reserve(net.n());
  for (NodeId v = 0; v < net.n(); ++v)
    nodes.emplace_back(tree, v, values[v], width, modulus);
  net.run(phase, nodes);
  return nodes[tree.root].total_;
}

std::vector<BitString> pipelined_collect(
    Network& net, const BfsTree& tree,
    const std::vector<std::vector<BitString>>& items, unsigned width,
    std::string_view phase) {
  if (items.size() != net.n()) throw InputError("need one item list per node");
  std::vector<CollectNode> nodes;
  nodes.reserve(net.n());
  for (NodeId v = 0; v < net.n(); ++v) {
    for (const auto& it : items[v])
      if (it.size() != width) throw InputError("collect item width mismatch");
    nodes.emplace_back(tree, v, items[v], width);
  }
  net.run(phase, nodes);
  return std::move(nodes[tree.root].gathered_);
}

std::vector<std::vector<BitString>> exchange_with_neighbors(
    Network& net, const std::vector<BitString>& payload, std::size_t bits,
    std::string_view phase) {
  if (payload.size() != net.n()) throw InputError("need one payload per node");
  std::vector<ExchangeNode> nodes;
  nodes.reserve(net.n());
  for (NodeId v = 0; v < net.n(); ++v) {
    if (payload[v].size() != bits) throw InputError("exchange payload width mismatch");
    nodes.emplace_back(fragment(payload[v], net.bandwidth()),
                       net.topology().degree(v));
  }
  net.run(phase, nodes);
  std::vector<std::vector<BitString>> out(net.n());
  for (NodeId v = 0; v < net.n(); ++v)
    for (const auto& frags : nodes[v].in_) out[v].push_back(reassemble(frags));
  return out;
}

Election elect_random_nodes(Network& net, const BfsTree& tree, std::size_t s,
                            unsigned c) {
  const NodeId n = net.n();
  if (s > n) throw InputError("cannot elect " + std::to_string(s) + " of " +
                              std::to_string(n) + " nodes");
  Election result;
  if (s == 0) return result;
  const std::uint64_t range = checked_pow(n, c + 2);
  const unsigned num_bits = bits_for(range);
  const unsigned id_bits = bits_for(n - 1);
  const unsigned announce_bits = bits_for(n);
  while (true) {
    std::vector<ElectNode> nodes;
    nodes.reserve(n);
    for (NodeId v = 0; v < n; ++v)
      nodes.emplace_back(tree, v, s + 1, range, num_bits, id_bits);
    const PhaseStats stats = net.run("elect/collect", nodes);
    const auto& top = nodes[tree.root].top_;
    bool collision = false;
    for (std::size_t i = 1; i < top.size(); ++i)
      collision |= top[i].number == top[i - 1].number;

    std::vector<BitString> items;
    if (collision) {
      items.push_back(value_bits(0, announce_bits));
    } else {
      for (std::size_t i = 0; i < s; ++i)
        items.push_back(value_bits(top[i].id + 1, announce_bits));
    }
    const auto heard = broadcast_items(net, tree, items, announce_bits, "elect/announce");
    if (collision) {
      ++result.restarts;
      continue;
    }
    result.collect_rounds = stats.rounds;
    result.draws.resize(n);
    for (NodeId v = 0; v < n; ++v) result.draws[v] = nodes[v].own_.number;
    for (const auto& it : heard[tree.root])
      result.seq.push_back(static_cast<NodeId>(as_value(it) - 1));
    return result;
  }
}

std::uint64_t count_zero_label(Network& net, const BfsTree& tree,
                               const std::vector<Label>& labels) {
  if (labels.size() != net.n()) throw InputError("need one label per node");
  std::vector<std::uint64_t> ones(net.n());
  for (NodeId v = 0; v < net.n(); ++v) ones[v] = labels[v].is_zero() ? 1 : 0;
  return convergecast_sum(net, tree, ones, bits_for(net.n()), std::nullopt,
                          "zero-label-count");
}

std::vector<std::uint64_t> label_class_size(
    Network& net, const BfsTree& tree,
    const std::vector<std::optional<std::size_t>>& coord_index,
    const std::vector<std::vector<Label>>& neighbor_labels,
    const std::vector<Label>& queries) {
  const NodeId n = net.n();
  if (coord_index.size() != n || neighbor_labels.size() != n)
    throw InputError("need per-node coordinator and neighbor-label data");
  if (queries.empty()) return {};
  const std::size_t s = queries.front().size();
  for (const Label& q : queries) {
    if (q.size() != s) throw InputError("queried labels differ in length");
    if (q.is_zero())
      throw ContractViolation("all-zero label has no coordinator; use count_zero_label");
  }
  if (queries.size() > n) throw InputError("more label queries than nodes");
  const unsigned index_bits = bits_for(n - 1);
  const unsigned count_bits = bits_for(n);
  std::vector<ClassSizeNode> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    nodes.emplace_back(tree, v, coord_index[v], &neighbor_labels[v], s, index_bits,
                       count_bits, v == tree.root ? &queries : nullptr);
  net.run("class-sizes", nodes);
  std::vector<std::uint64_t> counts(queries.size(), 0);
  std::vector<bool> got(queries.size(), false);
  for (const auto& [idx, count] : nodes[tree.root].answers_) {
    if (idx >= queries.size() || got[idx])
      throw ProtocolAbort("class-size answer for unknown or repeated query");
    got[idx] = true;
    counts[idx] = count;
  }
  if (!std::all_of(got.begin(), got.end(), [](bool b) { return b; }))
    throw ProtocolAbort("class-size query left unanswered");
  return counts;
}

std::vector<std::optional<std::uint32_t>> assign_unique_numbers(
    Network& net, const BfsTree& tree, const std::vector<bool>& member,
    std::string_view phase) {
  const NodeId n = net.n();
  if (member.size() != n) throw InputError("need one membership flag per node");
  const unsigned width = bits_for(n + 1);
  std::vector<SubtreeCountNode> up;
  up.reserve(n);
  for (NodeId v = 0; v < n; ++v) up.emplace_back(tree, v, member[v], width);
  net.run(std::string(phase) + "/up", up);
  std::vector<IntervalNode> down;
  down.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    down.emplace_back(tree, v, 1, &up[v].child_counts_, member[v], width);
  net.run(std::string(phase) + "/down", down);
  std::vector<std::optional<std::uint32_t>> out(n);
  for (NodeId v = 0; v < n; ++v) out[v] = down[v].index_;
  return out;
}

void broadcast_verdict(Network& net, const BfsTree& tree, bool accept) {
  const auto heard =
      broadcast_items(net, tree, {value_bits(accept ? 1 : 0, 1)}, 1, "verdict");
  for (NodeId v = 0; v < net.n(); ++v)
    net.set_output(v, heard[v].at(0).bit(0) ? "accept" : "reject");
}

}  // namespace cgi
