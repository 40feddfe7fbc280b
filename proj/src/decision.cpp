#include "cgi/decision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <gmpxx.h>

#include "cgi/errors.hpp"
#include "cgi/oracles.hpp"
#include "cgi/pipeline.hpp"

namespace cgi {

std::vector<std::uint64_t> nth_primes(std::size_t count) {
  if (count == 0) throw InputError("nth_primes needs count >= 1");
  const double c = static_cast<double>(count);
  // p_count < count (ln count + ln ln count) for count >= 6.
  const std::size_t limit =
      count < 6 ? 15 : static_cast<std::size_t>(c * (std::log(c) + std::log(std::log(c)))) + 10;
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> primes;
  for (std::size_t i = 2; i <= limit && primes.size() < count; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::size_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t edge_order(NodeId i, NodeId j, NodeId n) {
  if (i >= j || j >= n) throw InputError("edge_order needs i < j < n");
  const std::uint64_t a = i;
  return a * n - a * (a + 1) / 2 + (j - i - 1);
}

std::uint64_t pow2_mod(std::uint64_t e, std::uint64_t p) {
  if (p == 1) return 0;
  unsigned __int128 result = 1, base = 2 % p;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

nlohmann::json Fingerprint::to_json() const {
  return {{"primes", primes}, {"residues", residues}};
}

Fingerprint Fingerprint::from_json(const nlohmann::json& j) {
  Fingerprint fp;
  fp.primes = j.at("primes").get<std::vector<std::uint64_t>>();
  fp.residues = j.at("residues").get<std::vector<std::uint64_t>>();
  if (fp.primes.size() != fp.residues.size())
    throw InputError("fingerprint: primes and residues differ in length");
  return fp;
}

Fingerprint fingerprint_local(const Graph& g, const Bijection& numbering,
                              const std::vector<std::uint64_t>& primes) {
  if (numbering.size() != g.n()) throw InputError("numbering size mismatch");
  Fingerprint fp{primes, std::vector<std::uint64_t>(primes.size(), 0)};
  for (const auto& [u, v] : g.edges()) {
    const NodeId a = std::min(numbering(u), numbering(v));
    const NodeId b = std::max(numbering(u), numbering(v));
    const std::uint64_t l = edge_order(a, b, g.n());
    for (std::size_t t = 0; t < primes.size(); ++t)
      fp.residues[t] = (fp.residues[t] + pow2_mod(l, primes[t])) % primes[t];
  }
  return fp;
}

std::vector<std::uint64_t> sample_primes(NodeId n, std::size_t k, Rng& rng) {
  if (n == 0) throw InputError("sample_primes needs n >= 1");
  const auto pool = nth_primes(static_cast<std::size_t>(n) * n);
  std::vector<std::uint64_t> out(k);
  for (auto& p : out) p = pool[uniform_below(rng, pool.size())];
  return out;
}

namespace {

class FingerprintNode final : public NodeProgram {
 public:
  FingerprintNode(const BfsTree& tree, NodeId v, NodeId n, NodeId number,
                  const std::vector<NodeId>& neighbor_numbers, std::size_t k,
                  unsigned width, const std::vector<std::uint64_t>* root_primes)
      : parent_(tree.parent_port[v]), children_(tree.child_ports[v]), n_(n),
        number_(number), k_(k), width_(width), down_reader_(width, false),
        down_writers_(children_.size(), StreamWriter(false)),
        down_queues_(children_.size()),
        up_readers_(children_.size(), StreamReader(width, false)),
        up_writer_(false) {
    for (NodeId w : neighbor_numbers)
      if (w > number_) owned_.push_back(edge_order(number_, w, n_));
    if (root_primes)
      for (std::uint64_t p : *root_primes) learn(p);
    if (primes_.size() == k_)
      for (auto& q : down_queues_) q.close();
  }

  void step(NodeContext& ctx) override {
    if (parent_ && ctx.has_message(*parent_)) {
      down_reader_.feed(ctx.message(*parent_));
      while (down_reader_.has_item()) learn(down_reader_.pop().read(0, width_));
      if (primes_.size() == k_)
        for (auto& q : down_queues_) q.close();
    }
    for (std::size_t i = 0; i < children_.size(); ++i) {
      down_writers_[i].pump(ctx, children_[i], down_queues_[i]);
      if (ctx.has_message(children_[i])) up_readers_[i].feed(ctx.message(children_[i]));
    }
    auto source = [&]() {
      if (residues_.size() == k_) return Pull::end();
      const std::size_t t = residues_.size();
      if (t >= primes_.size() ||
          !std::all_of(up_readers_.begin(), up_readers_.end(),
                       [](const StreamReader& r) { return r.has_item(); }))
        return Pull::wait();
      const std::uint64_t p = primes_[t];
      std::uint64_t r = local_[t];
      for (auto& rd : up_readers_) r = (r + rd.pop().read(0, width_)) % p;
      residues_.push_back(r);
      BitString b;
      b.append(r, width_);
      return Pull::of(std::move(b));
    };
    if (parent_) {
      up_writer_.pump(ctx, *parent_, source);
    } else {
      while (source().kind == Pull::Kind::kItem) {
      }
    }
  }

  bool done() const override {
    const bool down = std::all_of(down_writers_.begin(), down_writers_.end(),
                                  [](const StreamWriter& w) { return w.finished(); });
    return down && residues_.size() == k_ && (!parent_ || up_writer_.finished());
  }

  std::vector<std::uint64_t> primes_;
  std::vector<std::uint64_t> residues_;

 private:
  void learn(std::uint64_t p) {
    primes_.push_back(p);
    BitString b;
    b.append(p, width_);
    for (auto& q : down_queues_) q.push(b);
    std::uint64_t r = 0;
    for (std::uint64_t l : owned_) r = (r + pow2_mod(l, p)) % p;
    local_.push_back(r);
  }

  std::optional<std::size_t> parent_;
  std::vector<std::size_t> children_;
  NodeId n_;
  NodeId number_;
  std::size_t k_;
  unsigned width_;
  std::vector<std::uint64_t> owned_;
  std::vector<std::uint64_t> local_;
  StreamReader down_reader_;
  std::vector<StreamWriter> down_writers_;
  std::vector<ItemQueue> down_queues_;
  std::vector<StreamReader> up_readers_;
  StreamWriter up_writer_;
};

}  // namespace

Fingerprint distributed_fingerprints(Network& net, const BfsTree& tree,
                                     const std::vector<NodeId>& numbers,
                                     const std::vector<std::vector<NodeId>>& neighbor_numbers,
                                     const std::vector<std::uint64_t>& primes) {
  const NodeId n = net.n();
  if (numbers.size() != n || neighbor_numbers.size() != n)
    throw InputError("need a number and neighbor numbers for every node");
  // Every prime comes from the first n^2 primes, so nodes share this width.
  const unsigned width = bits_for(nth_primes(static_cast<std::size_t>(n) * n).back());
  for (std::uint64_t p : primes)
    if (bits_for(p) > width) throw InputError("prime outside the first n^2 primes");
  std::vector<FingerprintNode> nodes;
  nodes.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    nodes.emplace_back(tree, v, n, numbers[v], neighbor_numbers[v], primes.size(), width,
                       v == tree.root ? &primes : nullptr);
  net.run("fingerprint", nodes);
  return Fingerprint{primes, nodes[tree.root].residues_};
}

bool decide_isomorphism(const Graph& gk, const Fingerprint& fp, NodeId cap) {
  const NodeId n = gk.n();
  if (n > cap)
    throw RefusalError("permutation enumeration refused: n=" + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
  const std::size_t k = fp.primes.size();
  const std::size_t pairs = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  std::vector<std::vector<std::uint64_t>> table(k, std::vector<std::uint64_t>(pairs));
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t l = 0; l < pairs; ++l) table[t][l] = pow2_mod(l, fp.primes[t]);
  const auto edges = gk.edges();
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  std::vector<std::uint64_t> order(edges.size());
  do {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const NodeId a = perm[edges[e].first], b = perm[edges[e].second];
      order[e] = a < b ? edge_order(a, b, n) : edge_order(b, a, n);
    }
    bool match = true;
    for (std::size_t t = 0; t < k && match; ++t) {
      std::uint64_t r = 0;
      for (std::uint64_t l : order) r += table[t][l];
      match = r % fp.primes[t] == fp.residues[t];
    }
    if (match) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::optional<bool> decide_by_reconstruction(const Graph& gk, const Fingerprint& fp) {
  const NodeId n = gk.n();
  std::map<std::uint64_t, std::uint64_t> congruences;
  for (std::size_t t = 0; t < fp.primes.size(); ++t) {
    auto [it, fresh] = congruences.emplace(fp.primes[t], fp.residues[t]);
    if (!fresh && it->second != fp.residues[t]) return false;
  }
  mpz_class modulus = 1, x = 0;
  for (const auto& [p, r] : congruences) {
    const mpz_class mp(static_cast<unsigned long>(p));
    mpz_class inv;
    const mpz_class m_mod_p = modulus % mp;
    mpz_invert(inv.get_mpz_t(), m_mod_p.get_mpz_t(), mp.get_mpz_t());
    mpz_class delta = (mpz_class(static_cast<unsigned long>(r)) - x) % mp;
    if (delta < 0) delta += mp;
    mpz_class step = delta * inv % mp;
    x += modulus * step;
    modulus *= mp;
  }
  const std::size_t pairs = static_cast<std::size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  mpz_class bound = 1;
  bound <<= static_cast<mp_bitcnt_t>(pairs);
  if (modulus <= bound) return std::nullopt;
  if (x >= bound) return false;
  Graph m(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (mpz_tstbit(x.get_mpz_t(), edge_order(i, j, n))) m.add_edge(i, j);
  return find_isomorphism(m, gk).has_value();
}

DecisionResult run_decision_protocol(const Graph& topology, const Graph& gk,
                                     const DecisionOptions& opts,
                                     const NetworkConfig& cfg) {
  const NodeId n = topology.n();
  if (gk.n() != n) throw InputError("known graph and topology differ in size");
  if (n == 0) throw InputError("empty topology");
  Network net(topology, cfg);
  const BfsTree tree = build_bfs(net, opts.root);

  const auto index = assign_unique_numbers(net, tree, std::vector<bool>(n, true));
  std::vector<NodeId> numbers(n);
  std::vector<BitString> payload(n);
  const unsigned width = bits_for(n - 1);
  for (NodeId v = 0; v < n; ++v) {
    numbers[v] = *index[v] - 1;
    payload[v].append(numbers[v], width);
  }
  const auto heard = exchange_with_neighbors(net, payload, width, "numbers");
  std::vector<std::vector<NodeId>> neighbor_numbers(n);
  for (NodeId v = 0; v < n; ++v)
    for (const auto& b : heard[v])
      neighbor_numbers[v].push_back(static_cast<NodeId>(b.read(0, width)));

  const std::size_t k = opts.k.value_or(static_cast<std::size_t>(std::ceil(opts.c_k * n)));
  Rng prime_rng(derive_seed(cfg.seed, {stream::kPrimes}));
  const auto primes = sample_primes(n, k, prime_rng);

  DecisionResult result;
  result.fp = distributed_fingerprints(net, tree, numbers, neighbor_numbers, primes);
  if (opts.rounds_only) {
    result.method = "skipped";
    BitString placeholder;
    placeholder.push_bit(false);
    broadcast_items(net, tree, {placeholder}, 1, "verdict");
  } else {
    if (n <= opts.enumeration_cap) {
      result.method = "enumeration";
      result.accept = decide_isomorphism(gk, result.fp, opts.enumeration_cap);
    } else if (auto v = decide_by_reconstruction(gk, result.fp)) {
      result.method = "reconstruction";
      result.accept = *v;
    } else {
      throw RefusalError("n=" + std::to_string(n) +
                         " exceeds the enumeration cap and the sampled primes are "
                         "too few for exact reconstruction");
    }
    broadcast_verdict(net, tree, *result.accept);
  }
  result.transcript = net.take_transcript();
  return result;
}

}  // namespace cgi
