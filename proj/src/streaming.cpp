#include "cgi/streaming.hpp"

#include <algorithm>
#include <numeric>

#include "cgi/bits.hpp"
#include "cgi/decision.hpp"
#include "cgi/errors.hpp"

namespace cgi {

namespace {

std::uint64_t prime_bits(const std::vector<std::uint64_t>& primes) {
  std::uint64_t w = 1;
  for (std::uint64_t p : primes) w = std::max<std::uint64_t>(w, bits_for(p));
  return w;
}

}  // namespace

std::uint64_t stream_space_budget(NodeId n) {
  return 64ULL * n * ceil_log2(std::max<NodeId>(n, 1));
}

StreamState::StreamState(NodeId n, std::vector<std::uint64_t> primes, IdMode mode)
    : n_(n), mode_(mode), primes_(std::move(primes)), residues_(primes_.size(), 0) {
  if (n_ == 0) throw InputError("stream needs n >= 1");
  for (std::uint64_t p : primes_)
    if (p < 2) throw InputError("fingerprint modulus must be a prime");
  const std::uint64_t w = prime_bits(primes_);
  meter_.charge(2 * w * primes_.size());
  const std::uint64_t pairs = static_cast<std::uint64_t>(n_) * (n_ - 1) / 2;
  meter_.charge(bits_for(pairs));
}

NodeId StreamState::rename(std::uint64_t id) {
  if (mode_ == IdMode::kDense) {
    if (id >= n_)
      throw InputError("stream id " + std::to_string(id) + " out of range (n=" +
                       std::to_string(n_) + ")");
    return static_cast<NodeId>(id);
  }
  if (auto it = table_.find(id); it != table_.end()) return it->second;
  if (table_.size() == n_)
    throw InputError("stream id " + std::to_string(id) +
                     " is new but all n ids are taken");
  const NodeId fresh = static_cast<NodeId>(table_.size());
  table_.emplace(id, fresh);
  meter_.charge(64 + bits_for(n_ - 1));
  return fresh;
}

void stream_update(StreamState& st, std::uint64_t u, std::uint64_t v) {
  if (u == v) throw InputError("self-loop in edge stream at " + std::to_string(u));
  NodeId a = st.rename(u);
  NodeId b = st.rename(v);
  if (a > b) std::swap(a, b);
  const std::uint64_t l = edge_order(a, b, st.n_);
  if (!st.seen_.insert(l).second)
    throw InputError("duplicate edge in stream: " + std::to_string(u) + " " +
                     std::to_string(v));
  for (std::size_t t = 0; t < st.primes_.size(); ++t)
    st.residues_[t] = (st.residues_[t] + pow2_mod(l, st.primes_[t])) % st.primes_[t];
  ++st.edges_;
}

bool stream_decide(StreamState& st, const Graph& gk, NodeId cap) {
  const NodeId n = st.n();
  if (gk.n() != n) throw InputError("known graph size differs from the stream's n");
  if (n > cap)
    throw RefusalError("permutation enumeration refused: n=" + std::to_string(n) +
                       " exceeds cap " + std::to_string(cap));
  const auto& primes = st.primes();
  const auto& residues = st.residues();
  // Current permutation, one accumulator, and the prime/edge loop indices.
  const std::uint64_t bits = static_cast<std::uint64_t>(n) * bits_for(n - 1) +
                             prime_bits(primes) + bits_for(primes.size()) +
                             bits_for(gk.num_edges());
  st.meter().charge(bits);
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  bool accept = false;
  do {
    bool match = true;
    for (std::size_t t = 0; t < primes.size() && match; ++t) {
      std::uint64_t r = 0;
      for (NodeId u = 0; u < n; ++u)
        for (NodeId w : gk.neighbors(u)) {
          if (w < u) continue;
          const NodeId a = std::min(perm[u], perm[w]), b = std::max(perm[u], perm[w]);
          r = (r + pow2_mod(edge_order(a, b, n), primes[t])) % primes[t];
        }
      match = r == residues[t];
    }
    accept = match;
  } while (!accept && std::next_permutation(perm.begin(), perm.end()));
  st.meter().release(bits);
  return accept;
}

}  // namespace cgi
