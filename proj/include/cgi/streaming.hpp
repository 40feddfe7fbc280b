#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cgi/graph.hpp"

namespace cgi {

/// Bits currently held by algorithm state, with the running peak.
class SpaceMeter {
 public:
  void charge(std::uint64_t bits) {
    current_ += bits;
    if (current_ > peak_) peak_ = current_;
  }
  void release(std::uint64_t bits) { current_ -= bits; }
  std::uint64_t current() const { return current_; }
  std::uint64_t peak() const { return peak_; }

 private:
  std::uint64_t current_ = 0;
  std::uint64_t peak_ = 0;
};

/// How stream node ids map to 0..n-1.
enum class IdMode {
  /// Ids already are 0..n-1; no table.
  kDense,
  /// Arbitrary 64-bit ids, numbered in order of first appearance.
  kExternal,
};

/// 64 * n * ceil(log2 n).
std::uint64_t stream_space_budget(NodeId n);

/// One-pass fingerprint state. The meter covers primes, residues, the edge
/// counter and the rename table. The duplicate-edge guard is input
/// validation and is not charged.
class StreamState {
 public:
  StreamState(NodeId n, std::vector<std::uint64_t> primes, IdMode mode = IdMode::kDense);

  NodeId n() const { return n_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  const std::vector<std::uint64_t>& residues() const { return residues_; }
  std::uint64_t edges_seen() const { return edges_; }
  const SpaceMeter& meter() const { return meter_; }
  SpaceMeter& meter() { return meter_; }

  /// Stream id -> number in 0..n-1; assigns a fresh number in external mode.
  NodeId rename(std::uint64_t id);

 private:
  friend void stream_update(StreamState& st, std::uint64_t u, std::uint64_t v);

  NodeId n_;
  IdMode mode_;
  std::vector<std::uint64_t> primes_;
  std::vector<std::uint64_t> residues_;
  std::uint64_t edges_ = 0;
  std::unordered_map<std::uint64_t, NodeId> table_;
  std::unordered_set<std::uint64_t> seen_;
  SpaceMeter meter_;
};

/// residues[t] += 2^l(u,v) mod primes[t]. Throws InputError on self-loops,
/// duplicate edges, and ids that do not fit.
void stream_update(StreamState& st, std::uint64_t u, std::uint64_t v);

/// Enumerates permutations of gk in lexicographic order, keeping only the
/// current permutation (charged to the meter). Throws RefusalError above cap.
bool stream_decide(StreamState& st, const Graph& gk, NodeId cap = 9);

}  // namespace cgi
