#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgi/graph.hpp"
#include "cgi/protocols.hpp"
#include "cgi/random.hpp"
#include "cgi/sim.hpp"

namespace cgi {

/// The first `count` primes, ascending.
std::vector<std::uint64_t> nth_primes(std::size_t count);

/// Position of pair (i, j), i < j, when pairs are sorted by first then second
/// element: l(0,1) = 0, l(0,2) = 1, ..., l(n-2,n-1) = n(n-1)/2 - 1.
std::uint64_t edge_order(NodeId i, NodeId j, NodeId n);

/// 2^e mod p by square-and-multiply.
std::uint64_t pow2_mod(std::uint64_t e, std::uint64_t p);

/// s(M) mod p_t for sampled primes p_t, where s(M) has bit l(i,j) set iff
/// {i, j} is an edge.
struct Fingerprint {
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> residues;

  nlohmann::json to_json() const;
  static Fingerprint from_json(const nlohmann::json& j);
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// Centralized reference: node v of g carries number numbering(v).
Fingerprint fingerprint_local(const Graph& g, const Bijection& numbering,
                              const std::vector<std::uint64_t>& primes);

/// k primes drawn with replacement from the first n^2 primes.
std::vector<std::uint64_t> sample_primes(NodeId n, std::size_t k, Rng& rng);

/// Pipelines the primes down the tree while partial residues flow up. Node v
/// with number numbers[v] owns every pair with a higher-numbered neighbor.
Fingerprint distributed_fingerprints(Network& net, const BfsTree& tree,
                                     const std::vector<NodeId>& numbers,
                                     const std::vector<std::vector<NodeId>>& neighbor_numbers,
                                     const std::vector<std::uint64_t>& primes);

/// Accept iff some permutation of gk reproduces every residue. Throws
/// RefusalError above `cap`.
bool decide_isomorphism(const Graph& gk, const Fingerprint& fp,
                        NodeId cap = 9);

/// When the distinct primes multiply past 2^(n(n-1)/2), CRT recovers s(M)
/// exactly and the verdict reduces to an exact isomorphism test; the answer
/// equals decide_isomorphism's. nullopt when the product is too small.
std::optional<bool> decide_by_reconstruction(const Graph& gk, const Fingerprint& fp);

struct DecisionOptions {
  double c_k = 2.0;
  /// Overrides k = ceil(c_k * n).
  std::optional<std::size_t> k;
  /// Skip the root's decide step (the protocol still runs every phase).
  bool rounds_only = false;
  NodeId root = 0;
  NodeId enumeration_cap = 9;
};

struct DecisionResult {
  /// nullopt in rounds-only mode.
  std::optional<bool> accept;
  /// "enumeration", "reconstruction" or "skipped".
  std::string method;
  Fingerprint fp;
  Transcript transcript;
};

DecisionResult run_decision_protocol(const Graph& topology, const Graph& gk,
                                     const DecisionOptions& opts,
                                     const NetworkConfig& cfg);

}  // namespace cgi
