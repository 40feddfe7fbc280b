#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgi/graph.hpp"
#include "cgi/labels.hpp"
#include "cgi/random.hpp"
#include "cgi/sim.hpp"
#include "cgi/testing.hpp"

namespace cgi {

/// Total order on V_K: ascending id, with the members of P above everyone.
std::vector<std::uint64_t> known_order(NodeId n, const NodeSeq& p);

/// Cluster i (1-based) holds the nodes whose label has msb i.
struct ClusterPlan {
  /// j[i-1] = |J_U(i)| - |J_K(i)|.
  std::vector<std::int64_t> j;
  /// |J_K(i)|, indexed like j.
  std::vector<std::size_t> jk;
  /// R, sorted by the total order.
  std::vector<NodeId> reserved;
  /// Offset of cluster i's surplus slice in `reserved` (clusters with j > 0).
  std::vector<std::size_t> slice_begin;
  std::vector<std::uint64_t> rank;

  bool is_reserved(NodeId u) const;
};

/// R takes the |j_i| lowest-order nodes of every deficit cluster. Throws
/// ProtocolAbort when the j_i do not sum to zero or R would reach into P.
ClusterPlan build_cluster_plan(const Graph& gk, const NodeSeq& p,
                               const std::vector<std::int64_t>& j);

/// Images in V_K for the members of cluster i, as coordinator c_i computes
/// them. Anchors c_a among the members go to p_a. Throws ContractViolation
/// for a member whose label has another msb.
std::vector<std::pair<NodeId, NodeId>> assign_g_cluster(
    std::size_t i, const ClusterPlan& plan, const Graph& gk, const NodeSeq& c,
    const NodeSeq& p, const std::vector<std::pair<NodeId, Label>>& members, Rng& rng);

/// Members of Y (zero label, anchors excluded) number themselves 1..|Y| and
/// take the matching node of `y_prime` (zero-label nodes of G_K outside P, in
/// the total order). Throws ProtocolAbort on a size mismatch.
std::vector<std::optional<NodeId>> match_zero_class(Network& net, const BfsTree& tree,
                                                    const std::vector<bool>& in_y,
                                                    const std::vector<NodeId>& y_prime);

struct ApproxResult {
  /// False when the tester rejected; g is then empty.
  bool success = false;
  std::vector<NodeId> g;
  std::size_t delta = 0;
  TestResult tester;
  NodeSeq c;
  NodeSeq p;
  ClusterPlan plan;
  std::size_t y_size = 0;
  /// Nodes of V_U in label classes whose sizes differ between the graphs.
  std::size_t b_size = 0;
  Transcript transcript;

  nlohmann::json to_json() const;
};

/// The tester with the zero-label check, then the cluster plan, the zero
/// class numbering and one round in which coordinators hand out g(v).
ApproxResult run_approx_iso(const Graph& topology, const Graph& gk, const TestParams& params,
                            const NetworkConfig& cfg);

/// A maximally (C, P)-label-consistent bijection that agrees with g on every
/// node outside Y and outside mismatched classes whose g-image lies in its
/// own class; the rest is completed uniformly within the allowed classes.
Bijection coupled_reference(const Graph& gu, const Graph& gk, const NodeSeq& c,
                            const NodeSeq& p, const std::vector<NodeId>& g, Rng& rng);

}  // namespace cgi
