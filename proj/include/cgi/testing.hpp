#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cgi/graph.hpp"
#include "cgi/labels.hpp"
#include "cgi/protocols.hpp"
#include "cgi/random.hpp"
#include "cgi/sim.hpp"

namespace cgi {

struct TestParams {
  double eps = 0.3;
  std::size_t s = 1;
  std::size_t t = 1;
  double c_s = 8.0;
  double c_t = 8.0;
  bool desk_override = false;

  /// s = ceil(c_s ln n / eps) clamped to n, t = ceil(c_t s ln n / eps).
  static TestParams standard(NodeId n, double eps, double c_s = 8.0, double c_t = 8.0);
  /// Fixed s; t defaults to ceil(c_t s ln n / eps).
  static TestParams desk(NodeId n, double eps, std::size_t s,
                         std::optional<std::size_t> t = std::nullopt, double c_t = 8.0);
  /// Throws InputError unless eps in (0,1), 1 <= s <= n, t >= 1.
  void validate(NodeId n) const;
};

/// The pairs A, their edge answers in G_U, and the C-labels of I and C.
struct EdgeSample {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<bool> answers;
  std::map<NodeId, Label> labels;

  /// I = {i_1, j_1, ..., i_t, j_t} in order of first appearance.
  std::vector<NodeId> nodes() const;
};

/// Everything the root holds before it decides.
struct RootView {
  double eps = 0.3;
  NodeSeq c;
  /// C-labels of c_1..c_s in G_U.
  std::vector<Label> c_labels;
  EdgeSample sample;
  /// |S_C(l)| in G_U for every label of I (and the zero label when checked).
  std::map<Label, std::uint64_t> class_sizes;
};

/// Ordered s-tuples of distinct nodes of an n-node graph, lexicographic.
/// `visit` returns true to stop early. Returns the number of tuples visited.
std::uint64_t enumerate_sequences(NodeId n, std::size_t s,
                                  const std::function<bool(const NodeSeq&)>& visit);

/// Same order as enumerate_sequences, restricted to the tuples P passing the
/// anchor check l_C(c_i) = l_P(p_i); prefixes are cut as soon as two anchors
/// disagree on adjacency.
std::uint64_t enumerate_consistent_sequences(
    const Graph& gk, const std::vector<Label>& c_labels,
    const std::function<bool(const NodeSeq&)>& visit);

struct CheckOutcome {
  enum class Stage { kAnchors, kClassSizes, kMismatches, kPassed };
  Stage stage = Stage::kAnchors;
  std::uint64_t mismatches = 0;
  /// f on I, in order of first appearance (empty unless the class sizes matched).
  std::vector<std::pair<NodeId, NodeId>> f;
  bool passed() const { return stage == Stage::kPassed; }
};

/// Anchor check, class-size check, f draw and mismatch count for one P.
CheckOutcome sequence_check(const Graph& gk, const RootView& view, const NodeSeq& p,
                            Rng& rng);

/// Rng for the f of sequence P: depends only on (seed, P), never on A.
Rng bijection_rng(std::uint64_t seed, const NodeSeq& p);

struct TesterOptions {
  NodeId root = 0;
  /// Also compare the all-zero class sizes in the size check.
  bool zero_label_check = false;
  /// Enumerate every tuple instead of pruning on anchor adjacency.
  bool full_enumeration = false;
};

/// Node-local knowledge after the tester, for protocols that continue on.
struct TesterState {
  BfsTree tree;
  NodeSeq c;
  std::vector<Label> labels;
  std::vector<std::vector<Label>> neighbor_labels;
  std::vector<std::optional<std::size_t>> coord_index;
  RootView view;
};

struct TestResult {
  bool accept = false;
  std::uint64_t rounds = 0;
  std::uint64_t bits = 0;
  std::size_t s = 0;
  std::size_t t = 0;
  /// Complete sequences P that reached the class-size check.
  std::uint64_t sequences_tried = 0;
  std::size_t distinct_labels = 0;
  std::uint32_t election_restarts = 0;
  std::optional<NodeSeq> accepting_p;
  Transcript transcript;

  /// {verdict, rounds, bits, s, t, sequences_tried}
  nlohmann::json to_json() const;
};

/// Runs the tester's distributed steps on an existing network and decides.
/// Leaves the transcript in `net`; fills `state` when given.
TestResult run_tester_on(Network& net, const Graph& gk, const TestParams& params,
                         const TesterOptions& opts, TesterState* state = nullptr);

TestResult run_tester(const Graph& topology, const Graph& gk, const TestParams& params,
                      const NetworkConfig& cfg, const TesterOptions& opts = {});

}  // namespace cgi
