#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cgi/graph.hpp"
#include "cgi/random.hpp"
#include "cgi/sim.hpp"

namespace cgi {

struct Query {
  enum class Kind : std::uint8_t { kAdjacency = 0, kIncidence = 1, kDegree = 2 };
  Kind kind = Kind::kDegree;
  NodeId u = 0;
  /// Second node for adjacency, 0-based port for incidence, unused for degree.
  NodeId arg = 0;

  static Query adjacency(NodeId u, NodeId v) { return {Kind::kAdjacency, u, v}; }
  static Query incidence(NodeId u, NodeId port) { return {Kind::kIncidence, u, port}; }
  static Query degree(NodeId u) { return {Kind::kDegree, u, 0}; }
  friend auto operator<=>(const Query&, const Query&) = default;
};

/// Adjacency -> 0/1, incidence -> neighbor id (nullopt past the last port),
/// degree -> degree.
using Answer = std::optional<std::uint64_t>;

/// Answers queries against a materialized graph and counts them.
class QueryOracle {
 public:
  explicit QueryOracle(const Graph& g) : g_(&g) {}
  /// Throws InputError for node ids outside the graph.
  Answer answer(const Query& q);
  std::size_t count() const { return count_; }

 private:
  const Graph* g_;
  std::size_t count_ = 0;
};

/// Answer as node q.u computes it from its own ports.
Answer local_answer(const Graph& g, const Query& q);

/// Centralized query-based tester. The driver calls reset, then alternates
/// next() and feed() until next() returns nullopt, then reads verdict().
class QueryTester {
 public:
  virtual ~QueryTester() = default;
  virtual void reset(NodeId n, std::uint64_t seed) = 0;
  virtual std::optional<Query> next() = 0;
  virtual void feed(const Answer& a) = 0;
  virtual bool verdict() const = 0;
  /// Non-adaptive testers return their whole query list after reset.
  virtual std::optional<std::vector<Query>> declared_queries() const { return std::nullopt; }
};

/// q adjacency queries on uniform pairs u != v; accepts iff at least
/// rho * q of them are edges. Non-adaptive.
class DensityTester final : public QueryTester {
 public:
  DensityTester(std::size_t q, double rho) : q_(q), rho_(rho) {}
  void reset(NodeId n, std::uint64_t seed) override;
  std::optional<Query> next() override;
  void feed(const Answer& a) override;
  bool verdict() const override;
  std::optional<std::vector<Query>> declared_queries() const override { return plan_; }

 private:
  std::size_t q_;
  double rho_;
  std::vector<Query> plan_;
  std::size_t pos_ = 0;
  std::size_t hits_ = 0;
};

/// q degree queries at uniform nodes; accepts iff the mean degree is at most
/// max_mean.
class DegreeTester final : public QueryTester {
 public:
  DegreeTester(std::size_t q, double max_mean) : q_(q), max_mean_(max_mean) {}
  void reset(NodeId n, std::uint64_t seed) override;
  std::optional<Query> next() override;
  void feed(const Answer& a) override;
  bool verdict() const override;

 private:
  std::size_t q_;
  double max_mean_;
  NodeId n_ = 0;
  Rng rng_;
  std::size_t asked_ = 0;
  std::uint64_t sum_ = 0;
};

/// Random walk of `steps` moves: degree query, then incidence on a uniform
/// port. Rejects iff the walk meets a node of degree below min_degree.
class RandomWalkTester final : public QueryTester {
 public:
  RandomWalkTester(std::size_t steps, std::uint64_t min_degree)
      : steps_(steps), min_degree_(min_degree) {}
  void reset(NodeId n, std::uint64_t seed) override;
  std::optional<Query> next() override;
  void feed(const Answer& a) override;
  bool verdict() const override { return ok_; }

 private:
  std::size_t steps_;
  std::uint64_t min_degree_;
  Rng rng_;
  NodeId at_ = 0;
  std::size_t moves_ = 0;
  std::optional<std::uint64_t> pending_degree_;
  bool awaiting_degree_ = true;
  bool ok_ = true;
};

struct CentralRun {
  bool verdict = false;
  std::size_t queries = 0;
  /// Rounds after the BFS tree is in place.
  std::uint64_t rounds = 0;
  std::uint32_t depth = 0;
  Transcript transcript;
};

/// The tester run directly on g, seeded like the distributed wrappers.
CentralRun run_centralized(QueryTester& tester, const Graph& g, std::uint64_t seed);

/// One query at a time: down the BFS tree and the answer back up. Each query
/// costs at most 2 * depth rounds, the final verdict flood depth + 1.
CentralRun run_adaptive(QueryTester& tester, const Graph& topology, const NetworkConfig& cfg,
                        NodeId root = 0);

/// All declared queries streamed down, answers pipelined up, then the tester
/// runs at the root against the cached answers. A query outside the declared
/// list throws ContractViolation.
CentralRun run_nonadaptive(QueryTester& tester, const Graph& topology, const NetworkConfig& cfg,
                           NodeId root = 0);

}  // namespace cgi
