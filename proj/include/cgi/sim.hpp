#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cgi/bits.hpp"
#include "cgi/graph.hpp"
#include "cgi/random.hpp"

namespace cgi {

inline constexpr std::uint64_t kUnboundedBandwidth =
    std::numeric_limits<std::uint64_t>::max();

/// max(32, 4 * ceil(log2 n)).
std::uint64_t default_bandwidth(NodeId n);

struct NetworkConfig {
  std::uint64_t bandwidth_bits = 32;
  std::uint64_t max_rounds = 1'000'000;
  std::uint64_t seed = 0;

  static NetworkConfig congest(NodeId n, std::uint64_t seed);
  /// Unbounded message size.
  static NetworkConfig local(std::uint64_t seed);
};

struct Event {
  std::uint64_t round;
  NodeId src;
  NodeId dst;
  std::uint64_t bits;
};

struct PhaseStats {
  std::string name;
  std::uint64_t rounds = 0;
  std::uint64_t bits = 0;
  std::uint64_t messages = 0;
};

struct Transcript {
  std::uint64_t rounds = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_edge_bits = 0;
  std::vector<Event> events;
  std::vector<PhaseStats> phases;
  /// Per-node final output; empty string when a node produced none.
  std::vector<std::string> outputs;

  /// {rounds, total_bits, max_edge_bits, outputs: [{node, verdict}]}
  nlohmann::json to_json() const;
  /// "round,src,dst,bits" header plus one line per event.
  void write_events_csv(std::ostream& out) const;
  /// Rounds of all phases whose name starts with `prefix`.
  std::uint64_t rounds_of(std::string_view prefix) const;
};

class Network;

/// What a node sees during one round: its id, its ports (neighbor ids in
/// ascending order), what arrived on each port, and its private rng.
class NodeContext {
 public:
  NodeId id() const { return id_; }
  /// Network size; nodes are assumed to know n.
  NodeId n() const;
  std::size_t degree() const { return ports_->size(); }
  const std::vector<NodeId>& ports() const { return *ports_; }
  NodeId peer(std::size_t port) const { return (*ports_)[port]; }
  /// Port leading to neighbor `peer`; throws ContractViolation otherwise.
  std::size_t port_of(NodeId peer) const;

  /// Round number inside the current phase, starting at 1.
  std::uint64_t round() const { return round_; }
  std::uint64_t bandwidth() const;

  bool has_message(std::size_t port) const { return (*inbox_)[port].has_value(); }
  const BitString& message(std::size_t port) const { return *(*inbox_)[port]; }

  /// At most one non-empty message per port per round, at most B bits.
  void send(std::size_t port, BitString msg);

  Rng& rng();

 private:
  friend class Network;
  Network* net_ = nullptr;
  NodeId id_ = 0;
  std::uint64_t round_ = 0;
  const std::vector<NodeId>* ports_ = nullptr;
  const std::vector<std::optional<BitString>>* inbox_ = nullptr;
};

/// Per-node state machine for one phase.
class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual void step(NodeContext& ctx) = 0;
  virtual bool done() const = 0;
};

/// Synchronous CONGEST network over a fixed topology. Protocols run as a
/// sequence of phases; a phase ends once every program reports done and no
/// message is in flight, which also serves as the barrier between phases.
class Network {
 public:
  Network(const Graph& topology, NetworkConfig cfg);

  const Graph& topology() const { return topo_; }
  NodeId n() const { return topo_.n(); }
  const NetworkConfig& config() const { return cfg_; }
  std::uint64_t bandwidth() const { return cfg_.bandwidth_bits; }

  /// Runs one phase. `programs[v]` drives node v.
  PhaseStats run_phase(std::string_view name,
                              std::span<NodeProgram* const> programs);

  template <class P>
  PhaseStats run(std::string_view name, std::vector<P>& programs) {
    std::vector<NodeProgram*> ptrs;
    ptrs.reserve(programs.size());
    for (auto& p : programs) ptrs.push_back(&p);
    return run_phase(name, ptrs);
  }

  void set_output(NodeId v, std::string value);
  const Transcript& transcript() const { return transcript_; }
  Transcript take_transcript() { return std::move(transcript_); }

 private:
  friend class NodeContext;
  void post(NodeId src, std::size_t port, BitString msg);

  Graph topo_;
  NetworkConfig cfg_;
  std::vector<Rng> rngs_;
  // back_port_[v][p]: port index of v at its p-th neighbor.
  std::vector<std::vector<std::size_t>> back_port_;
  std::vector<std::vector<std::optional<BitString>>> next_inbox_;
  std::vector<std::vector<bool>> sent_this_round_;
  std::uint64_t round_base_ = 0;
  std::uint64_t current_round_ = 0;
  bool any_sent_ = false;
  PhaseStats* phase_ = nullptr;
  Transcript transcript_;
};

/// Splits a payload into messages of at most `bandwidth` bits: a `header`-bit
/// sequence number followed by up to bandwidth - header body bits.
std::vector<BitString> fragment(const BitString& payload, std::uint64_t bandwidth,
                                unsigned header = 8);
/// Inverse of fragment; throws InputError on out-of-order sequence numbers.
BitString reassemble(std::span<const BitString> fragments, unsigned header = 8);

}  // namespace cgi
