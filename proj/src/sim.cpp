#include "cgi/sim.hpp"

#include <algorithm>
#include <ostream>

#include "cgi/errors.hpp"

namespace cgi {

std::uint64_t default_bandwidth(NodeId n) {
  return std::max<std::uint64_t>(32, 4 * ceil_log2(std::max<NodeId>(n, 1)));
}

NetworkConfig NetworkConfig::congest(NodeId n, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.bandwidth_bits = default_bandwidth(n);
  cfg.seed = seed;
  return cfg;
}

NetworkConfig NetworkConfig::local(std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.bandwidth_bits = kUnboundedBandwidth;
  cfg.seed = seed;
  return cfg;
}

nlohmann::json Transcript::to_json() const {
  nlohmann::json outs = nlohmann::json::array();
  for (std::size_t v = 0; v < outputs.size(); ++v)
    if (!outputs[v].empty()) outs.push_back({{"node", v}, {"verdict", outputs[v]}});
  return {{"rounds", rounds},
          {"total_bits", total_bits},
          {"max_edge_bits", max_edge_bits},
          {"outputs", outs}};
}

void Transcript::write_events_csv(std::ostream& out) const {
  out << "round,src,dst,bits\n";
  for (const Event& e : events)
    out << e.round << ',' << e.src << ',' << e.dst << ',' << e.bits << '\n';
}

std::uint64_t Transcript::rounds_of(std::string_view prefix) const {
  std::uint64_t r = 0;
  for (const auto& p : phases)
    if (std::string_view(p.name).substr(0, prefix.size()) == prefix) r += p.rounds;
  return r;
}

NodeId NodeContext::n() const { return net_->n(); }

std::size_t NodeContext::port_of(NodeId peer) const {
  auto it = std::lower_bound(ports_->begin(), ports_->end(), peer);
  if (it == ports_->end() || *it != peer)
    throw ContractViolation("node " + std::to_string(id_) +
                            " has no port to " + std::to_string(peer));
  return static_cast<std::size_t>(it - ports_->begin());
}

std::uint64_t NodeContext::bandwidth() const { return net_->bandwidth(); }

void NodeContext::send(std::size_t port, BitString msg) {
  if (port >= ports_->size())
    throw ContractViolation("node " + std::to_string(id_) + ": bad port " +
                            std::to_string(port));
  net_->post(id_, port, std::move(msg));
}

Rng& NodeContext::rng() { return net_->rngs_[id_]; }

Network::Network(const Graph& topology, NetworkConfig cfg)
    : topo_(topology), cfg_(cfg) {
  if (cfg_.bandwidth_bits == 0) throw InputError("bandwidth must be positive");
  const NodeId n = topo_.n();
  if (cfg_.bandwidth_bits != kUnboundedBandwidth &&
      cfg_.bandwidth_bits < bits_for(n))
    throw InputError("bandwidth " + std::to_string(cfg_.bandwidth_bits) +
                     " cannot carry a node id");
  rngs_.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    rngs_.emplace_back(derive_seed(cfg_.seed, {stream::kNode, v}));
  back_port_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w : topo_.neighbors(v)) {
      const auto& nw = topo_.neighbors(w);
      back_port_[v].push_back(static_cast<std::size_t>(
          std::lower_bound(nw.begin(), nw.end(), v) - nw.begin()));
    }
  }
  transcript_.outputs.assign(n, "");
}

void Network::post(NodeId src, std::size_t port, BitString msg) {
  const NodeId dst = topo_.neighbors(src)[port];
  const std::uint64_t round = round_base_ + current_round_;
  if (msg.empty())
    throw ContractViolation("node " + std::to_string(src) + " sent an empty message");
  if (msg.size() > cfg_.bandwidth_bits)
    throw BandwidthViolation(round, src, dst, msg.size(), cfg_.bandwidth_bits);
  if (sent_this_round_[src][port])
    throw ContractViolation("node " + std::to_string(src) +
                            " sent twice on one edge in round " + std::to_string(round));
  sent_this_round_[src][port] = true;
  any_sent_ = true;
  transcript_.events.push_back({round, src, dst, msg.size()});
  transcript_.total_bits += msg.size();
  transcript_.max_edge_bits = std::max<std::uint64_t>(transcript_.max_edge_bits, msg.size());
  phase_->bits += msg.size();
  ++phase_->messages;
  next_inbox_[dst][back_port_[src][port]] = std::move(msg);
}

PhaseStats Network::run_phase(std::string_view name,
                                     std::span<NodeProgram* const> programs) {
  const NodeId n = topo_.n();
  if (programs.size() != n)
    throw ContractViolation("run_phase needs one program per node");
  transcript_.phases.push_back(PhaseStats{std::string(name), 0, 0, 0});
  phase_ = &transcript_.phases.back();

  std::vector<std::vector<std::optional<BitString>>> inbox(n);
  next_inbox_.assign(n, {});
  sent_this_round_.assign(n, {});
  for (NodeId v = 0; v < n; ++v) {
    inbox[v].assign(topo_.degree(v), std::nullopt);
    next_inbox_[v].assign(topo_.degree(v), std::nullopt);
    sent_this_round_[v].assign(topo_.degree(v), false);
  }

  std::uint64_t last_active = 0;
  bool in_flight = false;
  for (current_round_ = 1;; ++current_round_) {
    if (round_base_ + current_round_ > cfg_.max_rounds)
      throw TimeoutError("phase '" + std::string(name) + "' exceeded max_rounds=" +
                         std::to_string(cfg_.max_rounds));
    if (in_flight) last_active = current_round_;
    for (NodeId v = 0; v < n; ++v) {
      std::swap(inbox[v], next_inbox_[v]);
      std::fill(next_inbox_[v].begin(), next_inbox_[v].end(), std::nullopt);
      std::fill(sent_this_round_[v].begin(), sent_this_round_[v].end(), false);
    }
    any_sent_ = false;
    for (NodeId v = 0; v < n; ++v) {
      NodeContext ctx;
      ctx.net_ = this;
      ctx.id_ = v;
      ctx.round_ = current_round_;
      ctx.ports_ = &topo_.neighbors(v);
      ctx.inbox_ = &inbox[v];
      programs[v]->step(ctx);
    }
    if (any_sent_) last_active = current_round_;
    in_flight = any_sent_;
    if (!in_flight &&
        std::all_of(programs.begin(), programs.end(),
                    [](const NodeProgram* p) { return p->done(); }))
      break;
  }
  phase_->rounds = last_active;
  round_base_ += last_active;
  transcript_.rounds = round_base_;
  current_round_ = 0;
  return *phase_;
}

void Network::set_output(NodeId v, std::string value) {
  topo_.check_node(v);
  transcript_.outputs[v] = std::move(value);
}

std::vector<BitString> fragment(const BitString& payload, std::uint64_t bandwidth,
                                unsigned header) {
  if (bandwidth <= header)
    throw InputError("bandwidth must exceed the fragment header");
  const std::uint64_t body = bandwidth - header;
  std::vector<BitString> out;
  for (std::size_t pos = 0, seq = 0; pos < payload.size(); pos += body, ++seq) {
    BitString f;
    f.append(seq, header);
    f.append(payload.slice(pos, std::min<std::size_t>(body, payload.size() - pos)));
    out.push_back(std::move(f));
  }
  return out;
}

BitString reassemble(std::span<const BitString> fragments, unsigned header) {
  BitString out;
  const std::uint64_t mask =
      header >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << header) - 1;
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    const BitString& f = fragments[i];
    if (f.size() < header || f.read(0, header) != (i & mask))
      throw InputError("fragment " + std::to_string(i) + " out of sequence");
    out.append(f.slice(header, f.size() - header));
  }
  return out;
}

}  // namespace cgi
