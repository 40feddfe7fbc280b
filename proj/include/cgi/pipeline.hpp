#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>

#include "cgi/bits.hpp"
#include "cgi/sim.hpp"

namespace cgi {

/// Result of asking a stream source for its next item.
struct Pull {
  enum class Kind { kItem, kWait, kEnd };
  Kind kind = Kind::kWait;
  BitString item;

  static Pull of(BitString item) { return {Kind::kItem, std::move(item)}; }
  static Pull wait() { return {Kind::kWait, {}}; }
  static Pull end() { return {Kind::kEnd, {}}; }
};

/// Outgoing item stream on one port. Each round `pump` fills one message up to
/// B bits, pulling items lazily so the source decides the order at the moment
/// an item starts to go out. Items longer than B continue in later rounds.
///
/// Framed streams prefix every item with a 1 bit and close with a 0 bit;
/// unframed streams carry bare items and rely on a count known to both sides.
class StreamWriter {
 public:
  explicit StreamWriter(bool framed = true) : framed_(framed) {}

  template <class Source>
  void pump(NodeContext& ctx, std::size_t port, Source&& next) {
    const std::uint64_t budget = ctx.bandwidth();
    BitString out;
    while (out.size() < budget) {
      if (pos_ < pending_.size()) {
        const std::size_t take = static_cast<std::size_t>(
            std::min<std::uint64_t>(budget - out.size(), pending_.size() - pos_));
        out.append(pending_.slice(pos_, take));
        pos_ += take;
        continue;
      }
      if (ended_) break;
      pending_ = BitString();
      pos_ = 0;
      Pull p = next();
      if (p.kind == Pull::Kind::kWait) break;
      if (p.kind == Pull::Kind::kEnd) {
        ended_ = true;
        if (framed_) pending_.push_bit(false);
        continue;
      }
      if (framed_) pending_.push_bit(true);
      pending_.append(p.item);
      ++items_;
    }
    if (!out.empty()) ctx.send(port, std::move(out));
  }

  /// End marker emitted and every bit handed to the network.
  bool finished() const { return ended_ && pos_ == pending_.size(); }
  std::size_t items_pulled() const { return items_; }

 private:
  bool framed_;
  bool ended_ = false;
  BitString pending_;
  std::size_t pos_ = 0;
  std::size_t items_ = 0;
};

/// Incoming item stream of fixed-width items on one port.
class StreamReader {
 public:
  explicit StreamReader(unsigned width = 1, bool framed = true)
      : width_(width), framed_(framed) {}

  void feed(const BitString& msg);

  bool has_item() const { return !items_.empty(); }
  const BitString& front() const { return items_.front(); }
  BitString pop();

  /// Framed streams only: end marker received.
  bool ended() const { return ended_; }
  std::size_t received() const { return received_; }

 private:
  unsigned width_;
  bool framed_;
  bool ended_ = false;
  BitString buf_;
  std::size_t pos_ = 0;
  std::size_t received_ = 0;
  std::deque<BitString> items_;
};

/// Source over a FIFO of items; `close()` marks the end.
class ItemQueue {
 public:
  void push(BitString item) { q_.push_back(std::move(item)); }
  void close() { closed_ = true; }
  bool closed() const { return closed_; }
  bool empty() const { return q_.empty(); }

  Pull operator()() {
    if (!q_.empty()) {
      BitString b = std::move(q_.front());
      q_.pop_front();
      return Pull::of(std::move(b));
    }
    return closed_ ? Pull::end() : Pull::wait();
  }

 private:
  std::deque<BitString> q_;
  bool closed_ = false;
};

}  // namespace cgi
