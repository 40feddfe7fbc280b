#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cgi {

/// Malformed or out-of-range caller input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive computation was asked to run above its size cap.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A plug-in or caller broke an interface contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A distributed protocol reached a state it cannot continue from.
class ProtocolAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node tried to push more than B bits over one directed edge in one round.
class BandwidthViolation : public std::runtime_error {
 public:
  BandwidthViolation(std::uint64_t round, std::uint32_t src, std::uint32_t dst,
                     std::uint64_t bits, std::uint64_t limit)
      : std::runtime_error("bandwidth violation in round " +
                           std::to_string(round) + " on edge " +
                           std::to_string(src) + "->" + std::to_string(dst) +
                           ": " + std::to_string(bits) + " bits > B=" +
                           std::to_string(limit)),
        round_(round), src_(src), dst_(dst), bits_(bits) {}

  std::uint64_t round() const { return round_; }
  std::uint32_t src() const { return src_; }
  std::uint32_t dst() const { return dst_; }
  std::uint64_t bits() const { return bits_; }

 private:
  std::uint64_t round_;
  std::uint32_t src_;
  std::uint32_t dst_;
  std::uint64_t bits_;
};

/// The simulator hit its max_rounds cap.
class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cgi
