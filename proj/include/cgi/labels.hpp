#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cgi/graph.hpp"
#include "cgi/random.hpp"

namespace cgi {

/// s-bit adjacency signature of a node against an anchor sequence C.
/// Bit i (0-based storage) corresponds to anchor c_{i+1}.
class Label {
 public:
  Label() = default;
  explicit Label(std::size_t s) : bits_(s, false) {}
  /// "101" -> bits (c_1 = 1, c_2 = 0, c_3 = 1).
  static Label from_string(std::string_view s);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool b) { bits_[i] = b; }

  /// Largest 1-indexed position holding a 1; nullopt for the all-zero label.
  std::optional<std::size_t> msb() const;
  bool is_zero() const { return !msb().has_value(); }

  std::string to_string() const;

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;

 private:
  std::vector<bool> bits_;
};

Label c_label(const Graph& g, const NodeSeq& c, NodeId v);
/// Labels of all nodes, indexed by node id.
std::vector<Label> c_labels(const Graph& g, const NodeSeq& c);

/// S^G_C(x), ascending ids.
std::vector<NodeId> label_class(const Graph& g, const NodeSeq& c,
                                const Label& x);
/// |S^G_C(x)| for every label x that occurs.
std::map<Label, std::size_t> class_sizes(const Graph& g, const NodeSeq& c);

/// Brute force over all node pairs.
bool is_beta_separating(const Graph& g, const NodeSeq& c, double beta);

bool is_label_consistent(const Bijection& f, const Graph& g, const Graph& h,
                         const NodeSeq& cg, const NodeSeq& ch);

bool is_max_consistent(const Bijection& f, const Graph& g, const Graph& h,
                       const NodeSeq& cg, const NodeSeq& ch);

/// Uniform draw from the maximally (C, P)-label-consistent bijections.
/// Requires matching labels on anchors: l_C(c_i) = l_P(p_i).
Bijection sample_max_consistent(const Graph& g, const Graph& h,
                                const NodeSeq& c, const NodeSeq& p, Rng& rng);

}  // namespace cgi
