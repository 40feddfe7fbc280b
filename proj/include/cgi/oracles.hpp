#pragma once

#include <cstddef>
#include <optional>

#include "cgi/graph.hpp"

namespace cgi {

/// Size cap for the exhaustive permutation oracles.
inline constexpr NodeId kBruteForceCap = 9;

/// Ordered adjacency-matrix entries (i, j), i != j, where g and h disagree.
/// Twice the size of the edge symmetric difference.
std::size_t hamming_distance(const Graph& g, const Graph& h);

/// |E(g) xor E(h)|, i.e. hamming_distance / 2. Every eps*n^2 threshold in the
/// library compares against this count.
std::size_t edge_distance(const Graph& g, const Graph& h);

/// Exhaustive search over all n! bijections. Throws RefusalError above `cap`.
std::optional<Bijection> brute_iso(const Graph& g, const Graph& h,
                                   NodeId cap = kBruteForceCap);

/// min over bijections f of hamming_distance(f(g), h). Throws RefusalError
/// above `cap`.
std::size_t min_bijection_distance(const Graph& g, const Graph& h,
                                   NodeId cap = kBruteForceCap);

/// Exact isomorphism search by individualization and joint color refinement.
/// No size cap; exponential only on highly regular inputs.
std::optional<Bijection> find_isomorphism(const Graph& g, const Graph& h);

}  // namespace cgi
