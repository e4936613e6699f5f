#pragma once

#include <cstddef>
#include <cstdint>

#include "wkpi/graph.hpp"

namespace wkpi {

Graph cycle_graph(std::size_t n);

/// Uniform random labelled tree on n nodes (decoded Pruefer sequence).
Graph random_tree(std::size_t n, std::uint64_t seed);

/// `per_class` cycles (class 0) followed by `per_class` random trees
/// (class 1), node counts uniform in [min_nodes, max_nodes].
Dataset cycles_vs_trees(std::size_t per_class, std::size_t min_nodes, std::size_t max_nodes, std::uint64_t seed);

}  // namespace wkpi
