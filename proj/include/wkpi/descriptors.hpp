#pragma once

#include "wkpi/graph.hpp"

namespace wkpi {

/// Node degree as a node-valued descriptor.
DescriptorValues degree_function(const Graph& g);

/// Per-edge Jaccard index |N(u) ∩ N(v)| / |N(u) ∪ N(v)| of the open
/// neighbourhoods. The union always contains u and v, so it is never empty.
DescriptorValues jaccard_index(const Graph& g);

/// Per-edge Ollivier-Ricci curvature 1 - W1(m_u, m_v) / d(u, v), where m_x
/// keeps `laziness` at x and spreads the rest uniformly over N(x). Distances
/// are hop counts and W1 is solved exactly as a transportation problem.
DescriptorValues ricci_curvature(const Graph& g, const RicciConfig& cfg = {});

/// Nodes keep f(v); each edge takes the max of its endpoint values.
SimplexValues extend_node_to_edge(const Graph& g, const DescriptorValues& f);

/// Edges keep f(e); each node takes the min over its incident edges.
/// Isolated nodes get the global minimum edge value. Throws InvalidArgument
/// for a graph with nodes but no edges.
SimplexValues extend_edge_to_node(const Graph& g, const DescriptorValues& f);

/// Dispatches to one of the two extensions according to f.kind.
SimplexValues extend_to_simplices(const Graph& g, const DescriptorValues& f);

}  // namespace wkpi
