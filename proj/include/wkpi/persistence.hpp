#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wkpi/graph.hpp"

namespace wkpi {

/// One simplex of a graph filtration. Nodes have u == v == index.
struct FiltrationEntry {
  int dimension = 0;
  int index = 0;  // node id or edge index
  int u = 0;
  int v = 0;
  double value = 0.0;
};

/// Simplices sorted by (value, dimension, index). Faces always precede
/// their cofaces.
struct Filtration {
  std::vector<FiltrationEntry> entries;
  std::size_t node_count = 0;

  std::size_t size() const { return entries.size(); }
};

struct PersistencePoint {
  double birth = 0.0;
  double death = 0.0;
  int dimension = 0;
  bool essential = false;

  double persistence() const { return death > birth ? death - birth : birth - death; }
  friend bool operator==(const PersistencePoint&, const PersistencePoint&) = default;
};

/// Multiset of persistence points (order carries no meaning).
struct PersistenceDiagram {
  std::vector<PersistencePoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::size_t count(int dimension) const;
  std::size_t count_essential(int dimension) const;
  /// Points of one dimension only.
  PersistenceDiagram of_dimension(int dimension) const;
  /// Canonical order, for comparisons and stable output.
  void sort();

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

/// Orders the simplices of `g` by the sublevel rule. Throws InvalidArgument,
/// naming the edge, when an edge value is below one of its endpoints.
Filtration build_sublevel_filtration(const Graph& g, const SimplexValues& values);

/// Ordinary 0-dimensional persistence by union-find with the elder rule.
/// Zero-persistence pairs are omitted. Every connected component yields one
/// essential point born at its minimum, with death capped at the global
/// maximum filtration value.
PersistenceDiagram compute_0dim_sublevel(const Filtration& filtration);

/// Superlevel (top-down) sweep: the sublevel diagram of -f, negated back, so
/// finite points have birth >= death and essentials are capped at the global
/// minimum. The descriptor is negated before it is extended to simplices.
PersistenceDiagram compute_0dim_superlevel(const Graph& g, const DescriptorValues& f);

/// The simplex values of the top-down sweep of f: for a node descriptor each
/// edge takes the min of its endpoints, for an edge descriptor each node takes
/// the max over its incident edges.
SimplexValues superlevel_values(const Graph& g, const DescriptorValues& f);

/// Pairs of the extended filtration, sorted by kind.
struct ExtendedPersistence {
  std::vector<PersistencePoint> ordinary0;  // merges in the ascending pass
  std::vector<PersistencePoint> extended0;  // one (min, max) pair per component
  std::vector<PersistencePoint> extended1;  // one pair per independent cycle
  std::vector<PersistencePoint> relative1;  // merges in the descending pass

  /// ordinary0 + extended0 + extended1; extended points are flagged essential.
  PersistenceDiagram diagram() const;
};

/// Extended persistence by exhaustive Z/2 column reduction of the coned
/// complex: cone vertex first, then the ascending simplices, then the cones
/// over the descending simplices. `descending` must satisfy the reverse
/// monotonicity (edge value <= endpoint values).
ExtendedPersistence compute_extended_persistence(const Graph& g, const SimplexValues& ascending,
                                                 const SimplexValues& descending);

/// Ascending pass over the sublevel extension of f, descending pass over its
/// superlevel extension.
ExtendedPersistence compute_extended_persistence(const Graph& g, const DescriptorValues& f);

/// Multiset union.
PersistenceDiagram merge_diagrams(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Removes essential points.
PersistenceDiagram drop_essential(const PersistenceDiagram& d);

/// CSV with header `birth,death,dim,essential`, shortest round-trip decimals.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d);
void write_diagram_csv(const std::filesystem::path& path, const PersistenceDiagram& d);
PersistenceDiagram read_diagram_csv(std::istream& in);
PersistenceDiagram read_diagram_csv(const std::filesystem::path& path);

}  // namespace wkpi
