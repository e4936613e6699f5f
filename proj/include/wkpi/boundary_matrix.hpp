#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace wkpi {

/// Sparse boundary matrix over Z/2. Column j lists the (strictly smaller)
/// filtration positions of the faces of simplex j, in ascending order.
using BoundaryColumn = std::vector<std::size_t>;

struct ReductionResult {
  /// (birth position, death position) for every paired column.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  /// Positions of simplices that create a class and are never paired.
  std::vector<std::size_t> unpaired;
};

/// Standard left-to-right column reduction: while the lowest entry of a
/// column is also the lowest entry of an earlier column, add that column.
ReductionResult reduce_boundary_matrix(std::vector<BoundaryColumn> columns);

}  // namespace wkpi
