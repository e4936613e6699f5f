#include "wkpi/boundary_matrix.hpp"

#include <algorithm>
#include <iterator>
#include <limits>

#include "wkpi/error.hpp"

namespace wkpi {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// a <- a + b over Z/2 (symmetric difference of sorted index lists).
void add_column(BoundaryColumn& a, const BoundaryColumn& b, BoundaryColumn& scratch) {
  scratch.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(scratch));
  a.swap(scratch);
}

}  // namespace

ReductionResult reduce_boundary_matrix(std::vector<BoundaryColumn> columns) {
  const std::size_t n = columns.size();
  std::vector<std::size_t> column_with_low(n, kNone);
  std::vector<char> paired(n, 0);
  BoundaryColumn scratch;
  ReductionResult result;

  for (std::size_t j = 0; j < n; ++j) {
    auto& col = columns[j];
    if (!col.empty() && col.back() >= j) throw InvalidArgument("boundary column references a later simplex");
    while (!col.empty()) {
      const std::size_t low = col.back();
      const std::size_t other = column_with_low[low];
      if (other == kNone) break;
      add_column(col, columns[other], scratch);
    }
    if (!col.empty()) {
      const std::size_t low = col.back();
      column_with_low[low] = j;
      paired[low] = 1;
      paired[j] = 1;
      result.pairs.emplace_back(low, j);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!paired[j]) result.unpaired.push_back(j);
  }
  return result;
}

}  // namespace wkpi
