#pragma once

#include <filesystem>
#include <string>

#include "wkpi/graph.hpp"

namespace wkpi {

/// Loads a dataset in the TU benchmark text layout from `dir`:
///   NAME_A.txt               edge list "i, j" over global 1-based node ids
///   NAME_graph_indicator.txt one 1-based graph id per node
///   NAME_graph_labels.txt    one integer label per graph
///   NAME_node_labels.txt     optional, one integer per node
/// Tokens may be separated by commas and/or whitespace; CRLF is accepted.
/// Raw labels are remapped to {0..k-1} in ascending order of value.
/// Throws FormatError on missing files, bad tokens, cross-graph edges or an
/// empty graph set.
Dataset load_tu_dataset(const std::filesystem::path& dir, const std::string& name);

/// Writes `data` in the same layout (each edge listed in both directions).
void save_tu_dataset(const Dataset& data, const std::filesystem::path& dir, const std::string& name);

}  // namespace wkpi
