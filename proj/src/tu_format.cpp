#include "wkpi/tu_format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "wkpi/error.hpp"

namespace wkpi {
namespace {

namespace fs = std::filesystem;

// One vector of integers per non-empty line.
std::vector<std::vector<long long>> read_integer_rows(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing file: " + path.string());
  std::vector<std::vector<long long>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<long long> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const char c = line[pos];
      if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
        ++pos;
        continue;
      }
      std::size_t end = pos;
      while (end < line.size() && line[end] != ',' && line[end] != ' ' && line[end] != '\t' &&
             line[end] != '\r') {
        ++end;
      }
      long long value = 0;
      const char* first = line.data() + pos;
      const char* last = line.data() + end;
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) {
        throw FormatError(path.filename().string() + ":" + std::to_string(line_no) +
                          ": non-integer token '" + line.substr(pos, end - pos) + "'");
      }
      row.push_back(value);
      pos = end;
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

fs::path file_for(const fs::path& dir, const std::string& name, const char* suffix) {
  return dir / (name + suffix);
}

}  // namespace

Dataset load_tu_dataset(const fs::path& dir, const std::string& name) {
  const auto edge_path = file_for(dir, name, "_A.txt");
  const auto indicator_path = file_for(dir, name, "_graph_indicator.txt");
  const auto label_path = file_for(dir, name, "_graph_labels.txt");
  for (const auto& p : {edge_path, indicator_path, label_path}) {
    if (!fs::exists(p)) throw FormatError("missing file: " + p.string());
  }

  const auto label_rows = read_integer_rows(label_path);
  const auto indicator_rows = read_integer_rows(indicator_path);
  const auto edge_rows = read_integer_rows(edge_path);
  if (label_rows.empty()) throw FormatError("empty graph set in " + label_path.string());

  const std::size_t graph_count = label_rows.size();
  std::vector<long long> raw_labels;
  raw_labels.reserve(graph_count);
  for (const auto& row : label_rows) {
    if (row.size() != 1) throw FormatError(label_path.filename().string() + ": expected one label per line");
    raw_labels.push_back(row[0]);
  }

  // Global node -> (graph, local index).
  const std::size_t total_nodes = indicator_rows.size();
  std::vector<std::size_t> node_graph(total_nodes);
  std::vector<int> node_local(total_nodes);
  std::vector<std::size_t> nodes_per_graph(graph_count, 0);
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const auto& row = indicator_rows[i];
    if (row.size() != 1 || row[0] < 1 || static_cast<std::size_t>(row[0]) > graph_count) {
      throw FormatError(indicator_path.filename().string() + ":" + std::to_string(i + 1) +
                        ": graph id out of range [1, " + std::to_string(graph_count) + "]");
    }
    const auto g = static_cast<std::size_t>(row[0] - 1);
    node_graph[i] = g;
    node_local[i] = static_cast<int>(nodes_per_graph[g]++);
  }

  std::vector<std::vector<std::pair<int, int>>> graph_edges(graph_count);
  for (std::size_t k = 0; k < edge_rows.size(); ++k) {
    const auto& row = edge_rows[k];
    if (row.size() != 2) throw FormatError(edge_path.filename().string() + ": expected two node ids per line");
    const long long a = row[0];
    const long long b = row[1];
    if (a < 1 || b < 1 || static_cast<std::size_t>(a) > total_nodes ||
        static_cast<std::size_t>(b) > total_nodes) {
      throw FormatError(edge_path.filename().string() + ":" + std::to_string(k + 1) +
                        ": node id outside [1, " + std::to_string(total_nodes) + "]");
    }
    const auto ia = static_cast<std::size_t>(a - 1);
    const auto ib = static_cast<std::size_t>(b - 1);
    if (node_graph[ia] != node_graph[ib]) {
      throw FormatError(edge_path.filename().string() + ":" + std::to_string(k + 1) + ": edge (" +
                        std::to_string(a) + ", " + std::to_string(b) + ") joins nodes of different graphs");
    }
    graph_edges[node_graph[ia]].emplace_back(node_local[ia], node_local[ib]);
  }

  Dataset data;
  data.name = name;
  data.graphs.reserve(graph_count);
  for (std::size_t g = 0; g < graph_count; ++g) {
    data.graphs.emplace_back(nodes_per_graph[g], graph_edges[g]);
  }

  data.raw_labels = raw_labels;
  std::sort(data.raw_labels.begin(), data.raw_labels.end());
  data.raw_labels.erase(std::unique(data.raw_labels.begin(), data.raw_labels.end()), data.raw_labels.end());
  data.class_count = static_cast<int>(data.raw_labels.size());
  data.labels.reserve(graph_count);
  for (const long long raw : raw_labels) {
    const auto it = std::lower_bound(data.raw_labels.begin(), data.raw_labels.end(), raw);
    data.labels.push_back(static_cast<int>(it - data.raw_labels.begin()));
  }

  const auto node_label_path = file_for(dir, name, "_node_labels.txt");
  if (fs::exists(node_label_path)) {
    const auto rows = read_integer_rows(node_label_path);
    if (rows.size() != total_nodes) {
      throw FormatError(node_label_path.filename().string() + ": expected one label per node");
    }
    data.node_labels.resize(graph_count);
    for (std::size_t g = 0; g < graph_count; ++g) data.node_labels[g].resize(nodes_per_graph[g]);
    for (std::size_t i = 0; i < total_nodes; ++i) {
      if (rows[i].empty()) throw FormatError(node_label_path.filename().string() + ": empty row");
      data.node_labels[node_graph[i]][static_cast<std::size_t>(node_local[i])] = rows[i][0];
    }
  }
  return data;
}

void save_tu_dataset(const Dataset& data, const fs::path& dir, const std::string& name) {
  data.validate();
  fs::create_directories(dir);
  std::ofstream edges(file_for(dir, name, "_A.txt"));
  std::ofstream indicator(file_for(dir, name, "_graph_indicator.txt"));
  std::ofstream labels(file_for(dir, name, "_graph_labels.txt"));
  if (!edges || !indicator || !labels) throw FormatError("cannot write dataset into " + dir.string());

  std::size_t offset = 1;
  for (std::size_t g = 0; g < data.graphs.size(); ++g) {
    const auto& graph = data.graphs[g];
    for (std::size_t v = 0; v < graph.node_count(); ++v) indicator << (g + 1) << '\n';
    for (const auto& e : graph.edges()) {
      edges << offset + static_cast<std::size_t>(e.u) << ", " << offset + static_cast<std::size_t>(e.v) << '\n';
      edges << offset + static_cast<std::size_t>(e.v) << ", " << offset + static_cast<std::size_t>(e.u) << '\n';
    }
    offset += graph.node_count();
    const int y = data.labels[g];
    const long long raw = data.raw_labels.size() == static_cast<std::size_t>(data.class_count)
                              ? data.raw_labels[static_cast<std::size_t>(y)]
                              : y;
    labels << raw << '\n';
  }
  if (!data.node_labels.empty()) {
    std::ofstream node_labels(file_for(dir, name, "_node_labels.txt"));
    for (const auto& per_graph : data.node_labels) {
      for (const long long l : per_graph) node_labels << l << '\n';
    }
  }
}

}  // namespace wkpi
