#include "wkpi/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "wkpi/boundary_matrix.hpp"
#include "wkpi/descriptors.hpp"
#include "wkpi/error.hpp"
#include "wkpi/text_io.hpp"
#include "wkpi/union_find.hpp"

namespace wkpi {
namespace {

bool point_less(const PersistencePoint& a, const PersistencePoint& b) {
  if (a.dimension != b.dimension) return a.dimension < b.dimension;
  if (a.essential != b.essential) return a.essential < b.essential;
  if (a.birth != b.birth) return a.birth < b.birth;
  return a.death < b.death;
}

void sort_points(std::vector<PersistencePoint>& points) { std::sort(points.begin(), points.end(), point_less); }

void check_sizes(const Graph& g, const SimplexValues& values) {
  if (values.node.size() != g.node_count() || values.edge.size() != g.edge_count()) {
    throw InvalidArgument("simplex values do not match the graph size");
  }
}

std::string edge_label(const Edge& e) { return "(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")"; }

// Simplex order shared by both passes: value (ascending or descending), then
// nodes before edges, then index.
std::vector<FiltrationEntry> ordered_entries(const Graph& g, const SimplexValues& values, bool descending) {
  std::vector<FiltrationEntry> entries;
  entries.reserve(g.node_count() + g.edge_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const int id = static_cast<int>(v);
    entries.push_back({0, id, id, id, values.node[v]});
  }
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    entries.push_back({1, static_cast<int>(k), e.u, e.v, values.edge[k]});
  }
  std::sort(entries.begin(), entries.end(), [descending](const FiltrationEntry& a, const FiltrationEntry& b) {
    if (a.value != b.value) return descending ? a.value > b.value : a.value < b.value;
    if (a.dimension != b.dimension) return a.dimension < b.dimension;
    return a.index < b.index;
  });
  return entries;
}

}  // namespace

std::size_t PersistenceDiagram::count(int dimension) const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [&](const auto& p) { return p.dimension == dimension; }));
}

std::size_t PersistenceDiagram::count_essential(int dimension) const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [&](const auto& p) { return p.dimension == dimension && p.essential; }));
}

PersistenceDiagram PersistenceDiagram::of_dimension(int dimension) const {
  PersistenceDiagram out;
  for (const auto& p : points) {
    if (p.dimension == dimension) out.points.push_back(p);
  }
  return out;
}

void PersistenceDiagram::sort() { sort_points(points); }

Filtration build_sublevel_filtration(const Graph& g, const SimplexValues& values) {
  check_sizes(g, values);
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    if (values.edge[k] < values.node[static_cast<std::size_t>(e.u)] ||
        values.edge[k] < values.node[static_cast<std::size_t>(e.v)]) {
      throw InvalidArgument("edge " + edge_label(e) + " has a value below one of its endpoints");
    }
  }
  return Filtration{ordered_entries(g, values, false), g.node_count()};
}

PersistenceDiagram compute_0dim_sublevel(const Filtration& filtration) {
  const std::size_t n = filtration.node_count;
  UnionFind uf(n);
  // Filtration position and value of the oldest node of each root's component.
  std::vector<std::size_t> oldest_pos(n, 0);
  std::vector<double> oldest_value(n, 0.0);
  std::vector<char> present(n, 0);

  PersistenceDiagram out;
  for (std::size_t pos = 0; pos < filtration.entries.size(); ++pos) {
    const auto& s = filtration.entries[pos];
    if (s.dimension == 0) {
      const auto v = static_cast<std::size_t>(s.index);
      present[v] = 1;
      oldest_pos[v] = pos;
      oldest_value[v] = s.value;
      continue;
    }
    const auto ru = uf.find(static_cast<std::size_t>(s.u));
    const auto rv = uf.find(static_cast<std::size_t>(s.v));
    if (ru == rv) continue;
    const bool u_older = oldest_pos[ru] < oldest_pos[rv];
    const auto elder = u_older ? ru : rv;
    const auto younger = u_older ? rv : ru;
    if (oldest_value[younger] != s.value) {
      out.points.push_back({oldest_value[younger], s.value, 0, false});
    }
    const std::size_t keep_pos = oldest_pos[elder];
    const double keep_value = oldest_value[elder];
    const auto root = uf.unite(ru, rv);
    oldest_pos[root] = keep_pos;
    oldest_value[root] = keep_value;
  }

  if (!filtration.entries.empty()) {
    const double cap = filtration.entries.back().value;
    for (std::size_t v = 0; v < n; ++v) {
      if (present[v] && uf.find(v) == v) out.points.push_back({oldest_value[v], cap, 0, true});
    }
  }
  out.sort();
  return out;
}

SimplexValues superlevel_values(const Graph& g, const DescriptorValues& f) {
  DescriptorValues negated = f;
  for (auto& x : negated.values) x = -x;
  SimplexValues sv = extend_to_simplices(g, negated);
  for (auto& x : sv.node) x = -x;
  for (auto& x : sv.edge) x = -x;
  return sv;
}

PersistenceDiagram compute_0dim_superlevel(const Graph& g, const DescriptorValues& f) {
  DescriptorValues negated = f;
  for (auto& x : negated.values) x = -x;
  const auto filtration = build_sublevel_filtration(g, extend_to_simplices(g, negated));
  auto diagram = compute_0dim_sublevel(filtration);
  for (auto& p : diagram.points) {
    p.birth = -p.birth;
    p.death = -p.death;
  }
  diagram.sort();
  return diagram;
}

PersistenceDiagram ExtendedPersistence::diagram() const {
  PersistenceDiagram out;
  out.points.reserve(ordinary0.size() + extended0.size() + extended1.size());
  out.points.insert(out.points.end(), ordinary0.begin(), ordinary0.end());
  out.points.insert(out.points.end(), extended0.begin(), extended0.end());
  out.points.insert(out.points.end(), extended1.begin(), extended1.end());
  out.sort();
  return out;
}

ExtendedPersistence compute_extended_persistence(const Graph& g, const SimplexValues& ascending,
                                                 const SimplexValues& descending) {
  check_sizes(g, ascending);
  check_sizes(g, descending);
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edge(k);
    if (descending.edge[k] > descending.node[static_cast<std::size_t>(e.u)] ||
        descending.edge[k] > descending.node[static_cast<std::size_t>(e.v)]) {
      throw InvalidArgument("descending value of edge " + edge_label(e) + " exceeds one of its endpoints");
    }
  }
  const auto up = build_sublevel_filtration(g, ascending).entries;
  const auto down = ordered_entries(g, descending, true);
  const std::size_t s = up.size();
  const std::size_t n = g.node_count();

  enum class Kind : unsigned char { apex, node, edge, cone_node, cone_edge };
  std::vector<Kind> kind(1 + 2 * s);
  std::vector<double> value(1 + 2 * s, 0.0);
  std::vector<std::size_t> up_node(n), up_edge(g.edge_count()), cone_node(n);
  std::vector<BoundaryColumn> columns(1 + 2 * s);
  kind[0] = Kind::apex;

  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t pos = 1 + k;
    const auto& x = up[k];
    value[pos] = x.value;
    if (x.dimension == 0) {
      kind[pos] = Kind::node;
      up_node[static_cast<std::size_t>(x.index)] = pos;
    } else {
      kind[pos] = Kind::edge;
      up_edge[static_cast<std::size_t>(x.index)] = pos;
      auto a = up_node[static_cast<std::size_t>(x.u)];
      auto b = up_node[static_cast<std::size_t>(x.v)];
      columns[pos] = {std::min(a, b), std::max(a, b)};
    }
  }
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t pos = 1 + s + k;
    const auto& x = down[k];
    value[pos] = x.value;
    if (x.dimension == 0) {
      kind[pos] = Kind::cone_node;
      cone_node[static_cast<std::size_t>(x.index)] = pos;
      columns[pos] = {0, up_node[static_cast<std::size_t>(x.index)]};
    } else {
      kind[pos] = Kind::cone_edge;
      BoundaryColumn col{up_edge[static_cast<std::size_t>(x.index)], cone_node[static_cast<std::size_t>(x.u)],
                         cone_node[static_cast<std::size_t>(x.v)]};
      std::sort(col.begin(), col.end());
      columns[pos] = std::move(col);
    }
  }

  const auto reduced = reduce_boundary_matrix(std::move(columns));
  if (reduced.unpaired.size() != 1 || reduced.unpaired.front() != 0) {
    throw NumericalError("extended persistence: cone apex is not the only essential class");
  }

  ExtendedPersistence out;
  for (const auto& [b, d] : reduced.pairs) {
    const double birth = value[b];
    const double death = value[d];
    if (kind[b] == Kind::node && kind[d] == Kind::edge) {
      if (birth != death) out.ordinary0.push_back({birth, death, 0, false});
    } else if (kind[b] == Kind::node && kind[d] == Kind::cone_node) {
      out.extended0.push_back({birth, death, 0, true});
    } else if (kind[b] == Kind::edge && kind[d] == Kind::cone_edge) {
      out.extended1.push_back({birth, death, 1, true});
    } else if (kind[b] == Kind::cone_node && kind[d] == Kind::cone_edge) {
      if (birth != death) out.relative1.push_back({birth, death, 1, false});
    } else {
      throw NumericalError("extended persistence: unexpected pair type");
    }
  }
  sort_points(out.ordinary0);
  sort_points(out.extended0);
  sort_points(out.extended1);
  sort_points(out.relative1);
  return out;
}

ExtendedPersistence compute_extended_persistence(const Graph& g, const DescriptorValues& f) {
  return compute_extended_persistence(g, extend_to_simplices(g, f), superlevel_values(g, f));
}

PersistenceDiagram merge_diagrams(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  PersistenceDiagram out;
  out.points.reserve(a.size() + b.size());
  out.points.insert(out.points.end(), a.points.begin(), a.points.end());
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  return out;
}

PersistenceDiagram drop_essential(const PersistenceDiagram& d) {
  PersistenceDiagram out;
  for (const auto& p : d.points) {
    if (!p.essential) out.points.push_back(p);
  }
  return out;
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d) {
  out << "birth,death,dim,essential\n";
  for (const auto& p : d.points) {
    out << format_double(p.birth) << ',' << format_double(p.death) << ',' << p.dimension << ','
        << (p.essential ? 1 : 0) << '\n';
  }
}

void write_diagram_csv(const std::filesystem::path& path, const PersistenceDiagram& d) {
  write_file_atomically(path, [&](std::ostream& out) { write_diagram_csv(out, d); });
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "birth,death,dim,essential") {
    throw FormatError("diagram CSV: missing header 'birth,death,dim,essential'");
  }
  PersistenceDiagram d;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (fields.size() != 4) throw FormatError("diagram CSV: expected 4 fields in '" + line + "'");
    PersistencePoint p;
    p.birth = parse_double(fields[0]);
    p.death = parse_double(fields[1]);
    p.dimension = static_cast<int>(parse_integer(fields[2]));
    const auto flag = parse_integer(fields[3]);
    if ((p.dimension != 0 && p.dimension != 1) || (flag != 0 && flag != 1)) {
      throw FormatError("diagram CSV: bad dim/essential in '" + line + "'");
    }
    p.essential = flag == 1;
    d.points.push_back(p);
  }
  return d;
}

PersistenceDiagram read_diagram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing file: " + path.string());
  return read_diagram_csv(in);
}

}  // namespace wkpi
