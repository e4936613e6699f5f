#include "wkpi/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wkpi/error.hpp"
#include "wkpi/text_io.hpp"

namespace wkpi {

double GaussianMixtureWeight::operator()(Point2 z) const {
  double total = 0.0;
  for (const auto& c : components) {
    const double dx = z.x - c.x;
    const double dy = z.y - c.y;
    total += c.coefficient * std::exp(-(dx * dx + dy * dy) / (c.spread * c.spread));
  }
  return total;
}

std::vector<double> GaussianMixtureWeight::parameters() const {
  std::vector<double> theta;
  theta.reserve(parameter_count());
  for (const auto& c : components) {
    theta.push_back(c.x);
    theta.push_back(c.y);
    theta.push_back(c.spread);
    theta.push_back(c.coefficient);
  }
  return theta;
}

GaussianMixtureWeight GaussianMixtureWeight::from_parameters(std::span<const double> theta) {
  if (theta.size() % kParamsPerComponent != 0) throw InvalidArgument("mixture parameter count must be a multiple of 4");
  GaussianMixtureWeight w;
  for (std::size_t i = 0; i < theta.size(); i += kParamsPerComponent) {
    w.components.push_back({theta[i], theta[i + 1], theta[i + 2], theta[i + 3]});
  }
  return w;
}

void GaussianMixtureWeight::validate() const {
  if (components.empty()) throw InvalidArgument("mixture weight needs at least one component");
  for (const auto& c : components) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.spread) || !std::isfinite(c.coefficient)) {
      throw InvalidArgument("mixture weight has a non-finite parameter");
    }
    if (!(c.spread > 0.0)) throw InvalidArgument("mixture spreads must be positive");
    if (c.coefficient < 0.0) throw InvalidArgument("mixture coefficients must be non-negative");
  }
}

std::vector<double> weight_values(const GaussianMixtureWeight& w, std::span<const Point2> at) {
  std::vector<double> out(at.size());
  for (std::size_t s = 0; s < at.size(); ++s) out[s] = w(at[s]);
  return out;
}

std::vector<double> chain_weight_gradient(const GaussianMixtureWeight& w, std::span<const Point2> at,
                                          std::span<const double> d_omega) {
  if (at.size() != d_omega.size()) throw InvalidArgument("chain_weight_gradient: size mismatch");
  std::vector<double> grad(w.parameter_count(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    const auto& c = w.components[r];
    const double inv_s2 = 1.0 / (c.spread * c.spread);
    double gx = 0.0, gy = 0.0, gs = 0.0, gw = 0.0;
    for (std::size_t s = 0; s < at.size(); ++s) {
      const double g = d_omega[s];
      if (g == 0.0) continue;
      const double dx = at[s].x - c.x;
      const double dy = at[s].y - c.y;
      const double d2 = dx * dx + dy * dy;
      const double e = std::exp(-d2 * inv_s2);
      const double ge = g * e;
      gw += ge;
      gx += ge * dx;
      gy += ge * dy;
      gs += ge * d2;
    }
    const double scale = 2.0 * c.coefficient * inv_s2;
    grad[4 * r + 0] = scale * gx;
    grad[4 * r + 1] = scale * gy;
    grad[4 * r + 2] = scale * gs / c.spread;
    grad[4 * r + 3] = gw;
  }
  return grad;
}

void write_weight(std::ostream& out, const GaussianMixtureWeight& w) {
  out << w.size() << '\n';
  for (const auto& c : w.components) {
    out << format_double(c.x) << ' ' << format_double(c.y) << ' ' << format_double(c.spread) << ' '
        << format_double(c.coefficient) << '\n';
  }
}

void write_weight(const std::filesystem::path& path, const GaussianMixtureWeight& w) {
  write_file_atomically(path, [&](std::ostream& out) { write_weight(out, w); });
}

GaussianMixtureWeight read_weight(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  if (trim(line).empty()) throw FormatError("weight file: missing component count");
  const long long m = parse_integer(line);
  if (m < 1) throw FormatError("weight file: component count must be positive");
  GaussianMixtureWeight w;
  while (static_cast<long long>(w.size()) < m && std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < t.size()) {
      while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < t.size() && t[end] != ' ' && t[end] != '\t') ++end;
      if (end > pos) values.push_back(parse_double(t.substr(pos, end - pos)));
      pos = end;
    }
    if (values.size() != 4) throw FormatError("weight file: expected 'x y sigma w' in '" + line + "'");
    w.components.push_back({values[0], values[1], values[2], values[3]});
  }
  if (static_cast<long long>(w.size()) != m) throw FormatError("weight file: fewer components than declared");
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("weight file: ") + e.what());
  }
  return w;
}

GaussianMixtureWeight read_weight(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("missing file: " + path.string());
  return read_weight(in);
}

std::vector<double> sample_weight(const GaussianMixtureWeight& w, const GridSpec& grid) {
  const auto centers = grid.pixel_centers();
  return weight_values(w, centers);
}

void write_heatmap_csv(std::ostream& out, const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidArgument("heatmap size does not match the grid");
  const auto nx = static_cast<std::size_t>(grid.x_resolution);
  for (std::size_t iy = 0; iy < static_cast<std::size_t>(grid.y_resolution); ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (ix > 0) out << ',';
      out << format_double(values[iy * nx + ix]);
    }
    out << '\n';
  }
}

void write_heatmap_pgm(std::ostream& out, std::ostream& sidecar, const GridSpec& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidArgument("heatmap size does not match the grid");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double range = hi - lo;
  out << "P5\n" << grid.x_resolution << ' ' << grid.y_resolution << "\n65535\n";
  for (const double v : values) {
    const double t = range > 0.0 ? (v - lo) / range : 0.0;
    const auto q = static_cast<unsigned>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
    const char bytes[2] = {static_cast<char>((q >> 8) & 0xffu), static_cast<char>(q & 0xffu)};
    out.write(bytes, 2);
  }
  sidecar << "min=" << format_double(lo) << '\n' << "max=" << format_double(hi) << '\n';
}

}  // namespace wkpi
