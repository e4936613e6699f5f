#include "wkpi/pimage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "wkpi/error.hpp"
#include "wkpi/text_io.hpp"

namespace wkpi {
namespace {

// P(a <= X <= b) for X ~ N(mean, sd^2), computed on the tail that keeps the
// difference accurate.
double normal_mass(double a, double b, double mean, double sd) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double za = (a - mean) / sd * kInvSqrt2;
  const double zb = (b - mean) / sd * kInvSqrt2;
  if (za >= 0.0) return 0.5 * (std::erfc(za) - std::erfc(zb));
  if (zb <= 0.0) return 0.5 * (std::erfc(-zb) - std::erfc(-za));
  return 1.0 - 0.5 * (std::erfc(-za) + std::erfc(zb));
}

void put_u32(std::ostream& out, std::uint32_t x) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((x >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

bool get_bytes(std::istream& in, unsigned char* b, std::size_t n) {
  in.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!get_bytes(in, b, 4)) throw FormatError("image container: truncated header");
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return x;
}

double get_f64(std::istream& in, bool& ok) {
  unsigned char b[8];
  ok = get_bytes(in, b, 8);
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(x);
}

constexpr char kMagic[8] = {'W', 'K', 'P', 'I', '-', 'P', 'I', '1'};

}  // namespace

Point2 birth_persistence_transform(double birth, double death) { return {birth, death - birth}; }

GridSpec GridSpec::from_bounds(double x_min, double x_max, double y_min, double y_max, int y_resolution) {
  if (y_resolution < 1) throw InvalidArgument("grid: y_resolution must be positive");
  if (!(y_max > y_min) || !(x_max >= x_min)) throw InvalidArgument("grid: empty bounding box");
  GridSpec g;
  g.x_min = x_min;
  g.y_min = y_min;
  g.y_max = y_max;
  g.y_resolution = y_resolution;
  g.pixel_size = (y_max - y_min) / y_resolution;
  const double columns = (x_max - x_min) / g.pixel_size;
  // Absorb rounding noise so that an exact multiple does not gain a column.
  g.x_resolution = std::max(1, static_cast<int>(std::ceil(columns * (1.0 - 1e-12))));
  g.x_max = x_min + g.x_resolution * g.pixel_size;
  return g;
}

Point2 GridSpec::pixel_center(std::size_t s) const {
  const auto ix = static_cast<double>(s % static_cast<std::size_t>(x_resolution));
  const auto iy = static_cast<double>(s / static_cast<std::size_t>(x_resolution));
  return {x_min + (ix + 0.5) * pixel_size, y_min + (iy + 0.5) * pixel_size};
}

std::vector<Point2> GridSpec::pixel_centers() const {
  std::vector<Point2> out(size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = pixel_center(s);
  return out;
}

GridSpec fit_grid(std::span<const PersistenceDiagram> diagrams, int y_resolution, const GridFitOptions& options) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf;
  for (const auto& d : diagrams) {
    for (const auto& p : d.points) {
      const auto t = birth_persistence_transform(p);
      x_lo = std::min(x_lo, t.x);
      x_hi = std::max(x_hi, t.x);
      y_lo = std::min(y_lo, t.y);
      y_hi = std::max(y_hi, t.y);
    }
  }
  if (x_lo == kInf) throw InvalidArgument("fit_grid: no persistence points");

  const double min_pad = options.tau ? 3.0 * *options.tau : 0.0;
  auto margin = [&](double length) {
    double pad = std::max(options.padding_fraction * length, min_pad);
    if (length + 2.0 * pad <= 0.0) pad = 0.5;
    return pad;
  };
  const double px = margin(x_hi - x_lo);
  const double py = margin(y_hi - y_lo);
  return GridSpec::from_bounds(x_lo - px, x_hi + px, y_lo - py, y_hi + py, y_resolution);
}

double pl_weight(Point2 point, double b) {
  const double upper = std::abs(point.y - point.x);
  const double lower = std::abs(-point.y - point.x);
  if (point.y > 0.0 && upper < b) return upper / b;
  if (point.y < 0.0 && lower < b) return lower / b;
  return 1.0;
}

SurfaceWeight constant_surface_weight() {
  return [](Point2) { return 1.0; };
}

SurfaceWeight piecewise_linear_surface_weight(double b) {
  if (!(b > 0.0)) throw InvalidArgument("piecewise-linear weight needs b > 0");
  return [b](Point2 p) { return pl_weight(p, b); };
}

void PiConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("persistence image: tau must be positive");
}

std::size_t ImageLayout::size() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.grid.size();
  return n;
}

std::vector<Point2> ImageLayout::pixel_centers() const {
  std::vector<Point2> out;
  out.reserve(size());
  for (const auto& b : blocks) {
    const auto c = b.grid.pixel_centers();
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<int> ImageLayout::pixel_blocks() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::size_t k = 0; k < blocks.size(); ++k) out.insert(out.end(), blocks[k].grid.size(), static_cast<int>(k));
  return out;
}

double ImageLayout::max_pixel_size() const {
  double s = 0.0;
  for (const auto& b : blocks) s = std::max(s, b.grid.pixel_size);
  return s;
}

double ImageLayout::max_diagonal() const {
  double s = 0.0;
  for (const auto& b : blocks) s = std::max(s, std::hypot(b.grid.x_max - b.grid.x_min, b.grid.y_max - b.grid.y_min));
  return s;
}

PersistenceImage compute_persistence_image(const PersistenceDiagram& d, const GridSpec& grid, const PiConfig& cfg,
                                           int dimension) {
  cfg.validate();
  PersistenceImage image;
  image.layout.blocks.push_back({std::max(dimension, 0), grid, 0});
  image.pixels.assign(grid.size(), 0.0);

  const auto nx = static_cast<std::size_t>(grid.x_resolution);
  const auto ny = static_cast<std::size_t>(grid.y_resolution);
  std::vector<double> mass_x(nx);
  std::vector<double> mass_y(ny);
  for (const auto& p : d.points) {
    if (dimension >= 0 && p.dimension != dimension) continue;
    const auto u = birth_persistence_transform(p);
    const double alpha = cfg.surface_weight ? cfg.surface_weight(u) : 1.0;
    if (alpha == 0.0) continue;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double a = grid.x_min + static_cast<double>(ix) * grid.pixel_size;
      mass_x[ix] = normal_mass(a, a + grid.pixel_size, u.x, cfg.tau);
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double a = grid.y_min + static_cast<double>(iy) * grid.pixel_size;
      mass_y[iy] = alpha * normal_mass(a, a + grid.pixel_size, u.y, cfg.tau);
    }
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double wy = mass_y[iy];
      if (wy == 0.0) continue;
      double* row = image.pixels.data() + iy * nx;
      for (std::size_t ix = 0; ix < nx; ++ix) row[ix] += wy * mass_x[ix];
    }
  }
  return image;
}

PersistenceImage concatenate_images(std::vector<PersistenceImage> per_dimension) {
  std::stable_sort(per_dimension.begin(), per_dimension.end(), [](const auto& a, const auto& b) {
    return a.layout.blocks.front().dimension < b.layout.blocks.front().dimension;
  });
  PersistenceImage out;
  for (auto& img : per_dimension) {
    for (auto block : img.layout.blocks) {
      block.offset += out.pixels.size();
      out.layout.blocks.push_back(block);
    }
    out.pixels.insert(out.pixels.end(), img.pixels.begin(), img.pixels.end());
  }
  return out;
}

void write_images_csv(std::ostream& out, std::span<const PersistenceImage> images) {
  for (const auto& img : images) {
    for (std::size_t s = 0; s < img.pixels.size(); ++s) {
      if (s > 0) out << ',';
      out << format_double(img.pixels[s]);
    }
    out << '\n';
  }
}

void write_images_binary(std::ostream& out, const GridSpec& grid, std::span<const std::vector<double>> pixels) {
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(grid.x_resolution));
  put_u32(out, static_cast<std::uint32_t>(grid.y_resolution));
  put_f64(out, grid.x_min);
  put_f64(out, grid.x_max);
  put_f64(out, grid.y_min);
  put_f64(out, grid.y_max);
  for (const auto& img : pixels) {
    if (img.size() != grid.size()) throw InvalidArgument("image size does not match the grid");
    for (const double x : img) put_f64(out, x);
  }
}

BinaryImages read_images_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("image container: bad magic");
  BinaryImages result;
  auto& g = result.grid;
  g.x_resolution = static_cast<int>(get_u32(in));
  g.y_resolution = static_cast<int>(get_u32(in));
  bool ok = true;
  g.x_min = get_f64(in, ok);
  g.x_max = get_f64(in, ok);
  g.y_min = get_f64(in, ok);
  g.y_max = get_f64(in, ok);
  if (!ok || g.x_resolution < 1 || g.y_resolution < 1) throw FormatError("image container: bad header");
  g.pixel_size = (g.y_max - g.y_min) / g.y_resolution;
  const std::size_t n = g.size();
  for (;;) {
    std::vector<double> px(n);
    bool first_ok = true;
    px[0] = get_f64(in, first_ok);
    if (!first_ok) {
      if (in.gcount() == 0) break;
      throw FormatError("image container: truncated pixel data");
    }
    for (std::size_t s = 1; s < n; ++s) {
      px[s] = get_f64(in, ok);
      if (!ok) throw FormatError("image container: truncated pixel data");
    }
    result.pixels.push_back(std::move(px));
  }
  return result;
}

}  // namespace wkpi
