#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wkpi/persistence.hpp"

namespace wkpi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// (birth, death) -> (birth, death - birth).
Point2 birth_persistence_transform(double birth, double death);
inline Point2 birth_persistence_transform(const PersistencePoint& p) {
  return birth_persistence_transform(p.birth, p.death);
}

/// Regular grid of square pixels on the birth-persistence plane. Pixel s
/// sits at row s / x_resolution (y index) and column s % x_resolution.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int x_resolution = 1;
  int y_resolution = 1;
  double pixel_size = 1.0;

  /// Pixel size (y_max - y_min) / y_resolution, x_resolution =
  /// ceil((x_max - x_min) / pixel_size); x_max is moved to the last pixel edge.
  static GridSpec from_bounds(double x_min, double x_max, double y_min, double y_max, int y_resolution);

  std::size_t size() const { return static_cast<std::size_t>(x_resolution) * static_cast<std::size_t>(y_resolution); }
  Point2 pixel_center(std::size_t s) const;
  std::vector<Point2> pixel_centers() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridFitOptions {
  /// Margin added on each side, as a fraction of that side's length.
  double padding_fraction = 0.1;
  /// When set, each margin is at least 3 * tau.
  std::optional<double> tau;
};

/// Bounding box of all transformed points, padded, then squared into pixels.
/// A side of zero length that stays degenerate after padding receives a
/// margin of half a unit. Throws InvalidArgument when there are no points.
GridSpec fit_grid(std::span<const PersistenceDiagram> diagrams, int y_resolution, const GridFitOptions& options = {});

/// Piecewise-linear surface weight: |y - x| / b or |-y - x| / b inside the band of
/// width b, 1 elsewhere (including y = 0).
double pl_weight(Point2 point, double b);

using SurfaceWeight = std::function<double(Point2)>;
SurfaceWeight constant_surface_weight();
SurfaceWeight piecewise_linear_surface_weight(double b);

struct PiConfig {
  /// Standard deviation of the Gaussian placed on each transformed point.
  double tau = 1.0;
  /// Weight of each point on the surface; empty means constant 1.
  SurfaceWeight surface_weight;

  void validate() const;
};

struct ImageBlock {
  int dimension = 0;
  GridSpec grid;
  std::size_t offset = 0;
  friend bool operator==(const ImageBlock&, const ImageBlock&) = default;
};

/// Pixel layout of a (possibly concatenated) persistence image.
struct ImageLayout {
  std::vector<ImageBlock> blocks;

  std::size_t size() const;
  /// Centers of all pixels in layout order.
  std::vector<Point2> pixel_centers() const;
  /// Block index of each pixel.
  std::vector<int> pixel_blocks() const;
  /// Largest pixel width over the blocks.
  double max_pixel_size() const;
  /// Largest bounding-box diagonal over the blocks.
  double max_diagonal() const;

  friend bool operator==(const ImageLayout&, const ImageLayout&) = default;
};

struct PersistenceImage {
  ImageLayout layout;
  std::vector<double> pixels;
};

/// Exact pixel integrals of the weighted Gaussian surface of `d`: each
/// point contributes a product of one-dimensional normal CDF differences.
/// Only points of `dimension` are used (all points when dimension < 0).
PersistenceImage compute_persistence_image(const PersistenceDiagram& d, const GridSpec& grid, const PiConfig& cfg,
                                           int dimension = -1);

/// Concatenates blocks in ascending dimension order.
PersistenceImage concatenate_images(std::vector<PersistenceImage> per_dimension);

/// One row per image, comma separated, shortest round-trip decimals.
void write_images_csv(std::ostream& out, std::span<const PersistenceImage> images);

/// Binary container for images on one grid: magic "WKPI-PI1", u32
/// x_resolution, u32 y_resolution, f64 x_min, x_max, y_min, y_max, then N f64
/// pixels per image; all little-endian.
void write_images_binary(std::ostream& out, const GridSpec& grid, std::span<const std::vector<double>> pixels);
struct BinaryImages {
  GridSpec grid;
  std::vector<std::vector<double>> pixels;
};
BinaryImages read_images_binary(std::istream& in);

}  // namespace wkpi
