#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "wkpi/pimage.hpp"

namespace wkpi {

struct MixtureComponent {
  double x = 0.0;
  double y = 0.0;
  double spread = 1.0;
  double coefficient = 1.0;
  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Weight function on the birth-persistence plane:
///   omega(z) = sum_r w_r exp(-((z_x - x_r)^2 + (z_y - y_r)^2) / sigma_r^2).
/// Note the exponent has no factor 2. Parameters are laid out per component
/// as (x_r, y_r, sigma_r, w_r).
struct GaussianMixtureWeight {
  std::vector<MixtureComponent> components;

  static constexpr std::size_t kParamsPerComponent = 4;

  std::size_t size() const { return components.size(); }
  std::size_t parameter_count() const { return kParamsPerComponent * components.size(); }

  double operator()(Point2 z) const;

  std::vector<double> parameters() const;
  static GaussianMixtureWeight from_parameters(std::span<const double> theta);

  /// m >= 1, spreads > 0, coefficients >= 0, everything finite.
  void validate() const;

  friend bool operator==(const GaussianMixtureWeight&, const GaussianMixtureWeight&) = default;
};

inline double eval_weight(const GaussianMixtureWeight& w, Point2 z) { return w(z); }

/// omega evaluated at every point of `at`.
std::vector<double> weight_values(const GaussianMixtureWeight& w, std::span<const Point2> at);

/// Pulls a gradient with respect to the values omega(at[s]) back to the
/// 4m mixture parameters.
std::vector<double> chain_weight_gradient(const GaussianMixtureWeight& w, std::span<const Point2> at,
                                          std::span<const double> d_omega);

/// Text format: first line m, then m lines "x y sigma w".
void write_weight(std::ostream& out, const GaussianMixtureWeight& w);
void write_weight(const std::filesystem::path& path, const GaussianMixtureWeight& w);
GaussianMixtureWeight read_weight(std::istream& in);
GaussianMixtureWeight read_weight(const std::filesystem::path& path);

/// omega at the pixel centers of `grid`, row-major from the lowest y row.
std::vector<double> sample_weight(const GaussianMixtureWeight& w, const GridSpec& grid);

/// y_resolution lines of x_resolution comma separated values.
void write_heatmap_csv(std::ostream& out, const GridSpec& grid, std::span<const double> values);

/// Binary PGM (P5, maxval 65535, big-endian samples), row-major from the
/// lowest y row, min-max scaled. The scale is written to `sidecar` as
/// "min=<v>" and "max=<v>" lines.
void write_heatmap_pgm(std::ostream& out, std::ostream& sidecar, const GridSpec& grid, std::span<const double> values);

}  // namespace wkpi
