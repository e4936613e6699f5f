#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wkpi/mixture.hpp"
#include "wkpi/pimage.hpp"

namespace wkpi {

enum class KernelVariant { wkpi, alt_wkpi };

KernelVariant parse_kernel_variant(const std::string& name);
std::string to_string(KernelVariant v);

struct WkpiParams {
  /// Width of the per-pixel Gaussian comparison.
  double kernel_sigma = 1.0;
  GaussianMixtureWeight weight;
  KernelVariant variant = KernelVariant::wkpi;

  void validate() const;
};

/// sum_s omega(p_s) exp(-(a_s - b_s)^2 / (2 sigma^2)).
double wkpi_kernel(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p);

/// sum_s exp(-omega(p_s) (a_s - b_s)^2 / (2 sigma^2)).
double alt_wkpi_kernel(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p);

/// Kernel selected by p.variant.
double kernel_value(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p);

/// sqrt(k(a,a) + k(b,b) - 2 k(a,b)). Radicands in [-1e-12 * scale, 0) are
/// clamped to zero; more negative ones raise NumericalError.
double wkpi_distance(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p);

/// Kernel on raw pixel vectors with omega already evaluated per pixel.
double kernel_from_weights(std::span<const double> a, std::span<const double> b, std::span<const double> omega,
                           double sigma, KernelVariant variant);

/// Squared kernel distance on raw pixel vectors, computed directly as
/// sum_s 2 omega_s (1 - exp(-d_s^2 / (2 sigma^2))) for WKPI and
/// sum_s 2 (1 - exp(-omega_s d_s^2 / (2 sigma^2))) for altWKPI.
double squared_distance_from_weights(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> omega, double sigma, KernelVariant variant);

/// n x n kernel matrix over images that share one layout.
Eigen::MatrixXd gram_matrix(std::span<const PersistenceImage> images, const WkpiParams& p, int threads = 1);

/// rows x cols kernel matrix between two image sets on the same layout.
Eigen::MatrixXd cross_gram_matrix(std::span<const PersistenceImage> rows, std::span<const PersistenceImage> cols,
                                  const WkpiParams& p, int threads = 1);

/// Throws InvalidArgument unless every image has the layout of the first.
void check_same_layout(std::span<const PersistenceImage> images);

}  // namespace wkpi
