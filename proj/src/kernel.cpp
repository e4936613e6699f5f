#include "wkpi/kernel.hpp"

#include <cmath>

#include "wkpi/error.hpp"
#include "wkpi/parallel.hpp"

namespace wkpi {
namespace {

void check_pair(const PersistenceImage& a, const PersistenceImage& b) {
  if (!(a.layout == b.layout) || a.pixels.size() != b.pixels.size()) {
    throw InvalidArgument("kernel: images are on different grids");
  }
}

std::vector<double> omega_for(const PersistenceImage& a, const WkpiParams& p) {
  const auto centers = a.layout.pixel_centers();
  return weight_values(p.weight, centers);
}

}  // namespace

KernelVariant parse_kernel_variant(const std::string& name) {
  if (name == "wkpi") return KernelVariant::wkpi;
  if (name == "alt-wkpi" || name == "altwkpi" || name == "alt_wkpi") return KernelVariant::alt_wkpi;
  throw InvalidArgument("unknown kernel variant '" + name + "'");
}

std::string to_string(KernelVariant v) { return v == KernelVariant::wkpi ? "wkpi" : "alt-wkpi"; }

void WkpiParams::validate() const {
  if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma)) throw InvalidArgument("kernel sigma must be positive");
  weight.validate();
}

double kernel_from_weights(std::span<const double> a, std::span<const double> b, std::span<const double> omega,
                           double sigma, KernelVariant variant) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  double k = 0.0;
  if (variant == KernelVariant::wkpi) {
    for (std::size_t s = 0; s < a.size(); ++s) {
      const double d = a[s] - b[s];
      k += omega[s] * std::exp(-d * d * scale);
    }
  } else {
    for (std::size_t s = 0; s < a.size(); ++s) {
      const double d = a[s] - b[s];
      k += std::exp(-omega[s] * d * d * scale);
    }
  }
  return k;
}

double squared_distance_from_weights(std::span<const double> a, std::span<const double> b,
                                     std::span<const double> omega, double sigma, KernelVariant variant) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  double d2 = 0.0;
  if (variant == KernelVariant::wkpi) {
    for (std::size_t s = 0; s < a.size(); ++s) {
      const double d = a[s] - b[s];
      d2 += omega[s] * -std::expm1(-d * d * scale);
    }
  } else {
    for (std::size_t s = 0; s < a.size(); ++s) {
      const double d = a[s] - b[s];
      d2 += -std::expm1(-omega[s] * d * d * scale);
    }
  }
  return 2.0 * d2;
}

double wkpi_kernel(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p) {
  check_pair(a, b);
  const auto omega = omega_for(a, p);
  return kernel_from_weights(a.pixels, b.pixels, omega, p.kernel_sigma, KernelVariant::wkpi);
}

double alt_wkpi_kernel(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p) {
  check_pair(a, b);
  const auto omega = omega_for(a, p);
  return kernel_from_weights(a.pixels, b.pixels, omega, p.kernel_sigma, KernelVariant::alt_wkpi);
}

double kernel_value(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p) {
  return p.variant == KernelVariant::wkpi ? wkpi_kernel(a, b, p) : alt_wkpi_kernel(a, b, p);
}

double wkpi_distance(const PersistenceImage& a, const PersistenceImage& b, const WkpiParams& p) {
  const double kaa = kernel_value(a, a, p);
  const double kbb = kernel_value(b, b, p);
  const double kab = kernel_value(a, b, p);
  const double radicand = kaa + kbb - 2.0 * kab;
  if (radicand >= 0.0) return std::sqrt(radicand);
  const double scale = std::max({1.0, std::abs(kaa), std::abs(kbb)});
  if (radicand >= -1e-12 * scale) return 0.0;
  throw NumericalError("wkpi_distance: negative radicand " + std::to_string(radicand));
}

void check_same_layout(std::span<const PersistenceImage> images) {
  for (const auto& img : images) {
    if (!(img.layout == images.front().layout) || img.pixels.size() != images.front().pixels.size()) {
      throw InvalidArgument("images are on different grids");
    }
  }
}

Eigen::MatrixXd gram_matrix(std::span<const PersistenceImage> images, const WkpiParams& p, int threads) {
  p.validate();
  const std::size_t n = images.size();
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (n == 0) return k;
  check_same_layout(images);
  const auto omega = omega_for(images.front(), p);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel_from_weights(images[i].pixels, images[j].pixels, omega, p.kernel_sigma, p.variant);
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return k;
}

Eigen::MatrixXd cross_gram_matrix(std::span<const PersistenceImage> rows, std::span<const PersistenceImage> cols,
                                  const WkpiParams& p, int threads) {
  p.validate();
  Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (rows.empty() || cols.empty()) return k;
  check_same_layout(rows);
  check_same_layout(cols);
  check_pair(rows.front(), cols.front());
  const auto omega = omega_for(rows.front(), p);
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          kernel_from_weights(rows[i].pixels, cols[j].pixels, omega, p.kernel_sigma, p.variant);
    }
  });
  return k;
}

}  // namespace wkpi
