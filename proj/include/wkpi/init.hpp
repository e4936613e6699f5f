#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wkpi/mixture.hpp"

namespace wkpi {

struct BoundingBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double diagonal() const;
  /// Throws InvalidArgument for an empty point set.
  static BoundingBox of(std::span<const Point2> points);
};

enum class InitMethod { random, kmeans, kcenter };
InitMethod parse_init_method(const std::string& name);
std::string to_string(InitMethod m);

/// Centers uniform in the box, spreads diagonal / m (min_spread, or 1, when
/// the box is a single point), coefficients 1.
GaussianMixtureWeight init_random(const BoundingBox& box, std::size_t m, std::uint64_t seed, double min_spread = 0.0);

struct KMeansResult {
  std::vector<Point2> centers;
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeds, best of n_init restarts. k must not
/// exceed the number of distinct points.
KMeansResult lloyd_kmeans(std::span<const Point2> points, std::size_t k, std::uint64_t seed, int n_init = 10,
                          int max_iterations = 300);

/// Components at the k-means centers with spread max(cluster RMS radius,
/// min_spread). With fewer distinct points than m, the surplus components
/// repeat the existing ones in order.
GaussianMixtureWeight init_kmeans(std::span<const Point2> points, std::size_t m, std::uint64_t seed,
                                  double min_spread, int n_init = 10);

/// Greedy farthest-point centers starting at points[first]; ties go to the
/// lowest index. Spreads are the distance to the nearest other center, at
/// least min_spread.
GaussianMixtureWeight init_kcenter_from(std::span<const Point2> points, std::size_t m, std::size_t first,
                                        double min_spread);

/// init_kcenter_from with a first point drawn from the seed.
GaussianMixtureWeight init_kcenter(std::span<const Point2> points, std::size_t m, std::uint64_t seed,
                                   double min_spread);

GaussianMixtureWeight initialize_weight(InitMethod method, std::span<const Point2> points, std::size_t m,
                                        std::uint64_t seed, double min_spread);

}  // namespace wkpi
