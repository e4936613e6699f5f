#include "wkpi/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkpi/error.hpp"
#include "wkpi/random.hpp"

namespace wkpi {
namespace {

double sq_dist(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::size_t distinct_count(std::span<const Point2> points) {
  std::vector<std::pair<double, double>> v;
  v.reserve(points.size());
  for (const auto& p : points) v.emplace_back(p.x, p.y);
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

void require_points(std::span<const Point2> points, std::size_t m) {
  if (points.empty()) throw InvalidArgument("initialization needs at least one point");
  if (m == 0) throw InvalidArgument("the mixture needs at least one component");
}

std::vector<Point2> plus_plus_seeds(std::span<const Point2> points, std::size_t k, Rng& rng) {
  std::vector<Point2> centers;
  centers.push_back(points[uniform_index(rng, points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = sq_dist(points[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform_unit(rng) * total;
      double acc = 0.0;
      pick = points.size();
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == points.size()) {
        // rounding pushed the target past the end; take the last candidate
        for (std::size_t i = points.size(); i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], sq_dist(points[i], points[pick]));
  }
  return centers;
}

std::size_t nearest(Point2 p, const std::vector<Point2>& centers) {
  std::size_t best = 0;
  double best_d = sq_dist(p, centers[0]);
  for (std::size_t c = 1; c < centers.size(); ++c) {
    const double d = sq_dist(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult lloyd_once(std::span<const Point2> points, std::vector<Point2> centers, int max_iterations) {
  const std::size_t k = centers.size();
  KMeansResult r;
  r.assignment.assign(points.size(), k);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t c = nearest(points[i], centers);
      if (c != r.assignment[i]) {
        r.assignment[i] = c;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    std::vector<double> sx(k, 0.0), sy(k, 0.0), cnt(k, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sx[r.assignment[i]] += points[i].x;
      sy[r.assignment[i]] += points[i].y;
      cnt[r.assignment[i]] += 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (cnt[c] > 0.0) {
        centers[c] = {sx[c] / cnt[c], sy[c] / cnt[c]};
        continue;
      }
      // empty cluster: move it to the point farthest from its own center
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = sq_dist(points[i], centers[r.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[c] = points[far];
      r.assignment[far] = c;
    }
  }
  r.centers = std::move(centers);
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.assignment[i] = nearest(points[i], r.centers);
    r.inertia += sq_dist(points[i], r.centers[r.assignment[i]]);
  }
  return r;
}

void fill_surplus(GaussianMixtureWeight& w, std::size_t m) {
  const std::size_t base = w.size();
  for (std::size_t r = base; r < m; ++r) w.components.push_back(w.components[r % base]);
}

}  // namespace

double BoundingBox::diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }

BoundingBox BoundingBox::of(std::span<const Point2> points) {
  if (points.empty()) throw InvalidArgument("bounding box of an empty point set");
  BoundingBox b{points[0].x, points[0].x, points[0].y, points[0].y};
  for (const auto& p : points) {
    b.x_min = std::min(b.x_min, p.x);
    b.x_max = std::max(b.x_max, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.y_max = std::max(b.y_max, p.y);
  }
  return b;
}

InitMethod parse_init_method(const std::string& name) {
  if (name == "random") return InitMethod::random;
  if (name == "kmeans" || name == "k-means") return InitMethod::kmeans;
  if (name == "kcenter" || name == "k-center") return InitMethod::kcenter;
  throw InvalidArgument("unknown initialization '" + name + "'");
}

std::string to_string(InitMethod m) {
  switch (m) {
    case InitMethod::random: return "random";
    case InitMethod::kmeans: return "kmeans";
    case InitMethod::kcenter: return "kcenter";
  }
  return "random";
}

GaussianMixtureWeight init_random(const BoundingBox& box, std::size_t m, std::uint64_t seed, double min_spread) {
  if (m == 0) throw InvalidArgument("the mixture needs at least one component");
  Rng rng = make_rng(seed, "init-random");
  double spread = box.diagonal() / static_cast<double>(m);
  if (!(spread > 0.0)) spread = min_spread > 0.0 ? min_spread : 1.0;
  spread = std::max(spread, min_spread);
  GaussianMixtureWeight w;
  for (std::size_t r = 0; r < m; ++r) {
    const double x = box.x_min + uniform_unit(rng) * (box.x_max - box.x_min);
    const double y = box.y_min + uniform_unit(rng) * (box.y_max - box.y_min);
    w.components.push_back({x, y, spread, 1.0});
  }
  return w;
}

KMeansResult lloyd_kmeans(std::span<const Point2> points, std::size_t k, std::uint64_t seed, int n_init,
                          int max_iterations) {
  require_points(points, k);
  if (k > distinct_count(points)) throw InvalidArgument("more clusters than distinct points");
  Rng rng = make_rng(seed, "kmeans");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int run = 0; run < std::max(n_init, 1); ++run) {
    auto r = lloyd_once(points, plus_plus_seeds(points, k, rng), max_iterations);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

GaussianMixtureWeight init_kmeans(std::span<const Point2> points, std::size_t m, std::uint64_t seed,
                                  double min_spread, int n_init) {
  require_points(points, m);
  const std::size_t k = std::min(m, distinct_count(points));
  const auto km = lloyd_kmeans(points, k, seed, n_init);
  std::vector<double> ss(k, 0.0), cnt(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ss[km.assignment[i]] += sq_dist(points[i], km.centers[km.assignment[i]]);
    cnt[km.assignment[i]] += 1.0;
  }
  GaussianMixtureWeight w;
  for (std::size_t c = 0; c < k; ++c) {
    const double rms = cnt[c] > 0.0 ? std::sqrt(ss[c] / cnt[c]) : 0.0;
    double spread = std::max(rms, min_spread);
    if (!(spread > 0.0)) spread = 1.0;
    w.components.push_back({km.centers[c].x, km.centers[c].y, spread, 1.0});
  }
  fill_surplus(w, m);
  return w;
}

GaussianMixtureWeight init_kcenter_from(std::span<const Point2> points, std::size_t m, std::size_t first,
                                        double min_spread) {
  require_points(points, m);
  if (first >= points.size()) throw InvalidArgument("k-center start index out of range");
  std::vector<Point2> centers{points[first]};
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = sq_dist(points[i], points[first]);
  while (centers.size() < m) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (d2[i] > d2[far]) far = i;
    }
    if (!(d2[far] > 0.0)) break;
    centers.push_back(points[far]);
    for (std::size_t i = 0; i < points.size(); ++i) d2[i] = std::min(d2[i], sq_dist(points[i], points[far]));
  }
  GaussianMixtureWeight w;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    double nearest_other = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < centers.size(); ++o) {
      if (o != c) nearest_other = std::min(nearest_other, std::sqrt(sq_dist(centers[c], centers[o])));
    }
    if (!std::isfinite(nearest_other)) nearest_other = BoundingBox::of(points).diagonal();
    double spread = std::max(nearest_other, min_spread);
    if (!(spread > 0.0)) spread = 1.0;
    w.components.push_back({centers[c].x, centers[c].y, spread, 1.0});
  }
  fill_surplus(w, m);
  return w;
}

GaussianMixtureWeight init_kcenter(std::span<const Point2> points, std::size_t m, std::uint64_t seed,
                                   double min_spread) {
  require_points(points, m);
  Rng rng = make_rng(seed, "kcenter");
  return init_kcenter_from(points, m, uniform_index(rng, points.size()), min_spread);
}

GaussianMixtureWeight initialize_weight(InitMethod method, std::span<const Point2> points, std::size_t m,
                                        std::uint64_t seed, double min_spread) {
  switch (method) {
    case InitMethod::random: return init_random(BoundingBox::of(points), m, seed, min_spread);
    case InitMethod::kmeans: return init_kmeans(points, m, seed, min_spread);
    case InitMethod::kcenter: return init_kcenter(points, m, seed, min_spread);
  }
  throw InvalidArgument("unknown initialization");
}

}  // namespace wkpi
