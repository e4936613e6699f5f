#include "wkpi/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "wkpi/descriptors.hpp"
#include "wkpi/error.hpp"
#include "wkpi/parallel.hpp"
#include "wkpi/random.hpp"
#include "wkpi/svm.hpp"

namespace wkpi {
namespace {

std::vector<int> sorted_dimensions(std::vector<int> dims) {
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  return dims;
}

void check_dimensions(const std::vector<int>& dims) {
  if (dims.empty()) throw InvalidArgument("at least one homology dimension is required");
  for (int d : dims) {
    if (d != 0 && d != 1) throw InvalidArgument("homology dimension must be 0 or 1, got " + std::to_string(d));
  }
}

template <typename T>
std::vector<T> gather(std::span<const T> all, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

DescriptorType parse_descriptor(const std::string& name) {
  if (name == "degree") return DescriptorType::degree;
  if (name == "ricci") return DescriptorType::ricci;
  if (name == "jaccard") return DescriptorType::jaccard;
  throw InvalidArgument("unknown descriptor '" + name + "'");
}

std::string to_string(DescriptorType d) {
  switch (d) {
    case DescriptorType::degree: return "degree";
    case DescriptorType::ricci: return "ricci";
    case DescriptorType::jaccard: return "jaccard";
  }
  return "degree";
}

void DiagramOptions::validate() const {
  check_dimensions(dimensions);
  if (!use_extended && std::find(dimensions.begin(), dimensions.end(), 1) != dimensions.end()) {
    throw InvalidArgument("dimension 1 needs extended persistence");
  }
}

DescriptorValues compute_descriptor(const Graph& g, DescriptorType type, const RicciConfig& ricci) {
  switch (type) {
    case DescriptorType::degree: return degree_function(g);
    case DescriptorType::ricci: return ricci_curvature(g, ricci);
    case DescriptorType::jaccard: return jaccard_index(g);
  }
  throw InvalidArgument("unknown descriptor");
}

PersistenceDiagram graph_diagram(const Graph& g, const DiagramOptions& options) {
  options.validate();
  PersistenceDiagram out;
  if (g.node_count() == 0) return out;
  const auto f = compute_descriptor(g, options.descriptor, options.ricci);
  if (f.kind == DescriptorKind::edge && g.edge_count() == 0) return out;
  PersistenceDiagram full;
  if (options.use_extended) {
    full = compute_extended_persistence(g, f).diagram();
  } else {
    full = compute_0dim_sublevel(build_sublevel_filtration(g, extend_to_simplices(g, f)));
    if (options.include_superlevel) full = merge_diagrams(full, compute_0dim_superlevel(g, f));
  }
  if (!options.include_essential) full = drop_essential(full);
  for (const auto& p : full.points) {
    if (std::find(options.dimensions.begin(), options.dimensions.end(), p.dimension) != options.dimensions.end()) {
      out.points.push_back(p);
    }
  }
  out.sort();
  return out;
}

std::vector<PersistenceDiagram> graph_diagrams(std::span<const Graph> graphs, const DiagramOptions& options,
                                               int threads) {
  options.validate();
  std::vector<PersistenceDiagram> out(graphs.size());
  parallel_for(graphs.size(), threads, [&](std::size_t i) { out[i] = graph_diagram(graphs[i], options); });
  return out;
}

void ImageOptions::validate() const {
  check_dimensions(dimensions);
  if (y_resolution < 1) throw InvalidArgument("y_resolution must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be non-negative (0 means one pixel)");
  if (surface_weight == SurfaceWeightKind::piecewise_linear && !(pl_b > 0.0)) {
    throw InvalidArgument("piecewise-linear weight needs b > 0");
  }
  if (!(padding_fraction >= 0.0)) throw InvalidArgument("padding fraction must be non-negative");
}

ImageLayout ImageGrids::layout() const {
  ImageLayout layout;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    layout.blocks.push_back({dimensions[k], grids[k], offset});
    offset += grids[k].size();
  }
  return layout;
}

ImageGrids fit_image_grids(std::span<const PersistenceDiagram> diagrams, const ImageOptions& options) {
  options.validate();
  ImageGrids out;
  for (int dim : sorted_dimensions(options.dimensions)) {
    std::vector<PersistenceDiagram> part;
    std::size_t points = 0;
    for (const auto& d : diagrams) {
      part.push_back(d.of_dimension(dim));
      points += part.back().size();
    }
    if (points == 0) continue;
    GridFitOptions fit;
    fit.padding_fraction = options.padding_fraction;
    if (options.tau > 0.0) fit.tau = options.tau;
    const GridSpec grid = fit_grid(part, options.y_resolution, fit);
    out.dimensions.push_back(dim);
    out.grids.push_back(grid);
    out.taus.push_back(options.tau > 0.0 ? options.tau : grid.pixel_size);
  }
  if (out.grids.empty()) throw InvalidArgument("no persistence points in the requested dimensions");
  return out;
}

PersistenceImage make_image(const PersistenceDiagram& d, const ImageGrids& grids, const ImageOptions& options) {
  std::vector<PersistenceImage> parts;
  for (std::size_t k = 0; k < grids.grids.size(); ++k) {
    PiConfig cfg;
    cfg.tau = grids.taus[k];
    if (options.surface_weight == SurfaceWeightKind::piecewise_linear) {
      cfg.surface_weight = piecewise_linear_surface_weight(options.pl_b);
    }
    parts.push_back(compute_persistence_image(d, grids.grids[k], cfg, grids.dimensions[k]));
  }
  return concatenate_images(std::move(parts));
}

std::vector<PersistenceImage> make_images(std::span<const PersistenceDiagram> diagrams, const ImageGrids& grids,
                                          const ImageOptions& options, int threads) {
  std::vector<PersistenceImage> out(diagrams.size());
  parallel_for(diagrams.size(), threads, [&](std::size_t i) { out[i] = make_image(diagrams[i], grids, options); });
  return out;
}

std::vector<Point2> transformed_points(std::span<const PersistenceDiagram> diagrams, std::span<const int> dimensions) {
  std::vector<Point2> out;
  for (const auto& d : diagrams) {
    for (const auto& p : d.points) {
      if (std::find(dimensions.begin(), dimensions.end(), p.dimension) != dimensions.end()) {
        out.push_back(birth_persistence_transform(p));
      }
    }
  }
  return out;
}

Eigen::MatrixXd gram_from_distances(const Eigen::MatrixXd& squared_distances, double self) {
  Eigen::MatrixXd k = -0.5 * squared_distances;
  k.array() += self;
  return k;
}

double self_kernel(const ImageLayout& layout, const WkpiParams& p) {
  if (p.variant == KernelVariant::alt_wkpi) return static_cast<double>(layout.size());
  double total = 0.0;
  for (double w : weight_values(p.weight, layout.pixel_centers())) total += w;
  return total;
}

double svm_accuracy(const Eigen::MatrixXd& train_gram, std::span<const int> train_labels,
                    const Eigen::MatrixXd& test_rows, std::span<const int> test_labels, int class_count, double C,
                    double tol) {
  if (test_labels.empty()) return 0.0;
  const auto model = one_vs_rest(train_gram, train_labels, class_count, C, tol);
  std::size_t correct = 0;
  std::vector<double> row(static_cast<std::size_t>(test_rows.cols()));
  for (Eigen::Index i = 0; i < test_rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < test_rows.cols(); ++j) row[static_cast<std::size_t>(j)] = test_rows(i, j);
    if (predict_class(model, row) == test_labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_labels.size());
}

WkpiFoldEvaluator::WkpiFoldEvaluator(std::vector<PersistenceDiagram> diagrams, std::vector<int> labels,
                                     int class_count, ImageOptions image, MetricOptions metric)
    : diagrams_(std::move(diagrams)),
      labels_(std::move(labels)),
      class_count_(class_count),
      image_(std::move(image)),
      metric_(std::move(metric)) {
  if (diagrams_.size() != labels_.size()) throw InvalidArgument("diagram and label counts differ");
  image_.validate();
  metric_.train.validate();
}

AccuracyGrid WkpiFoldEvaluator::operator()(std::span<const std::size_t> train, std::span<const std::size_t> test,
                                           std::span<const int> m_grid, std::span<const double> sigma_grid,
                                           std::span<const double> C_grid, std::uint64_t seed) const {
  const auto train_diagrams = gather<PersistenceDiagram>(diagrams_, train);
  const auto test_diagrams = gather<PersistenceDiagram>(diagrams_, test);
  const auto train_labels = gather<int>(labels_, train);
  const auto test_labels = gather<int>(labels_, test);

  const ImageGrids grids = fit_image_grids(train_diagrams, image_);
  const auto train_images = make_images(train_diagrams, grids, image_, metric_.threads);
  const auto test_images = make_images(test_diagrams, grids, image_, metric_.threads);
  const ImageLayout layout = grids.layout();
  const auto points = transformed_points(train_diagrams, grids.dimensions);
  const double min_spread = layout.max_pixel_size();

  AccuracyGrid acc(m_grid.size(),
                   std::vector<std::vector<double>>(sigma_grid.size(), std::vector<double>(C_grid.size(), 0.0)));
  auto options = metric_.train.cost_model;
  options.threads = metric_.threads;
  for (std::size_t b = 0; b < sigma_grid.size(); ++b) {
    const CostModel model(train_images, train_labels, class_count_, sigma_grid[b], metric_.variant, options);
    for (std::size_t a = 0; a < m_grid.size(); ++a) {
      const auto m = static_cast<std::size_t>(m_grid[a]);
      const auto init = initialize_weight(metric_.init, points, m, derive_seed(seed, "init", m), min_spread);
      TrainConfig tc = metric_.train;
      tc.rng_seed = derive_seed(seed, "train", m * 1000003u + b);
      tc.threads = metric_.threads;
      const auto trained = train_metric(model, init, tc, layout.max_diagonal());

      WkpiParams p;
      p.kernel_sigma = sigma_grid[b];
      p.weight = trained.weight;
      p.variant = metric_.variant;
      const double self = self_kernel(layout, p);
      const Eigen::MatrixXd train_gram = gram_from_distances(model.squared_distance_matrix(p.weight), self);
      const Eigen::MatrixXd test_rows = cross_gram_matrix(test_images, train_images, p, metric_.threads);
      for (std::size_t c = 0; c < C_grid.size(); ++c) {
        acc[a][b][c] =
            svm_accuracy(train_gram, train_labels, test_rows, test_labels, class_count_, C_grid[c], metric_.svm_tolerance);
      }
    }
  }
  return acc;
}

}  // namespace wkpi
