#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wkpi/cross_validation.hpp"
#include "wkpi/graph.hpp"
#include "wkpi/init.hpp"
#include "wkpi/kernel.hpp"
#include "wkpi/persistence.hpp"
#include "wkpi/pimage.hpp"
#include "wkpi/trainer.hpp"

namespace wkpi {

enum class DescriptorType { degree, ricci, jaccard };
DescriptorType parse_descriptor(const std::string& name);
std::string to_string(DescriptorType d);

struct DiagramOptions {
  DescriptorType descriptor = DescriptorType::ricci;
  std::vector<int> dimensions{0, 1};
  /// Extended persistence (dims 0 and 1); otherwise ordinary sublevel
  /// 0-dimensional persistence, which has no dimension-1 points.
  bool use_extended = true;
  /// Without extended persistence: also add the superlevel 0-dim diagram.
  bool include_superlevel = false;
  /// Keep essential points (capped sweep essentials, extended pairs).
  bool include_essential = true;
  RicciConfig ricci;

  void validate() const;
};

DescriptorValues compute_descriptor(const Graph& g, DescriptorType type, const RicciConfig& ricci = {});

/// Diagram of one graph restricted to options.dimensions. Graphs without
/// nodes, and edgeless graphs under an edge descriptor, give empty diagrams.
PersistenceDiagram graph_diagram(const Graph& g, const DiagramOptions& options);
std::vector<PersistenceDiagram> graph_diagrams(std::span<const Graph> graphs, const DiagramOptions& options,
                                               int threads = 1);

enum class SurfaceWeightKind { constant, piecewise_linear };

struct ImageOptions {
  std::vector<int> dimensions{0, 1};
  int y_resolution = 40;
  /// Gaussian spread; 0 uses one pixel width of each block's grid.
  double tau = 0.0;
  SurfaceWeightKind surface_weight = SurfaceWeightKind::constant;
  double pl_b = 1.0;
  double padding_fraction = 0.1;

  void validate() const;
};

/// One grid per dimension that has points in the fitting diagrams.
struct ImageGrids {
  std::vector<int> dimensions;
  std::vector<GridSpec> grids;
  std::vector<double> taus;

  ImageLayout layout() const;
};

ImageGrids fit_image_grids(std::span<const PersistenceDiagram> diagrams, const ImageOptions& options);
PersistenceImage make_image(const PersistenceDiagram& d, const ImageGrids& grids, const ImageOptions& options);
std::vector<PersistenceImage> make_images(std::span<const PersistenceDiagram> diagrams, const ImageGrids& grids,
                                          const ImageOptions& options, int threads = 1);

/// Birth-persistence points of the given dimensions.
std::vector<Point2> transformed_points(std::span<const PersistenceDiagram> diagrams, std::span<const int> dimensions);

struct MetricOptions {
  InitMethod init = InitMethod::kmeans;
  TrainConfig train;
  KernelVariant variant = KernelVariant::wkpi;
  double svm_tolerance = 1e-6;
  int threads = 1;
};

/// Kernel matrix of `images` from their squared distances:
/// k(a, b) = k(a, a) - D^2(a, b) / 2 with k(a, a) the same for every image.
Eigen::MatrixXd gram_from_distances(const Eigen::MatrixXd& squared_distances, double self_kernel);

/// Constant k(a, a) of the kernel on a layout.
double self_kernel(const ImageLayout& layout, const WkpiParams& p);

/// Fraction of `test` classified correctly by a one-vs-rest SVM trained on
/// `train_gram` with the given cross kernel rows.
double svm_accuracy(const Eigen::MatrixXd& train_gram, std::span<const int> train_labels,
                    const Eigen::MatrixXd& test_rows, std::span<const int> test_labels, int class_count, double C,
                    double tol);

/// Fold evaluator for nested_cv: fits grids on the training split, trains a
/// weight per (m, sigma) from the configured initialization, and scores a
/// one-vs-rest SVM for each C on the test split.
class WkpiFoldEvaluator {
 public:
  WkpiFoldEvaluator(std::vector<PersistenceDiagram> diagrams, std::vector<int> labels, int class_count,
                    ImageOptions image, MetricOptions metric);

  AccuracyGrid operator()(std::span<const std::size_t> train, std::span<const std::size_t> test,
                          std::span<const int> m_grid, std::span<const double> sigma_grid,
                          std::span<const double> C_grid, std::uint64_t seed) const;

 private:
  std::vector<PersistenceDiagram> diagrams_;
  std::vector<int> labels_;
  int class_count_;
  ImageOptions image_;
  MetricOptions metric_;
};

}  // namespace wkpi
