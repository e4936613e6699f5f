#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wkpi/cross_validation.hpp"
#include "wkpi/pipeline.hpp"

namespace wkpi::app {

/// Flat `key = value` settings for every command. Blank lines and lines
/// starting with '#' are ignored; unknown keys are rejected.
struct PipelineConfig {
  std::filesystem::path dataset_dir;
  std::string dataset_name;

  DiagramOptions diagram;
  ImageOptions image;

  KernelVariant kernel_variant = KernelVariant::wkpi;
  double kernel_sigma = 1.0;
  int m = 5;
  InitMethod init = InitMethod::kmeans;
  TrainConfig train;

  double C = 1.0;
  double svm_tolerance = 1e-6;
  /// classify holds out one of this many stratified folds.
  int holdout_folds = 10;

  CvConfig cv;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  /// Weight file read by heatmap and gram (gram trains one when empty).
  std::filesystem::path weight_file;
  /// x_min, x_max, y_min, y_max of an explicit heatmap grid.
  std::optional<std::array<double, 4>> heatmap_box;

  void set(const std::string& key, const std::string& value);
  void set_dimensions(const std::vector<int>& dims);
  void validate() const;
  /// Every key understood by set().
  static const std::vector<std::string>& keys();
};

PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& source);

}  // namespace wkpi::app
