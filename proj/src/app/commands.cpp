#include "app/commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <sstream>
#include <tuple>
#include <ostream>
#include <string>
#include <vector>

#include "wkpi/cost.hpp"
#include "wkpi/error.hpp"
#include "wkpi/mixture.hpp"
#include "wkpi/random.hpp"
#include "wkpi/svm.hpp"
#include "wkpi/text_io.hpp"
#include "wkpi/tu_format.hpp"

namespace wkpi::app {
namespace fs = std::filesystem;
namespace {

struct Prepared {
  Dataset data;
  std::vector<PersistenceDiagram> diagrams;
};

Prepared load(const PipelineConfig& cfg) {
  if (cfg.dataset_dir.empty() || cfg.dataset_name.empty()) {
    throw InvalidArgument("dataset_dir and dataset_name must be set");
  }
  Prepared p;
  p.data = load_tu_dataset(cfg.dataset_dir, cfg.dataset_name);
  p.diagrams = graph_diagrams(p.data.graphs, cfg.diagram, cfg.threads);
  return p;
}

fs::path output(const PipelineConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir / name;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  write_file_atomically(path, writer);
}

std::string padded(std::size_t i, std::size_t count) {
  std::string s = std::to_string(i);
  const std::size_t width = std::to_string(count == 0 ? 0 : count - 1).size();
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

void write_heatmap_files(const fs::path& dir, const std::string& stem, const GridSpec& grid,
                         const GaussianMixtureWeight& w) {
  const auto values = sample_weight(w, grid);
  write_text(dir / (stem + ".csv"), [&](std::ostream& o) { write_heatmap_csv(o, grid, values); });
  std::ostringstream sidecar;
  write_file_atomically(
      dir / (stem + ".pgm"), [&](std::ostream& o) { write_heatmap_pgm(o, sidecar, grid, values); }, true);
  write_text(dir / (stem + ".scale.txt"), [&](std::ostream& o) { o << sidecar.str(); });
}

GaussianMixtureWeight initial_weight(const PipelineConfig& cfg, std::span<const PersistenceDiagram> diagrams,
                                     const ImageGrids& grids) {
  const auto points = transformed_points(diagrams, grids.dimensions);
  return initialize_weight(cfg.init, points, static_cast<std::size_t>(cfg.m), derive_seed(cfg.seed, "init"),
                           grids.layout().max_pixel_size());
}

TrainResult train(const PipelineConfig& cfg, std::span<const PersistenceImage> images, std::span<const int> labels,
                  int class_count, const GaussianMixtureWeight& init) {
  TrainConfig tc = cfg.train;
  tc.rng_seed = derive_seed(cfg.seed, "minibatch");
  tc.threads = cfg.threads;
  WkpiParams p;
  p.kernel_sigma = cfg.kernel_sigma;
  p.variant = cfg.kernel_variant;
  p.weight = init;
  return train_metric(images, labels, class_count, init, tc, p);
}

void write_matrix_csv(std::ostream& o, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) o << ',';
      o << format_double(m(i, j));
    }
    o << '\n';
  }
}

}  // namespace

int cmd_diagram(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  const fs::path dir = output(cfg, "diagrams");
  fs::create_directories(dir);
  const std::size_t n = p.diagrams.size();
  std::vector<std::string> files(n);
  for (std::size_t i = 0; i < n; ++i) {
    files[i] = "graph_" + padded(i, n) + ".csv";
    write_diagram_csv(dir / files[i], p.diagrams[i]);
  }
  write_text(dir / "index.csv", [&](std::ostream& o) {
    o << "graph,label,file,points,dim0,dim1\n";
    for (std::size_t i = 0; i < n; ++i) {
      o << i << ',' << p.data.raw_labels[static_cast<std::size_t>(p.data.labels[i])] << ',' << files[i] << ','
        << p.diagrams[i].size() << ',' << p.diagrams[i].count(0) << ',' << p.diagrams[i].count(1) << '\n';
    }
  });
  log << "wrote " << n << " diagrams to " << dir.string() << '\n';
  return 0;
}

int cmd_image(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  const auto grids = fit_image_grids(p.diagrams, cfg.image);
  const auto images = make_images(p.diagrams, grids, cfg.image, cfg.threads);
  write_text(output(cfg, "images.csv"), [&](std::ostream& o) { write_images_csv(o, images); });
  const auto layout = grids.layout();
  for (std::size_t k = 0; k < grids.grids.size(); ++k) {
    const auto& block = layout.blocks[k];
    std::vector<std::vector<double>> pixels;
    for (const auto& img : images) {
      const auto first = img.pixels.begin() + static_cast<std::ptrdiff_t>(block.offset);
      pixels.emplace_back(first, first + static_cast<std::ptrdiff_t>(block.grid.size()));
    }
    write_file_atomically(
        output(cfg, "images_dim" + std::to_string(grids.dimensions[k]) + ".bin"),
        [&](std::ostream& o) { write_images_binary(o, block.grid, pixels); }, true);
  }
  write_text(output(cfg, "grid.txt"), [&](std::ostream& o) {
    o << "dim x_min x_max y_min y_max x_resolution y_resolution pixel_size tau\n";
    for (std::size_t k = 0; k < grids.grids.size(); ++k) {
      const auto& g = grids.grids[k];
      o << grids.dimensions[k] << ' ' << format_double(g.x_min) << ' ' << format_double(g.x_max) << ' '
        << format_double(g.y_min) << ' ' << format_double(g.y_max) << ' ' << g.x_resolution << ' ' << g.y_resolution
        << ' ' << format_double(g.pixel_size) << ' ' << format_double(grids.taus[k]) << '\n';
    }
  });
  log << "wrote " << images.size() << " images of " << grids.layout().size() << " pixels\n";
  return 0;
}

int cmd_train_metric(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  const auto grids = fit_image_grids(p.diagrams, cfg.image);
  const auto images = make_images(p.diagrams, grids, cfg.image, cfg.threads);
  const auto init = initial_weight(cfg, p.diagrams, grids);
  const auto result = train(cfg, images, p.data.labels, p.data.class_count, init);
  write_weight(output(cfg, "weight.txt"), result.weight);
  write_text(output(cfg, "trace.csv"), [&](std::ostream& o) { write_trace_csv(o, result.trace); });
  for (std::size_t k = 0; k < grids.grids.size(); ++k) {
    write_heatmap_files(cfg.output_dir, "heatmap_dim" + std::to_string(grids.dimensions[k]), grids.grids[k],
                        result.weight);
  }
  log << "iterations: " << result.iterations << " (" << result.stop_reason << ")\n";
  log << "initial total cost: " << format_double(result.trace.front().total_cost) << '\n';
  log << "final total cost: " << format_double(result.total_cost) << '\n';
  return 0;
}

int cmd_gram(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  const auto grids = fit_image_grids(p.diagrams, cfg.image);
  const auto images = make_images(p.diagrams, grids, cfg.image, cfg.threads);
  WkpiParams params;
  params.kernel_sigma = cfg.kernel_sigma;
  params.variant = cfg.kernel_variant;
  if (!cfg.weight_file.empty()) {
    params.weight = read_weight(cfg.weight_file);
  } else {
    params.weight = train(cfg, images, p.data.labels, p.data.class_count, initial_weight(cfg, p.diagrams, grids)).weight;
    write_weight(output(cfg, "weight.txt"), params.weight);
  }
  const auto gram = gram_matrix(images, params, cfg.threads);
  write_text(output(cfg, "gram.csv"), [&](std::ostream& o) { write_matrix_csv(o, gram); });
  log << "wrote " << gram.rows() << " x " << gram.cols() << " gram matrix\n";
  return 0;
}

int cmd_classify(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  const auto fold = make_folds(p.data.labels, cfg.holdout_folds, cfg.cv.stratified, derive_seed(cfg.seed, "holdout"));
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == 0 ? test_idx : train_idx).push_back(i);
  std::vector<PersistenceDiagram> train_d, test_d;
  std::vector<int> train_y, test_y;
  for (std::size_t i : train_idx) {
    train_d.push_back(p.diagrams[i]);
    train_y.push_back(p.data.labels[i]);
  }
  for (std::size_t i : test_idx) {
    test_d.push_back(p.diagrams[i]);
    test_y.push_back(p.data.labels[i]);
  }
  const auto grids = fit_image_grids(train_d, cfg.image);
  const auto train_images = make_images(train_d, grids, cfg.image, cfg.threads);
  const auto test_images = make_images(test_d, grids, cfg.image, cfg.threads);
  WkpiParams params;
  params.kernel_sigma = cfg.kernel_sigma;
  params.variant = cfg.kernel_variant;
  params.weight = train(cfg, train_images, train_y, p.data.class_count, initial_weight(cfg, train_d, grids)).weight;
  const auto gram = gram_matrix(train_images, params, cfg.threads);
  const auto rows = cross_gram_matrix(test_images, train_images, params, cfg.threads);
  const auto model = one_vs_rest(gram, train_y, p.data.class_count, cfg.C, cfg.svm_tolerance);
  std::size_t correct = 0;
  std::vector<int> predicted(test_idx.size());
  std::vector<double> row(train_idx.size());
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    predicted[i] = predict_class(model, row);
    if (predicted[i] == test_y[i]) ++correct;
  }
  const double accuracy = test_idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_idx.size());
  write_weight(output(cfg, "weight.txt"), params.weight);
  write_text(output(cfg, "predictions.csv"), [&](std::ostream& o) {
    o << "graph,label,predicted\n";
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      o << test_idx[i] << ',' << p.data.raw_labels[static_cast<std::size_t>(test_y[i])] << ','
        << p.data.raw_labels[static_cast<std::size_t>(predicted[i])] << '\n';
    }
  });
  write_text(output(cfg, "accuracy.txt"), [&](std::ostream& o) { o << format_double(accuracy) << '\n'; });
  log << "held-out accuracy: " << format_double(accuracy) << " (" << correct << "/" << test_idx.size() << ")\n";
  return 0;
}

int cmd_cv(const PipelineConfig& cfg, std::ostream& log) {
  const auto p = load(cfg);
  MetricOptions metric;
  metric.init = cfg.init;
  metric.train = cfg.train;
  metric.variant = cfg.kernel_variant;
  metric.svm_tolerance = cfg.svm_tolerance;
  // parallelism is spent on independent folds, not inside a fold
  metric.threads = 1;
  const WkpiFoldEvaluator evaluator(p.diagrams, p.data.labels, p.data.class_count, cfg.image, metric);
  CvConfig cv = cfg.cv;
  cv.seed = cfg.seed;
  cv.threads = cfg.threads;
  const auto report = nested_cv(p.data.labels, cv, evaluator);
  write_text(output(cfg, "cv_report.csv"), [&](std::ostream& o) { write_cv_csv(o, report); });
  write_text(output(cfg, "cv_summary.txt"), [&](std::ostream& o) { write_cv_summary(o, report, cv); });
  write_cv_summary(log, report, cv);
  return 0;
}

int cmd_heatmap(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.weight_file.empty()) throw InvalidArgument("heatmap needs weight_file (--weight)");
  const auto w = read_weight(cfg.weight_file);
  if (cfg.heatmap_box) {
    const auto& b = *cfg.heatmap_box;
    const auto grid = GridSpec::from_bounds(b[0], b[1], b[2], b[3], cfg.image.y_resolution);
    fs::create_directories(cfg.output_dir);
    write_heatmap_files(cfg.output_dir, "heatmap", grid, w);
    log << "wrote " << grid.x_resolution << " x " << grid.y_resolution << " heatmap\n";
    return 0;
  }
  const auto p = load(cfg);
  const auto grids = fit_image_grids(p.diagrams, cfg.image);
  fs::create_directories(cfg.output_dir);
  for (std::size_t k = 0; k < grids.grids.size(); ++k) {
    write_heatmap_files(cfg.output_dir, "heatmap_dim" + std::to_string(grids.dimensions[k]), grids.grids[k], w);
  }
  log << "wrote " << grids.grids.size() << " heatmaps\n";
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned persistence-image kernels for graph classification"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::vector<std::string> sets;
    std::string seed, threads, out, dimensions, descriptor, weight, dataset_dir, dataset_name;
    bool use_extended = false;
  } flags;

  using Runner = int (*)(const PipelineConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Runner>> commands{
      {"diagram", "Persistence diagram CSV per graph", cmd_diagram},
      {"image", "Persistence images on a fitted grid", cmd_image},
      {"train-metric", "Learn the weight function", cmd_train_metric},
      {"gram", "WKPI Gram matrix", cmd_gram},
      {"classify", "Train on a stratified split and score the held-out fold", cmd_classify},
      {"cv", "Nested cross-validation", cmd_cv},
      {"heatmap", "Sample a weight function on a grid", cmd_heatmap}};

  Runner chosen = nullptr;
  for (const auto& [name, help, runner] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "key = value configuration file");
    sub->add_option("--set", flags.sets, "Override one key (key=value)");
    sub->add_option("--seed", flags.seed, "Root random seed");
    sub->add_option("--threads", flags.threads, "Worker threads");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--dimensions", flags.dimensions, "Homology dimensions, e.g. 0,1");
    sub->add_flag("--use-extended", flags.use_extended, "Use extended persistence");
    sub->add_option("--descriptor", flags.descriptor, "degree, ricci or jaccard");
    sub->add_option("--weight", flags.weight, "Weight file");
    sub->add_option("--dataset-dir", flags.dataset_dir, "Directory of the TU dataset");
    sub->add_option("--dataset-name", flags.dataset_name, "Name prefix of the TU dataset files");
    sub->callback([&chosen, r = runner] { chosen = r; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    PipelineConfig cfg;
    if (!flags.config.empty()) cfg = load_config(flags.config);
    for (const auto& s : flags.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + s + "'");
      cfg.set(std::string(trim(std::string_view(s).substr(0, eq))), s.substr(eq + 1));
    }
    if (!flags.seed.empty()) cfg.set("seed", flags.seed);
    if (!flags.threads.empty()) cfg.set("threads", flags.threads);
    if (!flags.out.empty()) cfg.set("output_dir", flags.out);
    if (!flags.dimensions.empty()) cfg.set("dimensions", flags.dimensions);
    if (flags.use_extended) cfg.set("use_extended", "true");
    if (!flags.descriptor.empty()) cfg.set("descriptor", flags.descriptor);
    if (!flags.weight.empty()) cfg.set("weight_file", flags.weight);
    if (!flags.dataset_dir.empty()) cfg.set("dataset_dir", flags.dataset_dir);
    if (!flags.dataset_name.empty()) cfg.set("dataset_name", flags.dataset_name);
    cfg.validate();
    return chosen(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wkpi::app
