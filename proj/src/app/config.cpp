#include "app/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wkpi/error.hpp"
#include "wkpi/text_io.hpp"

namespace wkpi::app {
namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument("expected a boolean, got '" + v + "'");
}

int parse_int(const std::string& v) { return static_cast<int>(parse_integer(v)); }

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, F parse) {
  std::vector<T> out;
  for (auto token : split(v, ',')) {
    const auto t = trim(token);
    if (!t.empty()) out.push_back(parse(std::string(t)));
  }
  if (out.empty()) throw InvalidArgument("expected a comma-separated list, got '" + v + "'");
  return out;
}

double to_double(const std::string& s) { return parse_double(s); }

SurfaceWeightKind parse_surface_weight(const std::string& v) {
  if (v == "constant" || v == "one") return SurfaceWeightKind::constant;
  if (v == "pl" || v == "piecewise-linear" || v == "piecewise_linear") return SurfaceWeightKind::piecewise_linear;
  throw InvalidArgument("unknown surface weight '" + v + "'");
}

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k{
      "dataset_dir",       "dataset_name",      "descriptor",     "dimensions",     "use_extended",
      "include_superlevel", "include_essential", "ricci_laziness",   "y_resolution",   "tau",            "surface_weight",
      "pl_b",              "padding",           "kernel_variant", "kernel_sigma",   "m",
      "init",              "minibatch_size",    "max_iterations", "cost_tolerance", "penalty",
      "initial_step",      "backtrack",         "sufficient_decrease", "max_backtracks", "validation_interval",
      "C",                 "svm_tolerance",     "holdout_folds",  "outer_folds",    "inner_folds",
      "repeats",           "m_grid",            "sigma_grid",     "C_grid",         "stratified",
      "output_dir",        "seed",              "threads",        "weight_file",    "heatmap_box"};
  return k;
}

void PipelineConfig::set_dimensions(const std::vector<int>& dims) {
  diagram.dimensions = dims;
  image.dimensions = dims;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const std::string v(trim(value));
  if (key == "dataset_dir") dataset_dir = v;
  else if (key == "dataset_name") dataset_name = v;
  else if (key == "descriptor") diagram.descriptor = parse_descriptor(v);
  else if (key == "dimensions") set_dimensions(parse_list<int>(v, parse_int));
  else if (key == "use_extended") diagram.use_extended = parse_bool(v);
  else if (key == "include_superlevel") diagram.include_superlevel = parse_bool(v);
  else if (key == "include_essential") diagram.include_essential = parse_bool(v);
  else if (key == "ricci_laziness") diagram.ricci.laziness = parse_double(v);
  else if (key == "y_resolution") image.y_resolution = parse_int(v);
  else if (key == "tau") image.tau = parse_double(v);
  else if (key == "surface_weight") image.surface_weight = parse_surface_weight(v);
  else if (key == "pl_b") image.pl_b = parse_double(v);
  else if (key == "padding") image.padding_fraction = parse_double(v);
  else if (key == "kernel_variant") kernel_variant = parse_kernel_variant(v);
  else if (key == "kernel_sigma") kernel_sigma = parse_double(v);
  else if (key == "m") m = parse_int(v);
  else if (key == "init") init = parse_init_method(v);
  else if (key == "minibatch_size") train.minibatch_size = static_cast<std::size_t>(std::max(0, parse_int(v)));
  else if (key == "max_iterations") train.max_iterations = parse_int(v);
  else if (key == "cost_tolerance") train.cost_tolerance = parse_double(v);
  else if (key == "penalty") train.penalty_constant = parse_double(v);
  else if (key == "initial_step") train.line_search.initial_step = parse_double(v);
  else if (key == "backtrack") train.line_search.backtrack = parse_double(v);
  else if (key == "sufficient_decrease") train.line_search.sufficient_decrease = parse_double(v);
  else if (key == "max_backtracks") train.line_search.max_backtracks = parse_int(v);
  else if (key == "validation_interval") train.validation_interval = parse_int(v);
  else if (key == "C") C = parse_double(v);
  else if (key == "svm_tolerance") svm_tolerance = parse_double(v);
  else if (key == "holdout_folds") holdout_folds = parse_int(v);
  else if (key == "outer_folds") cv.outer_folds = parse_int(v);
  else if (key == "inner_folds") cv.inner_folds = parse_int(v);
  else if (key == "repeats") cv.repeats = parse_int(v);
  else if (key == "m_grid") cv.m_grid = parse_list<int>(v, parse_int);
  else if (key == "sigma_grid") cv.sigma_grid = parse_list<double>(v, to_double);
  else if (key == "C_grid") cv.C_grid = parse_list<double>(v, to_double);
  else if (key == "stratified") cv.stratified = parse_bool(v);
  else if (key == "output_dir") output_dir = v;
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_integer(v));
  else if (key == "threads") threads = parse_int(v);
  else if (key == "weight_file") weight_file = v;
  else if (key == "heatmap_box") {
    const auto b = parse_list<double>(v, to_double);
    if (b.size() != 4) throw InvalidArgument("heatmap_box needs x_min,x_max,y_min,y_max");
    heatmap_box = std::array<double, 4>{b[0], b[1], b[2], b[3]};
  } else {
    throw InvalidArgument("unknown configuration key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  diagram.validate();
  image.validate();
  if (!(kernel_sigma > 0.0)) throw InvalidArgument("kernel_sigma must be positive");
  if (m < 1) throw InvalidArgument("m must be positive");
  train.validate();
  if (!(C > 0.0)) throw InvalidArgument("C must be positive");
  if (!(svm_tolerance > 0.0)) throw InvalidArgument("svm_tolerance must be positive");
  if (holdout_folds < 2) throw InvalidArgument("holdout_folds must be at least 2");
  cv.validate();
  if (threads < 1) throw InvalidArgument("threads must be positive");
  if (heatmap_box && !((*heatmap_box)[1] > (*heatmap_box)[0] && (*heatmap_box)[3] > (*heatmap_box)[2])) {
    throw InvalidArgument("heatmap_box must have x_max > x_min and y_max > y_min");
  }
}

void apply_config_text(PipelineConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key(trim(t.substr(0, eq)));
    try {
      cfg.set(key, std::string(t.substr(eq + 1)));
    } catch (const Error& e) {
      throw FormatError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  PipelineConfig cfg;
  apply_config_text(cfg, buf.str(), path.string());
  return cfg;
}

}  // namespace wkpi::app
