#pragma once

#include <iosfwd>

#include "app/config.hpp"

namespace wkpi::app {

int cmd_diagram(const PipelineConfig& cfg, std::ostream& log);
int cmd_image(const PipelineConfig& cfg, std::ostream& log);
int cmd_train_metric(const PipelineConfig& cfg, std::ostream& log);
int cmd_gram(const PipelineConfig& cfg, std::ostream& log);
int cmd_classify(const PipelineConfig& cfg, std::ostream& log);
int cmd_cv(const PipelineConfig& cfg, std::ostream& log);
int cmd_heatmap(const PipelineConfig& cfg, std::ostream& log);

/// Parses the command line and runs one command. Returns the process exit
/// code: 0 on success, 1 on any error (reported on `err`).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wkpi::app
