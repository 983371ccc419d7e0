#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mfstab/bounds.hpp"
#include "mfstab/config.hpp"
#include "mfstab/graph.hpp"
#include "mfstab/objective.hpp"
#include "mfstab/sampler.hpp"
#include "mfstab/sgd.hpp"

namespace mfstab {

inline constexpr const char* kVersion = "0.1.0";

Graph graph_from_config(const Config& cfg);
std::unique_ptr<Sampler> sampler_from_config(const Config& cfg, const Graph& g);
IsingSpec ising_from_config(const Config& cfg, const Graph& g);
Objective objective_from_config(const Config& cfg, std::size_t dim);
SgdConfig sgd_from_config(const Config& cfg);
SgdBoundParams bound_params_from_config(const Config& cfg);
ReplaceMode replace_mode_from_config(const Config& cfg);

struct RunResult {
  std::string experiment;
  std::vector<std::string> files;  ///< written result files, relative to the output dir
};

/// Runs the experiment named by `experiment` and writes its result files
/// plus manifest.json into `out_dir`.
RunResult run_experiment(const Config& cfg, const std::string& out_dir, std::size_t workers = 1);

/// BoundReport as JSON text, with the inputs echoed.
std::string bound_report_json(const SgdBoundParams& p, const BoundReport& r);

}  // namespace mfstab
