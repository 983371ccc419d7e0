#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "mfstab/config.hpp"
#include "mfstab/errors.hpp"
#include "mfstab/experiments.hpp"
#include "mfstab/plots.hpp"

namespace {

std::size_t workers_from_env() {
  const char* v = std::getenv("MFSTAB_WORKERS");
  if (!v || !*v) return 1;
  try {
    const long n = std::stol(v);
    return n > 0 ? static_cast<std::size_t>(n) : 1;
  } catch (const std::exception&) {
    throw mfstab::InvalidInput("MFSTAB_WORKERS must be a positive integer");
  }
}

int report(const std::string& kind, const std::string& message, int code, const std::string& out_dir) {
  nlohmann::ordered_json err = {{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << err.dump() << '\n';
  if (!out_dir.empty() && std::filesystem::is_directory(out_dir))
    std::ofstream(std::filesystem::path(out_dir) / "error.json") << err.dump(2) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability experiments for learning on graphs with dependent samples", "mfstab"};
  app.set_version_flag("--version", std::string(mfstab::kVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (default: config 'output' key or ./results)");

  std::string plot_dir, plot_kind;
  auto* plots = app.add_subcommand("plots", "Emit plot-data CSVs from a result directory");
  plots->add_option("dir", plot_dir, "result directory")->required();
  plots->add_option("kind", plot_kind, "scaling | envelope | tail | discrepancy | all")->required();

  std::string params_path;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the stability bounds for a params file");
  bounds->add_option("params", params_path, "params file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const auto cfg = mfstab::Config::load(config_path);
      if (out_dir.empty()) out_dir = cfg.has("output") ? cfg.resolve_path(cfg.require("output")) : "results";
      const auto res = mfstab::run_experiment(cfg, out_dir, workers_from_env());
      for (const auto& f : res.files) std::cout << (std::filesystem::path(out_dir) / f).string() << '\n';
    } else if (*plots) {
      for (const auto& f : mfstab::emit_plot_data(plot_dir, plot_kind))
        std::cout << (std::filesystem::path(plot_dir) / f).string() << '\n';
    } else if (*bounds) {
      std::ifstream in(params_path);
      if (!in) throw mfstab::InvalidInput("cannot open " + params_path);
      const auto cfg = mfstab::Config::parse_loose(in, params_path);
      const auto p = mfstab::bound_params_from_config(cfg);
      const auto r = mfstab::evaluate_bounds(p, cfg.get_double("bounds.delta", 0.1));
      std::cout << mfstab::bound_report_json(p, r) << '\n';
    }
  } catch (const mfstab::InvalidInput& e) {
    return report("invalid_input", e.what(), 1, out_dir);
  } catch (const mfstab::CapacityError& e) {
    return report("capacity", e.what(), 1, out_dir);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 2, out_dir);
  }
  return 0;
}
