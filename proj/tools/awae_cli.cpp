// Command line front end: generate streams, run experiment grids, render
// reports. Exit codes: 0 ok, 1 runtime failure, 2 usage/config error,
// 3 empty input.
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "awae/errors.hpp"
#include "awae/experiment.hpp"
#include "awae/stream.hpp"

namespace {

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path p(out);
  const char* root = std::getenv("AWAE_OUTPUT_ROOT");
  if (p.is_relative() && root != nullptr && *root != '\0')
    return std::filesystem::path(root) / p;
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"awae: chunked stream classification experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool force = false;
  int workers = 0;
  std::int64_t seed_override = -1;

  auto* generate = app.add_subcommand(
      "generate", "Materialize a stream config as a CSV file");
  generate->add_option("--config", config_path, "stream config (json)")
      ->required();
  generate->add_option("--out", out_path, "output csv path")->required();
  generate
      ->add_option("--seed-override", seed_override,
                   "replace the configured stream seed");

  auto* run = app.add_subcommand("run", "Execute an experiment grid");
  run->add_option("--config", config_path, "experiment config (json)")
      ->required();
  run->add_option("--out", out_path, "override the configured output dir");
  run->add_flag("--force", force, "recompute runs with existing shards");
  run->add_option("--workers", workers, "parallel runs (default: config)");

  auto* report = app.add_subcommand(
      "report", "Summarize a results.csv into tables and curves");
  std::string results_path;
  bool per_chunk = false;
  report->add_option("--results", results_path, "results.csv path")
      ->required();
  report->add_option("--out", out_path, "report output dir")->required();
  report->add_flag("--per-chunk", per_chunk,
                   "pair t-tests per chunk instead of per seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) {
      auto spec = awae::load_stream_spec(config_path);
      std::uint64_t seed = spec.synthetic.seed;
      if (seed_override >= 0) seed = static_cast<std::uint64_t>(seed_override);
      const auto stream = awae::build_stream(spec, seed);
      if (stream.empty()) {
        std::cerr << "generate: stream is empty\n";
        return 3;
      }
      awae::write_csv_stream(stream, resolve_out(out_path));
      std::cout << "wrote " << stream.size() << " chunks to " << out_path
                << "\n";
      return 0;
    }
    if (*run) {
      auto config = awae::load_experiment_config(config_path);
      if (!out_path.empty()) config.output_dir = resolve_out(out_path);
      if (workers > 0) config.workers = workers;
      const int failures = awae::run_experiment(config, force);
      std::cout << "results: " << (config.output_dir / "results.csv").string()
                << "\n";
      if (failures > 0) {
        std::cerr << failures << " run(s) failed; see *.failed files under "
                  << (config.output_dir / "runs").string() << "\n";
        return 1;
      }
      return 0;
    }
    if (*report) {
      awae::ReportOptions options;
      options.per_chunk_pairing = per_chunk;
      const int rc =
          awae::write_report(results_path, resolve_out(out_path), options);
      if (rc == 3) {
        std::cerr << "report: no result rows in " << results_path << "\n";
        return 3;
      }
      std::cout << "report written to " << out_path << "\n";
      return 0;
    }
  } catch (const awae::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
