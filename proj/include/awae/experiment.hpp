#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "awae/bals.hpp"
#include "awae/eval.hpp"
#include "awae/methods.hpp"
#include "awae/stream.hpp"

namespace awae {

struct StreamSpec {
  enum class Kind { kSynthetic, kSemiSynthetic, kCsv };
  Kind kind = Kind::kSynthetic;
  StreamConfig synthetic;                    // synthetic + semisynthetic
  std::filesystem::path dataset_path;        // semisynthetic base dataset
  Interpolation interpolation = Interpolation::kNearest;
  std::filesystem::path csv_path;            // csv streams
  std::size_t csv_chunk_size = 250;

  // Column value describing the stream in results files.
  std::string drift_label() const;
};

struct ExperimentConfig {
  StreamSpec stream;
  std::vector<MethodFactoryArgs> methods;
  bool full_labeling = true;
  BalsConfig bals;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  bool record_timing = false;
  int workers = 1;
};

// JSON experiment/stream config files.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
StreamSpec load_stream_spec(const std::filesystem::path& path);

// Materializes the stream for one grid seed (synthetic generators re-seed,
// CSV streams are fixed).
std::vector<DataChunk> build_stream(const StreamSpec& spec,
                                    std::uint64_t seed);

struct RunResult {
  std::string run_id;
  std::string method;
  std::string learner;
  std::string drift_type;
  std::uint64_t seed = 0;
  std::vector<EvaluationRecord> records;
  bool failed = false;
  std::string error;
};

std::string run_id_for(const MethodFactoryArgs& method, std::uint64_t seed);

// Executes the method x seed grid, writing one shard CSV and one pool
// snapshot per run under <output_dir>/runs/, then merges the shards into
// results.csv in grid order. Existing shards are reused unless force is set,
// so an interrupted grid resumes where it stopped. Returns the number of
// failed runs.
int run_experiment(const ExperimentConfig& config, bool force);

struct ReportOptions {
  bool per_chunk_pairing = false;  // pair t-tests per chunk instead of seed
};

// Renders the mean-score table with significance markers, pairwise
// comparison CSV and per-run cumulative-mean curves from a results file.
// Returns 0, or 3 when the results file holds no rows.
int write_report(const std::filesystem::path& results_csv,
                 const std::filesystem::path& out_dir,
                 const ReportOptions& options = {});

// Results CSV schema shared by run/report.
inline constexpr const char* kResultsHeader =
    "run_id,method,learner,drift_type,seed,chunk,accuracy,"
    "balanced_accuracy,labeled_fraction,pool_size,wall_time_ms";

}  // namespace awae
