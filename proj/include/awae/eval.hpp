#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "awae/bals.hpp"
#include "awae/methods.hpp"
#include "awae/stream.hpp"

namespace awae {

struct EvaluationRecord {
  int chunk = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double labeled_fraction = 0.0;
  std::size_t pool_size = 0;
  double wall_time_ms = 0.0;
};

struct ComparisonResult {
  std::string method_a;
  std::string method_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
  bool degenerate = false;  // zero-variance differences
};

double accuracy_score(const std::vector<int>& truth,
                      const std::vector<int>& predictions);

// Mean per-class recall over the classes present in truth.
double balanced_accuracy(const std::vector<int>& truth,
                         const std::vector<int>& predictions);

// Two-sided paired t-test; p-value from the t distribution with n-1 degrees
// of freedom. Zero-variance differences yield the degenerate flag and p = 1.
ComparisonResult paired_t_test(const std::vector<double>& scores_a,
                               const std::vector<double>& scores_b);

std::vector<std::pair<int, double>> cumulative_mean_curve(
    const std::vector<EvaluationRecord>& records);

// Counts training exposures per source chunk so the harness can prove that
// evaluation of chunk k never sees a model trained on chunk k.
class ExposureLog {
 public:
  void record(int chunk_index, std::size_t count);
  std::size_t exposures(int chunk_index) const;
  // Throws StateError if chunk_index has already been used for training.
  void assert_unseen(int chunk_index) const;

 private:
  std::vector<std::size_t> counts_;
};

struct RunOptions {
  bool full_labeling = true;
  BalsConfig bals;
  bool record_timing = false;   // wall_time_ms stays 0 when off
  ExposureLog* exposure_log = nullptr;
};

// Test-then-train protocol: chunk 0 trains on full labels; every later chunk
// is evaluated on full ground truth first, then labeled via BALS (or fully)
// and fed to the method. Yields one record per chunk index >= 1.
std::vector<EvaluationRecord> run_test_then_train(
    const std::vector<DataChunk>& stream, StreamMethod& method,
    const RunOptions& options);

}  // namespace awae
