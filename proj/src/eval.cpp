#include "awae/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "awae/errors.hpp"

namespace awae {

double accuracy_score(const std::vector<int>& truth,
                      const std::vector<int>& predictions) {
  if (truth.empty() || truth.size() != predictions.size())
    throw MetricError("accuracy: empty or mismatched inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    hits += truth[i] == predictions[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double balanced_accuracy(const std::vector<int>& truth,
                         const std::vector<int>& predictions) {
  if (truth.empty() || truth.size() != predictions.size())
    throw MetricError("balanced accuracy: empty or mismatched inputs");
  const int n_classes = *std::max_element(truth.begin(), truth.end()) + 1;
  std::vector<double> per_class(n_classes, 0.0), totals(n_classes, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    totals[truth[i]] += 1.0;
    if (truth[i] == predictions[i]) per_class[truth[i]] += 1.0;
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (totals[c] > 0.0) {
      sum += per_class[c] / totals[c];
      ++present;
    }
  }
  return sum / present;
}

ComparisonResult paired_t_test(const std::vector<double>& scores_a,
                               const std::vector<double>& scores_b) {
  if (scores_a.size() != scores_b.size())
    throw MetricError("paired t-test: length mismatch");
  const std::size_t n = scores_a.size();
  if (n < 3) throw MetricError("paired t-test: need at least 3 pairs");

  ComparisonResult result;
  result.mean_a = std::accumulate(scores_a.begin(), scores_a.end(), 0.0) / n;
  result.mean_b = std::accumulate(scores_b.begin(), scores_b.end(), 0.0) / n;

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = scores_a[i] - scores_b[i];
  const double mean_d = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
  double var = 0.0;
  for (double d : diff) var += (d - mean_d) * (d - mean_d);
  var /= static_cast<double>(n - 1);

  if (var <= 0.0) {
    result.degenerate = true;
    result.t_statistic = 0.0;
    result.p_value = 1.0;
    result.significant = false;
    return result;
  }
  result.t_statistic = mean_d / std::sqrt(var / n);
  boost::math::students_t dist(static_cast<double>(n - 1));
  result.p_value =
      2.0 * boost::math::cdf(dist, -std::abs(result.t_statistic));
  result.significant = result.p_value < 0.05;
  return result;
}

std::vector<std::pair<int, double>> cumulative_mean_curve(
    const std::vector<EvaluationRecord>& records) {
  if (records.empty()) throw MetricError("cumulative curve: no records");
  std::vector<std::pair<int, double>> curve;
  curve.reserve(records.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sum += records[i].accuracy;
    curve.emplace_back(records[i].chunk, sum / static_cast<double>(i + 1));
  }
  return curve;
}

void ExposureLog::record(int chunk_index, std::size_t count) {
  if (chunk_index < 0) return;
  if (counts_.size() <= static_cast<std::size_t>(chunk_index))
    counts_.resize(chunk_index + 1, 0);
  counts_[chunk_index] += count;
}

std::size_t ExposureLog::exposures(int chunk_index) const {
  if (chunk_index < 0 ||
      counts_.size() <= static_cast<std::size_t>(chunk_index))
    return 0;
  return counts_[chunk_index];
}

void ExposureLog::assert_unseen(int chunk_index) const {
  if (exposures(chunk_index) != 0)
    throw StateError("data leakage: chunk " + std::to_string(chunk_index) +
                     " trained on before evaluation");
}

std::vector<EvaluationRecord> run_test_then_train(
    const std::vector<DataChunk>& stream, StreamMethod& method,
    const RunOptions& options) {
  if (stream.size() < 2)
    throw ConfigError("test-then-train requires at least 2 chunks");
  if (!options.full_labeling) options.bals.validate();

  ExposureLog* log = options.exposure_log;
  if (log)
    method.set_train_hook([log](int chunk, std::size_t count) {
      log->record(chunk, count);
    });

  std::mt19937_64 bals_rng(options.bals.seed);
  std::vector<EvaluationRecord> records;
  records.reserve(stream.size() - 1);

  for (const DataChunk& chunk : stream) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    EvaluationRecord record;
    record.chunk = chunk.index;
    const bool is_first = chunk.index == stream.front().index;
    if (!is_first) {
      if (log) log->assert_unseen(chunk.index);
      const auto predictions = method.predict(chunk.features);
      record.accuracy = accuracy_score(*chunk.labels, predictions);
      record.balanced_accuracy = balanced_accuracy(*chunk.labels, predictions);
    }

    if (options.full_labeling) {
      record.labeled_fraction = 1.0;
      method.process_chunk(chunk);
    } else {
      const auto outcome = select_for_labeling(method, chunk, options.bals,
                                               is_first, bals_rng);
      record.labeled_fraction = outcome.labeled_fraction;
      if (!outcome.selected.empty()) method.process_chunk(outcome.labeled_chunk);
    }
    record.pool_size = method.pool_size();
    if (options.record_timing) {
      record.wall_time_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - start)
              .count();
    }
    if (!is_first) records.push_back(record);
  }
  return records;
}

}  // namespace awae
