#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "awae/matrix.hpp"

namespace awae {

enum class DriftType { kSudden, kGradual, kIncremental };

std::string to_string(DriftType t);
DriftType drift_type_from_string(const std::string& s);

// One batch of stream instances. Labels are optional: evaluation chunks carry
// them, BALS-restricted training chunks carry them only for selected rows.
struct DataChunk {
  int index = 0;
  Matrix features;
  std::optional<std::vector<int>> labels;
  int n_classes = 2;

  std::size_t size() const { return features.rows(); }
  std::size_t n_features() const { return features.cols(); }
  bool has_labels() const { return labels.has_value(); }

  // Restriction to a subset of rows, keeping row order. Requires labels.
  DataChunk subset(std::span<const std::size_t> idx) const;
};

struct StreamConfig {
  int n_chunks = 200;
  int chunk_size = 250;
  int n_features = 8;
  int n_drifts = 10;
  DriftType drift_type = DriftType::kSudden;
  double label_noise = 0.01;
  int n_classes = 2;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Blend coefficient of the drift schedule at a chunk index: 0 in the region
// governed by the older concept, 1 after the transition, monotone within an
// incremental/gradual window. Exposed for schedule tests.
double blend_at(const StreamConfig& config, int chunk_index);

// Blend of one specific transition (0-based) at a chunk index; 0 before its
// window, 1 after. Exposed for drift-placement tests.
double transition_blend_at(const StreamConfig& config, int transition,
                           int chunk_index);

// Width of the incremental/gradual transition window in chunks.
int transition_window(const StreamConfig& config);

std::vector<DataChunk> generate_synthetic_stream(const StreamConfig& config);

enum class Interpolation { kNearest, kCubic };

Interpolation interpolation_from_string(const std::string& s);

// Per-chunk affine projection (x -> x * weights + offset) of the
// semi-synthetic generator; exposed so the interpolation path can be checked
// against an independent oracle.
struct ProjectionTransform {
  Matrix weights;                // original_d x n_features
  std::vector<double> offset;    // n_features
};

std::vector<ProjectionTransform> semisynthetic_transforms(
    const DataChunk& dataset, const StreamConfig& config,
    Interpolation interpolation);

std::vector<DataChunk> generate_semisynthetic_stream(
    const DataChunk& dataset, const StreamConfig& config,
    Interpolation interpolation);

// CSV stream files: header `f0,...,f{d-1},label`, one instance per row.
// Trailing rows that do not fill a chunk are dropped.
std::vector<DataChunk> read_csv_stream(const std::filesystem::path& path,
                                       std::size_t chunk_size);

void write_csv_stream(const std::vector<DataChunk>& chunks,
                      const std::filesystem::path& path);

}  // namespace awae
