#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "awae/methods.hpp"
#include "awae/stream.hpp"

namespace awae {

struct BalsConfig {
  double threshold = 0.2;  // t, in [0, 0.5]
  double budget = 0.05;    // b, fraction in [0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabelingOutcome {
  std::vector<std::size_t> selected;  // sorted, unique
  DataChunk labeled_chunk;
  double labeled_fraction = 0.0;
  std::size_t active_count = 0;
  std::size_t budget_count = 0;
  std::size_t overlap = 0;
};

// Budget Active Labeling Strategy: labels every instance of the first chunk;
// afterwards unions (a) instances whose class-1 support lies within the
// threshold band around 0.5 under the current predictor with (b) a random
// budget of ceil(b*n) instances sampled without replacement. Binary streams
// only.
LabelingOutcome select_for_labeling(const StreamMethod& predictor,
                                    const DataChunk& chunk,
                                    const BalsConfig& config,
                                    bool is_first_chunk, std::mt19937_64& rng);

}  // namespace awae
