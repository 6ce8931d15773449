#include "awae/bals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "awae/errors.hpp"

namespace awae {

void BalsConfig::validate() const {
  if (threshold < 0.0 || threshold > 0.5)
    throw ConfigError("bals threshold must be in [0, 0.5]");
  if (budget < 0.0 || budget > 1.0)
    throw ConfigError("bals budget must be in [0, 1]");
}

LabelingOutcome select_for_labeling(const StreamMethod& predictor,
                                    const DataChunk& chunk,
                                    const BalsConfig& config,
                                    bool is_first_chunk,
                                    std::mt19937_64& rng) {
  config.validate();
  if (chunk.size() == 0) throw StateError("bals: empty chunk");
  if (chunk.n_classes != 2)
    throw UnsupportedTaskError(
        "bals supports binary streams only (got " +
        std::to_string(chunk.n_classes) + " classes)");

  const std::size_t n = chunk.size();
  LabelingOutcome outcome;

  if (is_first_chunk) {
    outcome.selected.resize(n);
    std::iota(outcome.selected.begin(), outcome.selected.end(), 0);
    outcome.labeled_chunk = chunk.subset(outcome.selected);
    outcome.labeled_fraction = 1.0;
    return outcome;
  }

  if (!predictor.ready())
    throw StateError("bals: no trained predictor for a non-first chunk");

  // (a) uncertainty band: |support(class 1) - 0.5| strictly below t
  const Matrix support = predictor.support(chunk.features);
  std::vector<bool> chosen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(support(i, 1) - 0.5) < config.threshold) {
      chosen[i] = true;
      ++outcome.active_count;
    }
  }

  // (b) random budget of ceil(b*n) instances without replacement
  const std::size_t budget_size =
      static_cast<std::size_t>(std::ceil(config.budget * n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < budget_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
    const std::size_t idx = order[i];
    if (chosen[idx]) ++outcome.overlap;
    chosen[idx] = true;
  }
  outcome.budget_count = budget_size;

  for (std::size_t i = 0; i < n; ++i)
    if (chosen[i]) outcome.selected.push_back(i);
  outcome.labeled_fraction =
      static_cast<double>(outcome.selected.size()) / static_cast<double>(n);
  if (!outcome.selected.empty())
    outcome.labeled_chunk = chunk.subset(outcome.selected);
  else {
    outcome.labeled_chunk.index = chunk.index;
    outcome.labeled_chunk.n_classes = chunk.n_classes;
    outcome.labeled_chunk.features = Matrix(0, chunk.n_features());
    outcome.labeled_chunk.labels = std::vector<int>{};
  }
  return outcome;
}

}  // namespace awae
