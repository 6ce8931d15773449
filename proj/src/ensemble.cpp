#include "awae/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "awae/errors.hpp"

namespace awae {

namespace {

constexpr double kKunchevaCap = 1e6;

std::vector<std::vector<int>> member_predictions(const EnsemblePool& pool,
                                                 const Matrix& x) {
  std::vector<std::vector<int>> preds;
  preds.reserve(pool.size());
  for (const auto& member : pool.members)
    preds.push_back(member.model->predict(x));
  return preds;
}

std::vector<int> vote(const std::vector<std::vector<int>>& preds,
                      const std::vector<double>& weights, int n_classes,
                      std::size_t n_instances) {
  std::vector<int> out(n_instances);
  std::vector<double> score(n_classes);
  for (std::size_t i = 0; i < n_instances; ++i) {
    std::fill(score.begin(), score.end(), 0.0);
    for (std::size_t k = 0; k < preds.size(); ++k)
      score[preds[k][i]] += weights[k];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
      if (score[c] > score[best]) best = c;
    out[i] = best;
  }
  return out;
}

std::vector<double> effective_weights(const EnsemblePool& pool) {
  std::vector<double> w;
  w.reserve(pool.size());
  double sum = 0.0;
  for (const auto& member : pool.members) {
    w.push_back(member.weight);
    sum += member.weight;
  }
  if (sum <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

double accuracy_of(const std::vector<int>& pred, const std::vector<int>& y) {
  if (y.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred[i] == y[i];
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

// Diversity of a subset given the full correctness table; singleton subsets
// carry no diversity.
double subset_diversity(const std::vector<std::vector<bool>>& correct,
                        const std::vector<std::size_t>& subset,
                        std::size_t n_instances) {
  const std::size_t n_members = subset.size();
  if (n_members < 2 || n_instances == 0) return 0.0;
  std::vector<double> failure_fraction(n_members + 1, 0.0);
  for (std::size_t i = 0; i < n_instances; ++i) {
    std::size_t failures = 0;
    for (auto k : subset) failures += !correct[k][i];
    failure_fraction[failures] += 1.0;
  }
  for (auto& f : failure_fraction) f /= static_cast<double>(n_instances);
  double p1 = 0.0, p2 = 0.0;
  const double n = static_cast<double>(n_members);
  for (std::size_t j = 1; j <= n_members; ++j) {
    const double jd = static_cast<double>(j);
    p1 += (jd / n) * failure_fraction[j];
    p2 += (jd * (jd - 1.0) / (n * (n - 1.0))) * failure_fraction[j];
  }
  if (p1 == 0.0) return 1.0;
  return 1.0 - p2 / p1;
}

}  // namespace

std::string to_string(WeightingMethod m) {
  switch (m) {
    case WeightingMethod::kSame: return "same";
    case WeightingMethod::kKuncheva: return "kuncheva";
    case WeightingMethod::kProportional: return "proportional";
    case WeightingMethod::kBell: return "bell";
  }
  return "bell";
}

std::string to_string(AgingMethod m) {
  switch (m) {
    case AgingMethod::kProportional: return "proportional";
    case AgingMethod::kConstant: return "constant";
    case AgingMethod::kGaussian: return "gaussian";
  }
  return "constant";
}

WeightingMethod weighting_from_string(const std::string& s) {
  if (s == "same") return WeightingMethod::kSame;
  if (s == "kuncheva") return WeightingMethod::kKuncheva;
  if (s == "proportional") return WeightingMethod::kProportional;
  if (s == "bell") return WeightingMethod::kBell;
  throw ConfigError("unknown weighting method: " + s);
}

AgingMethod aging_from_string(const std::string& s) {
  if (s == "proportional") return AgingMethod::kProportional;
  if (s == "constant") return AgingMethod::kConstant;
  if (s == "gaussian") return AgingMethod::kGaussian;
  throw ConfigError("unknown aging method: " + s);
}

void AwaeConfig::validate() const {
  if (capacity < 1) throw ConfigError("capacity must be >= 1");
  if (theta < 0.0 || theta > 1.0) throw ConfigError("theta must be in [0,1]");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0,1]");
  if (delta < 0.0) throw ConfigError("delta must be >= 0");
  if (xi <= 0.0) throw ConfigError("xi must be > 0");
  if (rejuvenation_power <= 1.0)
    throw ConfigError("rejuvenation_power must be > 1");
}

double EnsemblePool::weight_sum() const {
  double sum = 0.0;
  for (const auto& member : members) sum += member.weight;
  return sum;
}

std::vector<int> combine_predict(const EnsemblePool& pool, const Matrix& x) {
  if (pool.empty()) throw StateError("combine_predict on an empty pool");
  const int n_classes = pool.members.front().model->n_classes();
  return vote(member_predictions(pool, x), effective_weights(pool), n_classes,
              x.rows());
}

Matrix combine_support(const EnsemblePool& pool, const Matrix& x) {
  if (pool.empty()) throw StateError("combine_support on an empty pool");
  const int n_classes = pool.members.front().model->n_classes();
  const auto weights = effective_weights(pool);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  Matrix out(x.rows(), n_classes);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const Matrix s = pool.members[k].model->support(x);
    const double w = weights[k] / total;
    for (std::size_t i = 0; i < out.data().size(); ++i)
      out.data()[i] += w * s.data()[i];
  }
  return out;
}

double member_accuracy(const Classifier& model, const Matrix& x,
                       const std::vector<int>& y) {
  return accuracy_of(model.predict(x), y);
}

double ensemble_accuracy(const EnsemblePool& pool, const Matrix& x,
                         const std::vector<int>& y) {
  return accuracy_of(combine_predict(pool, x), y);
}

void compute_weights(EnsemblePool& pool, const Matrix& x,
                     const std::vector<int>& y, WeightingMethod method,
                     double theta) {
  if (pool.empty()) throw StateError("compute_weights on an empty pool");
  if (y.empty()) {
    std::cerr << "awae: no labeled instances in chunk, weights unchanged\n";
    return;
  }
  std::vector<double> acc(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k)
    acc[k] = member_accuracy(*pool.members[k].model, x, y);

  switch (method) {
    case WeightingMethod::kSame: {
      const double w = 1.0 / static_cast<double>(pool.size());
      for (auto& member : pool.members) member.weight = w;
      break;
    }
    case WeightingMethod::kKuncheva: {
      for (std::size_t k = 0; k < pool.size(); ++k) {
        auto& member = pool.members[k];
        member.weight = acc[k] >= 1.0 - 1e-6 ? kKunchevaCap
                                             : acc[k] / (1.0 - acc[k]);
      }
      break;
    }
    case WeightingMethod::kProportional: {
      const double pool_acc = ensemble_accuracy(pool, x, y);
      for (std::size_t k = 0; k < pool.size(); ++k) {
        double w = pool_acc > 0.0 ? acc[k] / pool_acc : 0.0;
        if (w < theta) w = 0.0;
        pool.members[k].weight = w;
      }
      break;
    }
    case WeightingMethod::kBell: {
      const double pool_acc = ensemble_accuracy(pool, x, y);
      for (std::size_t k = 0; k < pool.size(); ++k) {
        const double diff = pool_acc - acc[k];
        double w = std::exp(-diff * diff / 2.0) / std::sqrt(2.0 * M_PI);
        if (w < theta) w = 0.0;
        pool.members[k].weight = w;
      }
      break;
    }
  }
}

void apply_aging(EnsemblePool& pool, const Matrix& x,
                 const std::vector<int>& y, AgingMethod method, double theta,
                 double delta, double xi) {
  switch (method) {
    case AgingMethod::kProportional: {
      if (y.empty()) return;
      for (auto& member : pool.members) {
        const double acc = member_accuracy(*member.model, x, y);
        // residence floored at 1 so a freshly trained member keeps its
        // accuracy as weight
        const double itter = std::max(member.residence, 1);
        member.weight = acc / std::sqrt(itter);
      }
      break;
    }
    case AgingMethod::kConstant: {
      for (auto& member : pool.members) {
        member.weight -= delta;
        if (member.weight < theta) member.weight = 0.0;
      }
      break;
    }
    case AgingMethod::kGaussian: {
      for (auto& member : pool.members) {
        member.weight *= std::exp(-member.residence * xi / 2.0);
        if (member.weight < theta) member.weight = 0.0;
      }
      break;
    }
  }
}

void rejuvenate(EnsemblePool& pool, double rejuvenation_power) {
  if (pool.empty()) return;
  const double mean = pool.weight_sum() / static_cast<double>(pool.size());
  for (auto& member : pool.members) {
    if (member.weight > mean) {
      const int step = std::max(
          1, static_cast<int>(std::floor(rejuvenation_power * member.weight)));
      member.residence = std::max(0, member.residence - step);
    }
  }
}

double generalized_diversity(const std::vector<std::vector<bool>>& correct) {
  if (correct.size() < 2)
    throw StateError("generalized diversity undefined for fewer than 2 members");
  const std::size_t n_instances = correct.front().size();
  std::vector<std::size_t> all(correct.size());
  std::iota(all.begin(), all.end(), 0);
  return subset_diversity(correct, all, n_instances);
}

double generalized_diversity(const EnsemblePool& pool, const Matrix& x,
                             const std::vector<int>& y) {
  if (pool.size() < 2)
    throw StateError("generalized diversity undefined for fewer than 2 members");
  if (y.empty()) throw StateError("generalized diversity needs labeled data");
  std::vector<std::vector<bool>> correct(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto pred = pool.members[k].model->predict(x);
    correct[k].resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) correct[k][i] = pred[i] == y[i];
  }
  return generalized_diversity(correct);
}

std::size_t prune(EnsemblePool& pool, const Matrix& x,
                  const std::vector<int>& y, PruningMode mode, double alpha) {
  if (pool.size() != pool.capacity + 1)
    throw StateError("prune requires |pool| == capacity + 1");
  const int n_classes = pool.members.front().model->n_classes();
  const auto preds = member_predictions(pool, x);
  std::vector<std::vector<bool>> correct(pool.size());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    correct[k].resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      correct[k][i] = preds[k][i] == y[i];
  }
  const auto weights = effective_weights(pool);

  std::size_t removed = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < pool.size(); ++r) {
    std::vector<std::size_t> subset;
    subset.reserve(pool.size() - 1);
    for (std::size_t k = 0; k < pool.size(); ++k)
      if (k != r) subset.push_back(k);

    const double diversity = subset_diversity(correct, subset, y.size());
    double score;
    if (mode == PruningMode::kPre) {
      score = diversity;
    } else {
      std::vector<std::vector<int>> sub_preds;
      std::vector<double> sub_weights;
      double sub_sum = 0.0;
      for (auto k : subset) {
        sub_preds.push_back(preds[k]);
        sub_weights.push_back(weights[k]);
        sub_sum += weights[k];
      }
      if (sub_sum <= 0.0)
        std::fill(sub_weights.begin(), sub_weights.end(), 1.0);
      const double acc =
          accuracy_of(vote(sub_preds, sub_weights, n_classes, y.size()), y);
      score = alpha * acc + (1.0 - alpha) * diversity;
    }
    // Ties keep the subset that removes the oldest member.
    if (score > best_score ||
        (score == best_score &&
         pool.members[r].residence > pool.members[removed].residence)) {
      best_score = score;
      removed = r;
    }
  }
  pool.members.erase(pool.members.begin() + static_cast<long>(removed));
  return removed;
}

std::uint64_t member_seed(std::uint64_t base_seed, int chunk_index) {
  return base_seed ^
         (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(chunk_index + 1));
}

void process_chunk(EnsemblePool& pool, const DataChunk& labeled_subset,
                   const AwaeConfig& config, LearnerKind learner,
                   const LearnerConfig& learner_config,
                   const TrainHook& hook) {
  config.validate();
  const Matrix& x = labeled_subset.features;
  static const std::vector<int> kNoLabels;
  const std::vector<int>& y =
      labeled_subset.labels ? *labeled_subset.labels : kNoLabels;

  // (1) train a new member on the labeled subset
  LearnerConfig member_config = learner_config;
  member_config.seed = member_seed(learner_config.seed, labeled_subset.index);
  auto model = fit_classifier(learner, labeled_subset, member_config);
  if (hook) hook(labeled_subset.index, labeled_subset.size());
  pool.members.push_back(
      {std::move(model), 0.0, 0, labeled_subset.index});

  // (2) pre-pruning while over capacity
  if (config.pre_pruning && pool.size() > pool.capacity)
    prune(pool, x, y, PruningMode::kPre, config.alpha);

  // (3) reindexing is implicit in vector order

  // (4)-(6) weighting, rejuvenation, aging
  compute_weights(pool, x, y, config.weighting, config.theta);
  if (config.rejuvenation_enabled) rejuvenate(pool, config.rejuvenation_power);
  apply_aging(pool, x, y, config.aging, config.theta, config.delta, config.xi);

  // (7) drop zero-weight members; keep the newest alive if all aged out
  const bool all_zero = pool.weight_sum() <= 0.0;
  if (all_zero) {
    auto newest = std::max_element(
        pool.members.begin(), pool.members.end(),
        [](const auto& a, const auto& b) {
          return a.birth_chunk < b.birth_chunk;
        });
    ClassifierMember survivor = std::move(*newest);
    survivor.weight = 1.0;
    pool.members.clear();
    pool.members.push_back(std::move(survivor));
  } else {
    std::erase_if(pool.members,
                  [](const ClassifierMember& m) { return m.weight <= 0.0; });
  }

  // (8) post-pruning while over capacity
  if (config.post_pruning && pool.size() > pool.capacity)
    prune(pool, x, y, PruningMode::kPost, config.alpha);

  // (9) normalize weights
  const double sum = pool.weight_sum();
  for (auto& member : pool.members) member.weight /= sum;

  // (10) advance residence counters
  for (auto& member : pool.members) ++member.residence;
}

}  // namespace awae
