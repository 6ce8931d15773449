#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "awae/learners.hpp"
#include "awae/matrix.hpp"
#include "awae/stream.hpp"

namespace awae {

enum class WeightingMethod { kSame, kKuncheva, kProportional, kBell };
enum class AgingMethod { kProportional, kConstant, kGaussian };
enum class PruningMode { kPre, kPost };

std::string to_string(WeightingMethod m);
std::string to_string(AgingMethod m);
WeightingMethod weighting_from_string(const std::string& s);
AgingMethod aging_from_string(const std::string& s);

struct AwaeConfig {
  std::size_t capacity = 10;
  bool pre_pruning = false;
  bool post_pruning = true;
  WeightingMethod weighting = WeightingMethod::kBell;
  AgingMethod aging = AgingMethod::kConstant;
  double theta = 0.05;
  double delta = 0.1;
  double xi = 0.5;
  double rejuvenation_power = 2.0;
  double alpha = 0.5;
  bool rejuvenation_enabled = false;

  void validate() const;
};

struct ClassifierMember {
  std::shared_ptr<Classifier> model;
  double weight = 0.0;
  int residence = 0;
  int birth_chunk = 0;
};

// Ordered pool of weighted members. Single-writer: process_chunk mutates it
// exclusively; reads between chunk updates are safe.
struct EnsemblePool {
  std::vector<ClassifierMember> members;
  std::size_t capacity = 10;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  double weight_sum() const;
};

// Called whenever instances are used for training: (source chunk index,
// instance count). Backs the no-leakage instrumentation in the harness.
using TrainHook = std::function<void(int chunk_index, std::size_t count)>;

// Weighted vote over member predictions; ties go to the lower class index.
// A pool whose weights are all zero votes with uniform weights.
std::vector<int> combine_predict(const EnsemblePool& pool, const Matrix& x);

// Weighted mean of member support rows (weights normalized; uniform when the
// weight sum is zero).
Matrix combine_support(const EnsemblePool& pool, const Matrix& x);

double member_accuracy(const Classifier& model, const Matrix& x,
                       const std::vector<int>& y);

double ensemble_accuracy(const EnsemblePool& pool, const Matrix& x,
                         const std::vector<int>& y);

void compute_weights(EnsemblePool& pool, const Matrix& x,
                     const std::vector<int>& y, WeightingMethod method,
                     double theta);

void apply_aging(EnsemblePool& pool, const Matrix& x,
                 const std::vector<int>& y, AgingMethod method, double theta,
                 double delta, double xi);

void rejuvenate(EnsemblePool& pool, double rejuvenation_power);

// GD = 1 - p(2)/p(1) over the member-failure distribution; 1 when no member
// ever fails. correct[member][instance] marks correct predictions.
double generalized_diversity(const std::vector<std::vector<bool>>& correct);

double generalized_diversity(const EnsemblePool& pool, const Matrix& x,
                             const std::vector<int>& y);

// Removes one member via exhaustive leave-one-out scoring. Requires
// |pool| == capacity + 1. Returns the removed member's index.
// Pre mode scores subsets by diversity alone, post mode by
// alpha * accuracy + (1 - alpha) * diversity. Ties remove the member with
// the largest residence. Single-member subsets score diversity 0.
std::size_t prune(EnsemblePool& pool, const Matrix& x,
                  const std::vector<int>& y, PruningMode mode, double alpha);

// One full ensemble update on the labeled subset of a chunk: train and
// append, prune, weight, rejuvenate, age, drop zero-weight members,
// normalize, advance residence counters.
void process_chunk(EnsemblePool& pool, const DataChunk& labeled_subset,
                   const AwaeConfig& config, LearnerKind learner,
                   const LearnerConfig& learner_config,
                   const TrainHook& hook = {});

// Per-chunk training seed so every member gets fresh, reproducible
// initialization.
std::uint64_t member_seed(std::uint64_t base_seed, int chunk_index);

}  // namespace awae
