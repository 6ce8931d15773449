#pragma once

// Shared test fixtures: a scriptable classifier whose predictions are fixed
// up front, so ensemble arithmetic can be checked against hand-computed
// values without any real training.

#include <memory>
#include <random>
#include <vector>

#include "awae/ensemble.hpp"
#include "awae/learners.hpp"
#include "awae/matrix.hpp"

namespace awae::testing {

class FakeClassifier final : public Classifier {
 public:
  FakeClassifier(std::vector<int> predictions, int n_classes)
      : predictions_(std::move(predictions)), n_classes_(n_classes) {}

  void fit(const Matrix&, const std::vector<int>&, int,
           const LearnerConfig&) override {}

  Matrix support(const Matrix& x) const override {
    Matrix out(x.rows(), n_classes_);
    for (std::size_t i = 0; i < x.rows(); ++i)
      out(i, predictions_[i % predictions_.size()]) = 1.0;
    return out;
  }

  LearnerKind kind() const override { return LearnerKind::kGnb; }
  int n_classes() const override { return n_classes_; }
  int n_features() const override { return 1; }
  void save(std::ostream&) const override {}
  std::unique_ptr<Classifier> clone() const override {
    return std::make_unique<FakeClassifier>(*this);
  }

 private:
  std::vector<int> predictions_;
  int n_classes_;
};

// Pool of scripted members; x is a dummy feature column of matching length.
struct ScriptedPool {
  EnsemblePool pool;
  Matrix x;
  std::vector<int> y;
};

inline ScriptedPool make_scripted_pool(
    const std::vector<std::vector<int>>& member_predictions,
    const std::vector<int>& truth, int n_classes,
    const std::vector<double>& weights = {},
    const std::vector<int>& residences = {}) {
  ScriptedPool sp;
  sp.x = Matrix(truth.size(), 1);
  sp.y = truth;
  sp.pool.capacity = member_predictions.size();
  for (std::size_t k = 0; k < member_predictions.size(); ++k) {
    ClassifierMember member;
    member.model =
        std::make_shared<FakeClassifier>(member_predictions[k], n_classes);
    member.weight = k < weights.size() ? weights[k] : 1.0;
    member.residence = k < residences.size() ? residences[k] : 1;
    member.birth_chunk = static_cast<int>(k);
    sp.pool.members.push_back(std::move(member));
  }
  return sp;
}

// Random correctness table: correct[member][instance].
inline std::vector<std::vector<bool>> random_table(std::mt19937_64& rng,
                                                   std::size_t members,
                                                   std::size_t instances,
                                                   double p_correct = 0.7) {
  std::bernoulli_distribution coin(p_correct);
  std::vector<std::vector<bool>> table(members,
                                       std::vector<bool>(instances));
  for (auto& row : table)
    for (std::size_t i = 0; i < instances; ++i) row[i] = coin(rng);
  return table;
}

}  // namespace awae::testing
