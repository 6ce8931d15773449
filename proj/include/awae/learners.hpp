#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "awae/matrix.hpp"
#include "awae/stream.hpp"

namespace awae {

enum class LearnerKind { kGnb, kHoeffdingTree, kMlp };

std::string to_string(LearnerKind k);
LearnerKind learner_kind_from_string(const std::string& s);

struct LearnerConfig {
  double gnb_var_smoothing = 1e-9;
  int ht_grace_period = 200;
  double ht_split_confidence = 1e-7;
  int mlp_hidden = 100;
  int mlp_max_iter = 200;
  double mlp_learning_rate = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

// Base-classifier contract: batch fit on one labeled chunk, batch predict,
// batch per-class support. Trained models are immutable for prediction and
// safe to share between threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void fit(const Matrix& x, const std::vector<int>& y, int n_classes,
                   const LearnerConfig& config) = 0;

  // Rows are probability-like: non-negative, summing to 1.
  virtual Matrix support(const Matrix& x) const = 0;

  // argmax of support, ties broken toward the lower class index.
  std::vector<int> predict(const Matrix& x) const;

  virtual LearnerKind kind() const = 0;
  virtual int n_classes() const = 0;
  virtual int n_features() const = 0;

  virtual void save(std::ostream& os) const = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
};

std::unique_ptr<Classifier> make_classifier(LearnerKind kind);

std::unique_ptr<Classifier> fit_classifier(LearnerKind kind,
                                           const DataChunk& chunk,
                                           const LearnerConfig& config);

// Versioned binary model blob (magic DFM1).
void save_model(const Classifier& model, std::ostream& os);
std::unique_ptr<Classifier> load_model(std::istream& is);

// --- Gaussian naive Bayes -------------------------------------------------

class GnbClassifier final : public Classifier {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, int n_classes,
           const LearnerConfig& config) override;
  Matrix support(const Matrix& x) const override;
  LearnerKind kind() const override { return LearnerKind::kGnb; }
  int n_classes() const override { return n_classes_; }
  int n_features() const override { return n_features_; }
  void save(std::ostream& os) const override;
  void load(std::istream& is);
  std::unique_ptr<Classifier> clone() const override {
    return std::make_unique<GnbClassifier>(*this);
  }

 private:
  int n_classes_ = 0;
  int n_features_ = 0;
  std::vector<double> priors_;
  Matrix means_;  // n_classes x n_features
  Matrix vars_;   // smoothed
};

// --- Hoeffding tree -------------------------------------------------------

// Single-pass incremental tree: leaves keep per-class Gaussian feature
// estimators and attempt a split every grace_period instances, using the
// Hellinger distance between branch class distributions gated by the
// Hoeffding bound.
class HoeffdingTreeClassifier final : public Classifier {
 public:
  struct Node {
    bool is_leaf = true;
    int split_feature = -1;
    double split_threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;
    // Welford accumulators, [class][feature].
    Matrix feat_mean;
    Matrix feat_m2;
    std::vector<double> feat_min;
    std::vector<double> feat_max;
    double total = 0.0;
    double since_attempt = 0.0;
  };

  void fit(const Matrix& x, const std::vector<int>& y, int n_classes,
           const LearnerConfig& config) override;
  Matrix support(const Matrix& x) const override;
  LearnerKind kind() const override { return LearnerKind::kHoeffdingTree; }
  int n_classes() const override { return n_classes_; }
  int n_features() const override { return n_features_; }
  void save(std::ostream& os) const override;
  void load(std::istream& is);
  std::unique_ptr<Classifier> clone() const override {
    return std::make_unique<HoeffdingTreeClassifier>(*this);
  }

  const Node& root() const { return nodes_.front(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  static constexpr int kCandidateThresholds = 10;

  // Hellinger distance between two class-frequency vectors (normalized),
  // in [0,1]. Exposed for the split-gain oracle tests.
  static double hellinger_gain(const std::vector<double>& left_counts,
                               const std::vector<double>& right_counts);

 private:
  int leaf_for(std::span<const double> x) const;
  void try_split(int node_idx, double split_confidence);

  int n_classes_ = 0;
  int n_features_ = 0;
  std::vector<Node> nodes_;
};

// --- Multilayer perceptron ------------------------------------------------

// Single hidden layer, ReLU, softmax output, cross-entropy loss, full-batch
// Adam. Parameters are flattened so the loss gradient can be finite-difference
// checked.
struct MlpNet {
  int n_in = 0;
  int n_hidden = 0;
  int n_out = 0;
  std::vector<double> params;  // W1 | b1 | W2 | b2

  std::size_t param_count() const {
    return static_cast<std::size_t>(n_in) * n_hidden + n_hidden +
           static_cast<std::size_t>(n_hidden) * n_out + n_out;
  }

  void init(int in, int hidden, int out, std::uint64_t seed);

  // Mean cross-entropy over the batch; writes the analytic gradient when
  // grad is non-null.
  double loss(const Matrix& x, const std::vector<int>& y,
              std::vector<double>* grad) const;

  Matrix forward(const Matrix& x) const;  // softmax rows
};

class MlpClassifier final : public Classifier {
 public:
  void fit(const Matrix& x, const std::vector<int>& y, int n_classes,
           const LearnerConfig& config) override;
  Matrix support(const Matrix& x) const override;
  LearnerKind kind() const override { return LearnerKind::kMlp; }
  int n_classes() const override { return net_.n_out; }
  int n_features() const override { return net_.n_in; }
  void save(std::ostream& os) const override;
  void load(std::istream& is);
  std::unique_ptr<Classifier> clone() const override {
    return std::make_unique<MlpClassifier>(*this);
  }

  const MlpNet& net() const { return net_; }

 private:
  MlpNet net_;
};

}  // namespace awae
