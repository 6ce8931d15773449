#pragma once

#include <memory>
#include <string>

#include "awae/ensemble.hpp"

namespace awae {

// Chunk-based stream classifier driven by the test-then-train harness:
// gets one labeled subset per chunk, predicts between updates.
class StreamMethod {
 public:
  virtual ~StreamMethod() = default;

  virtual void process_chunk(const DataChunk& labeled_subset) = 0;
  virtual std::vector<int> predict(const Matrix& x) const = 0;
  virtual Matrix support(const Matrix& x) const = 0;

  // False until the first chunk has been processed.
  virtual bool ready() const = 0;
  virtual std::size_t pool_size() const = 0;
  virtual std::string method_name() const = 0;

  void set_train_hook(TrainHook hook) { hook_ = std::move(hook); }

  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;

 protected:
  void notify_training(int chunk_index, std::size_t count) const {
    if (hook_) hook_(chunk_index, count);
  }
  TrainHook hook_;
};

class AwaeMethod final : public StreamMethod {
 public:
  AwaeMethod(AwaeConfig config, LearnerKind learner,
             LearnerConfig learner_config);

  void process_chunk(const DataChunk& labeled_subset) override;
  std::vector<int> predict(const Matrix& x) const override;
  Matrix support(const Matrix& x) const override;
  bool ready() const override { return !pool_.empty(); }
  std::size_t pool_size() const override { return pool_.size(); }
  std::string method_name() const override { return "awae"; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  const EnsemblePool& pool() const { return pool_; }

 private:
  AwaeConfig config_;
  LearnerKind learner_;
  LearnerConfig learner_config_;
  EnsemblePool pool_;
};

// Streaming Ensemble Algorithm: unweighted majority vote, drops the member
// with the lowest accuracy on the current labeled subset when over capacity.
class SeaMethod final : public StreamMethod {
 public:
  SeaMethod(std::size_t capacity, LearnerKind learner,
            LearnerConfig learner_config);

  void process_chunk(const DataChunk& labeled_subset) override;
  std::vector<int> predict(const Matrix& x) const override;
  Matrix support(const Matrix& x) const override;
  bool ready() const override { return !pool_.empty(); }
  std::size_t pool_size() const override { return pool_.size(); }
  std::string method_name() const override { return "sea"; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  const EnsemblePool& pool() const { return pool_; }

 private:
  std::size_t capacity_;
  LearnerKind learner_;
  LearnerConfig learner_config_;
  EnsemblePool pool_;
};

// MSE-weighted chunk ensemble in the accuracy-weighted family. Weights are
// max(0, mse_random - mse_member) against 0/1 labels; binary streams only.
// Labeled "awe-lite": the variant follows this repo's formulas, not the
// original paper's pseudocode.
class AweMethod : public StreamMethod {
 public:
  AweMethod(std::size_t capacity, LearnerKind learner,
            LearnerConfig learner_config);

  void process_chunk(const DataChunk& labeled_subset) override;
  std::vector<int> predict(const Matrix& x) const override;
  Matrix support(const Matrix& x) const override;
  bool ready() const override { return !pool_.empty(); }
  std::size_t pool_size() const override { return pool_.size(); }
  std::string method_name() const override { return "awe"; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  const EnsemblePool& pool() const { return pool_; }

 protected:
  void reweight(const DataChunk& labeled_subset);
  void trim_to_capacity();

  std::size_t capacity_;
  LearnerKind learner_;
  LearnerConfig learner_config_;
  EnsemblePool pool_;
  // Per-member training reservoir (birth-chunk labeled data); only the AUE
  // subclass refits from it.
  std::vector<DataChunk> reservoirs_;
};

// AWE plus per-chunk refit of the retained members on current labels merged
// with each member's birth-chunk reservoir.
class AueMethod final : public AweMethod {
 public:
  using AweMethod::AweMethod;

  void process_chunk(const DataChunk& labeled_subset) override;
  std::string method_name() const override { return "aue"; }
};

// Static baseline: trains once on the first labeled chunk, never updates.
class SingleModelMethod final : public StreamMethod {
 public:
  SingleModelMethod(LearnerKind learner, LearnerConfig learner_config);

  void process_chunk(const DataChunk& labeled_subset) override;
  std::vector<int> predict(const Matrix& x) const override;
  Matrix support(const Matrix& x) const override;
  bool ready() const override { return model_ != nullptr; }
  std::size_t pool_size() const override { return model_ ? 1 : 0; }
  std::string method_name() const override { return "single"; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

 private:
  LearnerKind learner_;
  LearnerConfig learner_config_;
  std::unique_ptr<Classifier> model_;
};

// Versioned pool snapshot envelope (magic DFP1): method tag plus the
// method's own payload. Enables pause/resume of long experiment grids.
void save_snapshot(const StreamMethod& method, std::ostream& os);
void load_snapshot(StreamMethod& method, std::istream& is);

struct MethodFactoryArgs {
  std::string method;  // awae | sea | awe | aue | single
  LearnerKind learner = LearnerKind::kGnb;
  LearnerConfig learner_config;
  AwaeConfig awae;        // used by awae
  std::size_t capacity = 10;  // used by the reference methods
};

std::unique_ptr<StreamMethod> make_method(const MethodFactoryArgs& args);

}  // namespace awae
