#include "awae/methods.hpp"

#include <algorithm>
#include <cmath>

#include "awae/binary_io.hpp"
#include "awae/errors.hpp"

namespace awae {

namespace {

constexpr char kPoolMagic[4] = {'D', 'F', 'P', '1'};
constexpr std::uint32_t kPoolVersion = 1;

void save_learner_config(std::ostream& os, const LearnerConfig& c) {
  io::write_pod<double>(os, c.gnb_var_smoothing);
  io::write_pod<std::int32_t>(os, c.ht_grace_period);
  io::write_pod<double>(os, c.ht_split_confidence);
  io::write_pod<std::int32_t>(os, c.mlp_hidden);
  io::write_pod<std::int32_t>(os, c.mlp_max_iter);
  io::write_pod<double>(os, c.mlp_learning_rate);
  io::write_pod<std::uint64_t>(os, c.seed);
}

LearnerConfig load_learner_config(std::istream& is) {
  LearnerConfig c;
  c.gnb_var_smoothing = io::read_pod<double>(is);
  c.ht_grace_period = io::read_pod<std::int32_t>(is);
  c.ht_split_confidence = io::read_pod<double>(is);
  c.mlp_hidden = io::read_pod<std::int32_t>(is);
  c.mlp_max_iter = io::read_pod<std::int32_t>(is);
  c.mlp_learning_rate = io::read_pod<double>(is);
  c.seed = io::read_pod<std::uint64_t>(is);
  return c;
}

void save_members(std::ostream& os, const EnsemblePool& pool) {
  io::write_pod<std::uint64_t>(os, pool.capacity);
  io::write_pod<std::uint64_t>(os, pool.size());
  for (const auto& member : pool.members) {
    io::write_pod<double>(os, member.weight);
    io::write_pod<std::int32_t>(os, member.residence);
    io::write_pod<std::int32_t>(os, member.birth_chunk);
    save_model(*member.model, os);
  }
}

void load_members(std::istream& is, EnsemblePool& pool) {
  pool.capacity = io::read_pod<std::uint64_t>(is);
  const auto count = io::read_pod<std::uint64_t>(is);
  pool.members.clear();
  for (std::uint64_t i = 0; i < count; ++i) {
    ClassifierMember member;
    member.weight = io::read_pod<double>(is);
    member.residence = io::read_pod<std::int32_t>(is);
    member.birth_chunk = io::read_pod<std::int32_t>(is);
    member.model = load_model(is);
    pool.members.push_back(std::move(member));
  }
}

void save_chunk(std::ostream& os, const DataChunk& chunk) {
  io::write_pod<std::int32_t>(os, chunk.index);
  io::write_pod<std::int32_t>(os, chunk.n_classes);
  io::write_pod<std::uint64_t>(os, chunk.features.rows());
  io::write_pod<std::uint64_t>(os, chunk.features.cols());
  io::write_f64_vec(os, chunk.features.data());
  std::vector<std::int32_t> labels;
  if (chunk.labels)
    labels.assign(chunk.labels->begin(), chunk.labels->end());
  io::write_i32_vec(os, labels);
}

DataChunk load_chunk(std::istream& is) {
  DataChunk chunk;
  chunk.index = io::read_pod<std::int32_t>(is);
  chunk.n_classes = io::read_pod<std::int32_t>(is);
  const auto rows = io::read_pod<std::uint64_t>(is);
  const auto cols = io::read_pod<std::uint64_t>(is);
  chunk.features = Matrix(rows, cols);
  chunk.features.data() = io::read_f64_vec(is);
  const auto labels = io::read_i32_vec(is);
  if (!labels.empty())
    chunk.labels = std::vector<int>(labels.begin(), labels.end());
  return chunk;
}

}  // namespace

// --- AWAE -----------------------------------------------------------------

AwaeMethod::AwaeMethod(AwaeConfig config, LearnerKind learner,
                       LearnerConfig learner_config)
    : config_(config), learner_(learner), learner_config_(learner_config) {
  config_.validate();
  pool_.capacity = config_.capacity;
}

void AwaeMethod::process_chunk(const DataChunk& labeled_subset) {
  awae::process_chunk(pool_, labeled_subset, config_, learner_,
                      learner_config_, hook_);
}

std::vector<int> AwaeMethod::predict(const Matrix& x) const {
  return combine_predict(pool_, x);
}

Matrix AwaeMethod::support(const Matrix& x) const {
  return combine_support(pool_, x);
}

void AwaeMethod::save(std::ostream& os) const {
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(learner_));
  save_learner_config(os, learner_config_);
  save_members(os, pool_);
}

void AwaeMethod::load(std::istream& is) {
  learner_ = static_cast<LearnerKind>(io::read_pod<std::uint8_t>(is));
  learner_config_ = load_learner_config(is);
  load_members(is, pool_);
}

// --- SEA ------------------------------------------------------------------

SeaMethod::SeaMethod(std::size_t capacity, LearnerKind learner,
                     LearnerConfig learner_config)
    : capacity_(capacity), learner_(learner),
      learner_config_(learner_config) {
  if (capacity_ < 1) throw ConfigError("capacity must be >= 1");
  pool_.capacity = capacity_;
}

void SeaMethod::process_chunk(const DataChunk& labeled_subset) {
  LearnerConfig member_config = learner_config_;
  member_config.seed =
      member_seed(learner_config_.seed, labeled_subset.index);
  auto model = fit_classifier(learner_, labeled_subset, member_config);
  notify_training(labeled_subset.index, labeled_subset.size());
  pool_.members.push_back({std::move(model), 1.0, 0, labeled_subset.index});

  if (pool_.size() > capacity_) {
    std::size_t worst = 0;
    double worst_acc = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pool_.size(); ++k) {
      const double acc =
          member_accuracy(*pool_.members[k].model, labeled_subset.features,
                          *labeled_subset.labels);
      // tie: remove the older member
      if (acc < worst_acc ||
          (acc == worst_acc && pool_.members[k].birth_chunk <
                                   pool_.members[worst].birth_chunk)) {
        worst_acc = acc;
        worst = k;
      }
    }
    pool_.members.erase(pool_.members.begin() + static_cast<long>(worst));
  }
  for (auto& member : pool_.members) ++member.residence;
}

std::vector<int> SeaMethod::predict(const Matrix& x) const {
  return combine_predict(pool_, x);
}

Matrix SeaMethod::support(const Matrix& x) const {
  return combine_support(pool_, x);
}

void SeaMethod::save(std::ostream& os) const {
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(learner_));
  save_learner_config(os, learner_config_);
  save_members(os, pool_);
}

void SeaMethod::load(std::istream& is) {
  learner_ = static_cast<LearnerKind>(io::read_pod<std::uint8_t>(is));
  learner_config_ = load_learner_config(is);
  load_members(is, pool_);
  capacity_ = pool_.capacity;
}

// --- AWE-lite -------------------------------------------------------------

AweMethod::AweMethod(std::size_t capacity, LearnerKind learner,
                     LearnerConfig learner_config)
    : capacity_(capacity), learner_(learner),
      learner_config_(learner_config) {
  if (capacity_ < 1) throw ConfigError("capacity must be >= 1");
  pool_.capacity = capacity_;
}

void AweMethod::reweight(const DataChunk& labeled_subset) {
  if (labeled_subset.n_classes != 2)
    throw UnsupportedTaskError("awe-lite weighting requires a binary stream");
  const auto& y = *labeled_subset.labels;
  const std::size_t n = y.size();
  double prior = 0.0;
  for (int label : y) prior += label;
  prior /= static_cast<double>(n);
  const double mse_random = prior * (1.0 - prior);

  for (auto& member : pool_.members) {
    const Matrix s = member.model->support(labeled_subset.features);
    double mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = s(i, 1) - static_cast<double>(y[i]);
      mse += err * err;
    }
    mse /= static_cast<double>(n);
    member.weight = std::max(0.0, mse_random - mse);
  }
}

void AweMethod::trim_to_capacity() {
  while (pool_.size() > capacity_) {
    std::size_t worst = 0;
    for (std::size_t k = 1; k < pool_.size(); ++k) {
      const auto& a = pool_.members[k];
      const auto& b = pool_.members[worst];
      if (a.weight < b.weight ||
          (a.weight == b.weight && a.birth_chunk < b.birth_chunk))
        worst = k;
    }
    pool_.members.erase(pool_.members.begin() + static_cast<long>(worst));
    reservoirs_.erase(reservoirs_.begin() + static_cast<long>(worst));
  }
  if (pool_.weight_sum() <= 0.0 && !pool_.empty()) {
    auto newest = std::max_element(
        pool_.members.begin(), pool_.members.end(),
        [](const auto& a, const auto& b) {
          return a.birth_chunk < b.birth_chunk;
        });
    newest->weight = 1.0;
  }
}

void AweMethod::process_chunk(const DataChunk& labeled_subset) {
  LearnerConfig member_config = learner_config_;
  member_config.seed =
      member_seed(learner_config_.seed, labeled_subset.index);
  auto model = fit_classifier(learner_, labeled_subset, member_config);
  notify_training(labeled_subset.index, labeled_subset.size());
  pool_.members.push_back({std::move(model), 0.0, 0, labeled_subset.index});
  reservoirs_.push_back(labeled_subset);

  reweight(labeled_subset);
  trim_to_capacity();
  for (auto& member : pool_.members) ++member.residence;
}

std::vector<int> AweMethod::predict(const Matrix& x) const {
  return combine_predict(pool_, x);
}

Matrix AweMethod::support(const Matrix& x) const {
  return combine_support(pool_, x);
}

void AweMethod::save(std::ostream& os) const {
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(learner_));
  save_learner_config(os, learner_config_);
  save_members(os, pool_);
  io::write_pod<std::uint64_t>(os, reservoirs_.size());
  for (const auto& chunk : reservoirs_) save_chunk(os, chunk);
}

void AweMethod::load(std::istream& is) {
  learner_ = static_cast<LearnerKind>(io::read_pod<std::uint8_t>(is));
  learner_config_ = load_learner_config(is);
  load_members(is, pool_);
  capacity_ = pool_.capacity;
  const auto count = io::read_pod<std::uint64_t>(is);
  reservoirs_.clear();
  for (std::uint64_t i = 0; i < count; ++i)
    reservoirs_.push_back(load_chunk(is));
}

// --- AUE-lite -------------------------------------------------------------

void AueMethod::process_chunk(const DataChunk& labeled_subset) {
  LearnerConfig member_config = learner_config_;
  member_config.seed =
      member_seed(learner_config_.seed, labeled_subset.index);
  auto model = fit_classifier(learner_, labeled_subset, member_config);
  notify_training(labeled_subset.index, labeled_subset.size());
  pool_.members.push_back({std::move(model), 0.0, 0, labeled_subset.index});
  reservoirs_.push_back(labeled_subset);

  // Refit every retained member except the newest on current labels merged
  // with its birth-chunk reservoir.
  for (std::size_t k = 0; k + 1 < pool_.size(); ++k) {
    auto& member = pool_.members[k];
    const DataChunk& reservoir = reservoirs_[k];
    DataChunk merged;
    merged.index = labeled_subset.index;
    merged.n_classes = labeled_subset.n_classes;
    merged.features = labeled_subset.features;
    merged.labels = *labeled_subset.labels;
    for (std::size_t i = 0; i < reservoir.size(); ++i) {
      merged.features.append_row(reservoir.features.row(i));
      merged.labels->push_back((*reservoir.labels)[i]);
    }
    LearnerConfig refit_config = learner_config_;
    refit_config.seed =
        member_seed(learner_config_.seed, member.birth_chunk) ^
        member_seed(learner_config_.seed, labeled_subset.index);
    member.model = fit_classifier(learner_, merged, refit_config);
    notify_training(labeled_subset.index, labeled_subset.size());
    notify_training(reservoir.index, reservoir.size());
  }

  reweight(labeled_subset);
  trim_to_capacity();
  for (auto& member : pool_.members) ++member.residence;
}

// --- static single model --------------------------------------------------

SingleModelMethod::SingleModelMethod(LearnerKind learner,
                                     LearnerConfig learner_config)
    : learner_(learner), learner_config_(learner_config) {}

void SingleModelMethod::process_chunk(const DataChunk& labeled_subset) {
  if (model_) return;  // frozen after the first chunk
  LearnerConfig member_config = learner_config_;
  member_config.seed =
      member_seed(learner_config_.seed, labeled_subset.index);
  model_ = fit_classifier(learner_, labeled_subset, member_config);
  notify_training(labeled_subset.index, labeled_subset.size());
}

std::vector<int> SingleModelMethod::predict(const Matrix& x) const {
  if (!model_) throw StateError("single model not trained yet");
  return model_->predict(x);
}

Matrix SingleModelMethod::support(const Matrix& x) const {
  if (!model_) throw StateError("single model not trained yet");
  return model_->support(x);
}

void SingleModelMethod::save(std::ostream& os) const {
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(learner_));
  save_learner_config(os, learner_config_);
  io::write_pod<std::uint8_t>(os, model_ ? 1 : 0);
  if (model_) save_model(*model_, os);
}

void SingleModelMethod::load(std::istream& is) {
  learner_ = static_cast<LearnerKind>(io::read_pod<std::uint8_t>(is));
  learner_config_ = load_learner_config(is);
  if (io::read_pod<std::uint8_t>(is) != 0)
    model_ = load_model(is);
  else
    model_.reset();
}

// --- snapshots ------------------------------------------------------------

void save_snapshot(const StreamMethod& method, std::ostream& os) {
  io::write_magic(os, kPoolMagic);
  io::write_pod<std::uint32_t>(os, kPoolVersion);
  io::write_string(os, method.method_name());
  method.save(os);
}

void load_snapshot(StreamMethod& method, std::istream& is) {
  io::expect_magic(is, kPoolMagic);
  const auto version = io::read_pod<std::uint32_t>(is);
  if (version != kPoolVersion)
    throw ParseError("unsupported snapshot version " +
                     std::to_string(version));
  const std::string tag = io::read_string(is);
  if (tag != method.method_name())
    throw ParseError("snapshot method tag '" + tag + "' does not match '" +
                     method.method_name() + "'");
  method.load(is);
}

std::unique_ptr<StreamMethod> make_method(const MethodFactoryArgs& args) {
  if (args.method == "awae")
    return std::make_unique<AwaeMethod>(args.awae, args.learner,
                                        args.learner_config);
  if (args.method == "sea")
    return std::make_unique<SeaMethod>(args.capacity, args.learner,
                                       args.learner_config);
  if (args.method == "awe")
    return std::make_unique<AweMethod>(args.capacity, args.learner,
                                       args.learner_config);
  if (args.method == "aue")
    return std::make_unique<AueMethod>(args.capacity, args.learner,
                                       args.learner_config);
  if (args.method == "single")
    return std::make_unique<SingleModelMethod>(args.learner,
                                               args.learner_config);
  throw ConfigError("unknown method: " + args.method);
}

}  // namespace awae
