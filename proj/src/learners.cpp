#include "awae/learners.hpp"

#include "awae/binary_io.hpp"
#include "awae/errors.hpp"
#include "awae/parallel.hpp"

namespace awae {

namespace {
constexpr char kModelMagic[4] = {'D', 'F', 'M', '1'};
constexpr std::uint32_t kModelVersion = 1;
}  // namespace

std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::kGnb: return "gnb";
    case LearnerKind::kHoeffdingTree: return "ht";
    case LearnerKind::kMlp: return "mlp";
  }
  return "gnb";
}

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "gnb") return LearnerKind::kGnb;
  if (s == "ht") return LearnerKind::kHoeffdingTree;
  if (s == "mlp") return LearnerKind::kMlp;
  throw ConfigError("unknown learner kind: " + s);
}

void LearnerConfig::validate() const {
  if (gnb_var_smoothing < 0.0)
    throw ConfigError("gnb_var_smoothing must be non-negative");
  if (ht_grace_period < 1) throw ConfigError("ht_grace_period must be positive");
  if (ht_split_confidence <= 0.0 || ht_split_confidence >= 1.0)
    throw ConfigError("ht_split_confidence must be in (0,1)");
  if (mlp_hidden < 1) throw ConfigError("mlp_hidden must be positive");
  if (mlp_max_iter < 1) throw ConfigError("mlp_max_iter must be positive");
  if (mlp_learning_rate <= 0.0)
    throw ConfigError("mlp_learning_rate must be positive");
}

std::vector<int> Classifier::predict(const Matrix& x) const {
  const Matrix scores = support(x);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = scores.row(i);
    int best = 0;
    for (std::size_t c = 1; c < row.size(); ++c)
      if (row[c] > row[best]) best = static_cast<int>(c);
    out[i] = best;
  }
  return out;
}

std::unique_ptr<Classifier> make_classifier(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kGnb: return std::make_unique<GnbClassifier>();
    case LearnerKind::kHoeffdingTree:
      return std::make_unique<HoeffdingTreeClassifier>();
    case LearnerKind::kMlp: return std::make_unique<MlpClassifier>();
  }
  throw ConfigError("unknown learner kind");
}

std::unique_ptr<Classifier> fit_classifier(LearnerKind kind,
                                           const DataChunk& chunk,
                                           const LearnerConfig& config) {
  if (!chunk.has_labels() || chunk.size() == 0)
    throw StateError("cannot train on a chunk without labeled instances");
  auto model = make_classifier(kind);
  model->fit(chunk.features, *chunk.labels, chunk.n_classes, config);
  return model;
}

void save_model(const Classifier& model, std::ostream& os) {
  io::write_magic(os, kModelMagic);
  io::write_pod<std::uint32_t>(os, kModelVersion);
  io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(model.kind()));
  model.save(os);
}

std::unique_ptr<Classifier> load_model(std::istream& is) {
  io::expect_magic(is, kModelMagic);
  const auto version = io::read_pod<std::uint32_t>(is);
  if (version != kModelVersion)
    throw ParseError("unsupported model blob version " +
                     std::to_string(version));
  const auto kind = static_cast<LearnerKind>(io::read_pod<std::uint8_t>(is));
  switch (kind) {
    case LearnerKind::kGnb: {
      auto m = std::make_unique<GnbClassifier>();
      m->load(is);
      return m;
    }
    case LearnerKind::kHoeffdingTree: {
      auto m = std::make_unique<HoeffdingTreeClassifier>();
      m->load(is);
      return m;
    }
    case LearnerKind::kMlp: {
      auto m = std::make_unique<MlpClassifier>();
      m->load(is);
      return m;
    }
  }
  throw ParseError("unknown learner kind tag in model blob");
}

}  // namespace awae
