#include <algorithm>
#include <cmath>

#include "awae/binary_io.hpp"
#include "awae/errors.hpp"
#include "awae/learners.hpp"
#include "awae/parallel.hpp"

namespace awae {

void GnbClassifier::fit(const Matrix& x, const std::vector<int>& y,
                        int n_classes, const LearnerConfig& config) {
  config.validate();
  if (x.rows() == 0) throw StateError("gnb: empty training chunk");
  n_classes_ = n_classes;
  n_features_ = static_cast<int>(x.cols());
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();

  std::vector<double> counts(n_classes_, 0.0);
  means_ = Matrix(n_classes_, d);
  vars_ = Matrix(n_classes_, d);
  for (std::size_t i = 0; i < n; ++i) {
    counts[y[i]] += 1.0;
    const auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) means_(y[i], j) += row[j];
  }
  for (int c = 0; c < n_classes_; ++c)
    if (counts[c] > 0.0)
      for (std::size_t j = 0; j < d; ++j) means_(c, j) /= counts[c];
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dv = row[j] - means_(y[i], j);
      vars_(y[i], j) += dv * dv;
    }
  }
  for (int c = 0; c < n_classes_; ++c)
    if (counts[c] > 0.0)
      for (std::size_t j = 0; j < d; ++j) vars_(c, j) /= counts[c];

  // Additive smoothing by a fraction of the largest overall feature variance.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = x(i, j) - mean;
      var += dv * dv;
    }
    max_var = std::max(max_var, var / static_cast<double>(n));
  }
  const double smoothing = config.gnb_var_smoothing * max_var;
  for (auto& v : vars_.data()) v = std::max(v + smoothing, 1e-12);

  priors_.assign(n_classes_, 0.0);
  for (int c = 0; c < n_classes_; ++c)
    priors_[c] = counts[c] / static_cast<double>(n);
}

Matrix GnbClassifier::support(const Matrix& x) const {
  if (static_cast<int>(x.cols()) != n_features_)
    throw ShapeError("gnb: feature width mismatch");
  const std::size_t d = x.cols();
  Matrix out(x.rows(), n_classes_);
  parallel::for_each_index(x.rows(), [&](std::size_t i) {
    const auto row = x.row(i);
    auto scores = out.row(i);
    double max_log = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_classes_; ++c) {
      if (priors_[c] <= 0.0) {
        scores[c] = -std::numeric_limits<double>::infinity();
        continue;
      }
      double log_joint = std::log(priors_[c]);
      for (std::size_t j = 0; j < d; ++j) {
        const double var = vars_(c, j);
        const double dv = row[j] - means_(c, j);
        log_joint += -0.5 * std::log(2.0 * M_PI * var) - dv * dv / (2.0 * var);
      }
      scores[c] = log_joint;
      max_log = std::max(max_log, log_joint);
    }
    double total = 0.0;
    for (int c = 0; c < n_classes_; ++c) {
      scores[c] = std::isinf(scores[c]) ? 0.0 : std::exp(scores[c] - max_log);
      total += scores[c];
    }
    for (int c = 0; c < n_classes_; ++c) scores[c] /= total;
  });
  return out;
}

void GnbClassifier::save(std::ostream& os) const {
  io::write_pod<std::int32_t>(os, n_classes_);
  io::write_pod<std::int32_t>(os, n_features_);
  io::write_f64_vec(os, priors_);
  io::write_f64_vec(os, means_.data());
  io::write_f64_vec(os, vars_.data());
}

void GnbClassifier::load(std::istream& is) {
  n_classes_ = io::read_pod<std::int32_t>(is);
  n_features_ = io::read_pod<std::int32_t>(is);
  priors_ = io::read_f64_vec(is);
  means_ = Matrix(n_classes_, n_features_);
  means_.data() = io::read_f64_vec(is);
  vars_ = Matrix(n_classes_, n_features_);
  vars_.data() = io::read_f64_vec(is);
}

}  // namespace awae
