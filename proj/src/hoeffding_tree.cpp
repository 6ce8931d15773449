#include <algorithm>
#include <cmath>
#include <limits>

#include "awae/binary_io.hpp"
#include "awae/errors.hpp"
#include "awae/learners.hpp"
#include "awae/parallel.hpp"

namespace awae {

namespace {

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

HoeffdingTreeClassifier::Node make_leaf(int n_classes, int n_features) {
  HoeffdingTreeClassifier::Node node;
  node.class_counts.assign(n_classes, 0.0);
  node.feat_mean = Matrix(n_classes, n_features);
  node.feat_m2 = Matrix(n_classes, n_features);
  node.feat_min.assign(n_features,
                       std::numeric_limits<double>::infinity());
  node.feat_max.assign(n_features,
                       -std::numeric_limits<double>::infinity());
  return node;
}

}  // namespace

double HoeffdingTreeClassifier::hellinger_gain(
    const std::vector<double>& left_counts,
    const std::vector<double>& right_counts) {
  double left_total = 0.0, right_total = 0.0;
  for (double v : left_counts) left_total += v;
  for (double v : right_counts) right_total += v;
  if (left_total <= 0.0 || right_total <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t c = 0; c < left_counts.size(); ++c) {
    const double diff = std::sqrt(left_counts[c] / left_total) -
                        std::sqrt(right_counts[c] / right_total);
    sum += diff * diff;
  }
  return std::sqrt(sum) / std::sqrt(2.0);
}

void HoeffdingTreeClassifier::fit(const Matrix& x, const std::vector<int>& y,
                                  int n_classes, const LearnerConfig& config) {
  config.validate();
  if (x.rows() == 0) throw StateError("ht: empty training chunk");
  n_classes_ = n_classes;
  n_features_ = static_cast<int>(x.cols());
  nodes_.clear();
  nodes_.push_back(make_leaf(n_classes_, n_features_));

  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const int leaf = leaf_for(row);
    Node& node = nodes_[leaf];
    const int c = y[i];
    node.class_counts[c] += 1.0;
    node.total += 1.0;
    node.since_attempt += 1.0;
    const double k = node.class_counts[c];
    for (int j = 0; j < n_features_; ++j) {
      const double dv = row[j] - node.feat_mean(c, j);
      node.feat_mean(c, j) += dv / k;
      node.feat_m2(c, j) += dv * (row[j] - node.feat_mean(c, j));
      node.feat_min[j] = std::min(node.feat_min[j], row[j]);
      node.feat_max[j] = std::max(node.feat_max[j], row[j]);
    }
    if (node.since_attempt >= config.ht_grace_period) {
      nodes_[leaf].since_attempt = 0.0;
      try_split(leaf, config.ht_split_confidence);
    }
  }
}

void HoeffdingTreeClassifier::try_split(int node_idx,
                                        double split_confidence) {
  Node& node = nodes_[node_idx];
  int best_feature = -1;
  double best_threshold = 0.0;
  double best_gain = 0.0;
  double second_gain = 0.0;  // best gain among the other features

  std::vector<double> left(n_classes_), right(n_classes_);
  for (int f = 0; f < n_features_; ++f) {
    const double lo = node.feat_min[f];
    const double hi = node.feat_max[f];
    if (!(hi > lo)) continue;
    double feature_gain = 0.0;
    double feature_threshold = 0.0;
    for (int t = 0; t < kCandidateThresholds; ++t) {
      const double thr =
          lo + (t + 0.5) * (hi - lo) / kCandidateThresholds;
      double left_mass = 0.0, right_mass = 0.0;
      for (int c = 0; c < n_classes_; ++c) {
        const double count = node.class_counts[c];
        if (count <= 0.0) {
          left[c] = right[c] = 0.0;
          continue;
        }
        const double var = node.feat_m2(c, f) / count;
        const double sd = std::sqrt(std::max(var, 0.0));
        double frac;
        if (sd > 0.0)
          frac = gauss_cdf((thr - node.feat_mean(c, f)) / sd);
        else
          frac = thr >= node.feat_mean(c, f) ? 1.0 : 0.0;
        left[c] = count * frac;
        right[c] = count - left[c];
        left_mass += left[c];
        right_mass += right[c];
      }
      if (left_mass < 1e-9 || right_mass < 1e-9) continue;
      const double gain = hellinger_gain(left, right);
      if (gain > feature_gain) {
        feature_gain = gain;
        feature_threshold = thr;
      }
    }
    if (feature_gain > best_gain) {
      second_gain = best_gain;
      best_gain = feature_gain;
      best_feature = f;
      best_threshold = feature_threshold;
    } else if (feature_gain > second_gain) {
      second_gain = feature_gain;
    }
  }

  if (best_feature < 0 || best_gain <= 0.0) return;
  // Hoeffding bound with statistic range 1. Tie-break: when the bound has
  // shrunk below tau, equally good features should not block the split
  // forever.
  constexpr double kTieBreakTau = 0.05;
  const double epsilon =
      std::sqrt(std::log(1.0 / split_confidence) / (2.0 * node.total));
  if (best_gain - second_gain <= epsilon && epsilon >= kTieBreakTau) return;

  const int left_idx = static_cast<int>(nodes_.size());
  nodes_.push_back(make_leaf(n_classes_, n_features_));
  const int right_idx = static_cast<int>(nodes_.size());
  nodes_.push_back(make_leaf(n_classes_, n_features_));
  Node& split_node = nodes_[node_idx];  // re-fetch, vector may have grown
  split_node.is_leaf = false;
  split_node.split_feature = best_feature;
  split_node.split_threshold = best_threshold;
  split_node.left = left_idx;
  split_node.right = right_idx;
}

int HoeffdingTreeClassifier::leaf_for(std::span<const double> x) const {
  int idx = 0;
  while (!nodes_[idx].is_leaf) {
    const Node& node = nodes_[idx];
    idx = x[node.split_feature] <= node.split_threshold ? node.left
                                                        : node.right;
  }
  return idx;
}

Matrix HoeffdingTreeClassifier::support(const Matrix& x) const {
  if (static_cast<int>(x.cols()) != n_features_)
    throw ShapeError("ht: feature width mismatch");
  Matrix out(x.rows(), n_classes_);
  parallel::for_each_index(x.rows(), [&](std::size_t i) {
    const Node& leaf = nodes_[leaf_for(x.row(i))];
    auto scores = out.row(i);
    // Leaf class frequencies with add-one smoothing.
    const double denom = leaf.total + n_classes_;
    for (int c = 0; c < n_classes_; ++c)
      scores[c] = (leaf.class_counts[c] + 1.0) / denom;
  });
  return out;
}

void HoeffdingTreeClassifier::save(std::ostream& os) const {
  io::write_pod<std::int32_t>(os, n_classes_);
  io::write_pod<std::int32_t>(os, n_features_);
  io::write_pod<std::uint64_t>(os, nodes_.size());
  for (const Node& node : nodes_) {
    io::write_pod<std::uint8_t>(os, node.is_leaf ? 1 : 0);
    io::write_pod<std::int32_t>(os, node.split_feature);
    io::write_pod<double>(os, node.split_threshold);
    io::write_pod<std::int32_t>(os, node.left);
    io::write_pod<std::int32_t>(os, node.right);
    io::write_pod<double>(os, node.total);
    io::write_f64_vec(os, node.class_counts);
  }
}

void HoeffdingTreeClassifier::load(std::istream& is) {
  n_classes_ = io::read_pod<std::int32_t>(is);
  n_features_ = io::read_pod<std::int32_t>(is);
  const auto count = io::read_pod<std::uint64_t>(is);
  nodes_.clear();
  nodes_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Node node;
    node.is_leaf = io::read_pod<std::uint8_t>(is) != 0;
    node.split_feature = io::read_pod<std::int32_t>(is);
    node.split_threshold = io::read_pod<double>(is);
    node.left = io::read_pod<std::int32_t>(is);
    node.right = io::read_pod<std::int32_t>(is);
    node.total = io::read_pod<double>(is);
    node.class_counts = io::read_f64_vec(is);
    nodes_.push_back(std::move(node));
  }
}

}  // namespace awae
