#include <algorithm>
#include <cmath>
#include <random>

#include "awae/binary_io.hpp"
#include "awae/errors.hpp"
#include "awae/learners.hpp"
#include "awae/parallel.hpp"

namespace awae {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

void MlpNet::init(int in, int hidden, int out, std::uint64_t seed) {
  n_in = in;
  n_hidden = hidden;
  n_out = out;
  params.assign(param_count(), 0.0);
  std::mt19937_64 rng(seed);
  const double a1 = std::sqrt(6.0 / (n_in + n_hidden));
  const double a2 = std::sqrt(6.0 / (n_hidden + n_out));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  const std::size_t w1 = static_cast<std::size_t>(n_in) * n_hidden;
  const std::size_t b1_end = w1 + n_hidden;
  const std::size_t w2_end = b1_end + static_cast<std::size_t>(n_hidden) * n_out;
  for (std::size_t i = 0; i < w1; ++i) params[i] = u1(rng);
  for (std::size_t i = b1_end; i < w2_end; ++i) params[i] = u2(rng);
}

double MlpNet::loss(const Matrix& x, const std::vector<int>& y,
                    std::vector<double>* grad) const {
  const std::size_t n = x.rows();
  const std::size_t w1_off = 0;
  const std::size_t b1_off = static_cast<std::size_t>(n_in) * n_hidden;
  const std::size_t w2_off = b1_off + n_hidden;
  const std::size_t b2_off = w2_off + static_cast<std::size_t>(n_hidden) * n_out;
  const double* w1 = params.data() + w1_off;
  const double* b1 = params.data() + b1_off;
  const double* w2 = params.data() + w2_off;
  const double* b2 = params.data() + b2_off;

  Matrix z1(n, n_hidden), a1(n, n_hidden), p(n, n_out);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.row(i);
    for (int h = 0; h < n_hidden; ++h) {
      double z = b1[h];
      for (int j = 0; j < n_in; ++j) z += xi[j] * w1[j * n_hidden + h];
      z1(i, h) = z;
      a1(i, h) = z > 0.0 ? z : 0.0;
    }
    double max_z = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_out; ++c) {
      double z = b2[c];
      for (int h = 0; h < n_hidden; ++h) z += a1(i, h) * w2[h * n_out + c];
      p(i, c) = z;
      max_z = std::max(max_z, z);
    }
    double total = 0.0;
    for (int c = 0; c < n_out; ++c) {
      p(i, c) = std::exp(p(i, c) - max_z);
      total += p(i, c);
    }
    for (int c = 0; c < n_out; ++c) p(i, c) /= total;
  }

  double loss_value = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    loss_value -= std::log(std::max(p(i, y[i]), 1e-300));
  loss_value /= static_cast<double>(n);

  if (grad != nullptr) {
    grad->assign(param_count(), 0.0);
    double* gw1 = grad->data() + w1_off;
    double* gb1 = grad->data() + b1_off;
    double* gw2 = grad->data() + w2_off;
    double* gb2 = grad->data() + b2_off;
    std::vector<double> dz2(n_out), dz1(n_hidden);
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(i);
      for (int c = 0; c < n_out; ++c) {
        dz2[c] = (p(i, c) - (y[i] == c ? 1.0 : 0.0)) / static_cast<double>(n);
        gb2[c] += dz2[c];
      }
      for (int h = 0; h < n_hidden; ++h) {
        double da = 0.0;
        for (int c = 0; c < n_out; ++c) {
          gw2[h * n_out + c] += a1(i, h) * dz2[c];
          da += dz2[c] * w2[h * n_out + c];
        }
        dz1[h] = z1(i, h) > 0.0 ? da : 0.0;
        gb1[h] += dz1[h];
      }
      for (int j = 0; j < n_in; ++j)
        for (int h = 0; h < n_hidden; ++h)
          gw1[j * n_hidden + h] += xi[j] * dz1[h];
    }
  }
  return loss_value;
}

Matrix MlpNet::forward(const Matrix& x) const {
  const double* w1 = params.data();
  const double* b1 = params.data() + static_cast<std::size_t>(n_in) * n_hidden;
  const double* w2 = b1 + n_hidden;
  const double* b2 = w2 + static_cast<std::size_t>(n_hidden) * n_out;
  Matrix out(x.rows(), n_out);
  parallel::for_each_index(x.rows(), [&](std::size_t i) {
    const auto xi = x.row(i);
    std::vector<double> hidden(n_hidden);
    for (int h = 0; h < n_hidden; ++h) {
      double z = b1[h];
      for (int j = 0; j < n_in; ++j) z += xi[j] * w1[j * n_hidden + h];
      hidden[h] = z > 0.0 ? z : 0.0;
    }
    auto scores = out.row(i);
    double max_z = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_out; ++c) {
      double z = b2[c];
      for (int h = 0; h < n_hidden; ++h) z += hidden[h] * w2[h * n_out + c];
      scores[c] = z;
      max_z = std::max(max_z, z);
    }
    double total = 0.0;
    for (int c = 0; c < n_out; ++c) {
      scores[c] = std::exp(scores[c] - max_z);
      total += scores[c];
    }
    for (int c = 0; c < n_out; ++c) scores[c] /= total;
  });
  return out;
}

void MlpClassifier::fit(const Matrix& x, const std::vector<int>& y,
                        int n_classes, const LearnerConfig& config) {
  config.validate();
  if (x.rows() == 0) throw StateError("mlp: empty training chunk");
  net_.init(static_cast<int>(x.cols()), config.mlp_hidden, n_classes,
            config.seed);

  std::vector<double> grad, m(net_.param_count(), 0.0),
      v(net_.param_count(), 0.0);
  for (int epoch = 1; epoch <= config.mlp_max_iter; ++epoch) {
    net_.loss(x, y, &grad);
    const double bc1 = 1.0 - std::pow(kBeta1, epoch);
    const double bc2 = 1.0 - std::pow(kBeta2, epoch);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      net_.params[i] -= config.mlp_learning_rate * (m[i] / bc1) /
                        (std::sqrt(v[i] / bc2) + kAdamEps);
    }
  }
}

Matrix MlpClassifier::support(const Matrix& x) const {
  if (static_cast<int>(x.cols()) != net_.n_in)
    throw ShapeError("mlp: feature width mismatch");
  return net_.forward(x);
}

void MlpClassifier::save(std::ostream& os) const {
  io::write_pod<std::int32_t>(os, net_.n_in);
  io::write_pod<std::int32_t>(os, net_.n_hidden);
  io::write_pod<std::int32_t>(os, net_.n_out);
  io::write_f64_vec(os, net_.params);
}

void MlpClassifier::load(std::istream& is) {
  net_.n_in = io::read_pod<std::int32_t>(is);
  net_.n_hidden = io::read_pod<std::int32_t>(is);
  net_.n_out = io::read_pod<std::int32_t>(is);
  net_.params = io::read_f64_vec(is);
}

}  // namespace awae
