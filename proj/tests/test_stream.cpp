#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "awae/errors.hpp"
#include "awae/stream.hpp"

using namespace awae;

namespace {

StreamConfig small_config() {
  StreamConfig cfg;
  cfg.n_chunks = 24;
  cfg.chunk_size = 60;
  cfg.n_features = 4;
  cfg.n_drifts = 2;
  cfg.label_noise = 0.0;
  cfg.seed = 42;
  return cfg;
}

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("stream config validation names the offending field") {
  StreamConfig cfg = small_config();
  cfg.n_chunks = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.label_noise = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_drifts = cfg.n_chunks;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config();
  cfg.n_classes = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("synthetic generation is deterministic in the seed") {
  const auto a = generate_synthetic_stream(small_config());
  const auto b = generate_synthetic_stream(small_config());
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].features == b[k].features);
    CHECK(*a[k].labels == *b[k].labels);
  }
  StreamConfig other = small_config();
  other.seed = 43;
  const auto c = generate_synthetic_stream(other);
  CHECK_FALSE(a[0].features == c[0].features);
}

TEST_CASE("chunk shapes and balanced labels") {
  const auto stream = generate_synthetic_stream(small_config());
  REQUIRE(stream.size() == 24);
  for (const auto& chunk : stream) {
    CHECK(chunk.features.rows() == 60);
    CHECK(chunk.features.cols() == 4);
    REQUIRE(chunk.has_labels());
    std::map<int, int> counts;
    for (int label : *chunk.labels) ++counts[label];
    REQUIRE(counts.size() == 2);
    CHECK(std::abs(counts[0] - counts[1]) <= 1);  // noise-free: balanced
  }
}

TEST_CASE("transition blend is a monotone 0-to-1 schedule") {
  for (const auto type :
       {DriftType::kSudden, DriftType::kGradual, DriftType::kIncremental}) {
    StreamConfig cfg = small_config();
    cfg.drift_type = type;
    for (int j = 0; j < cfg.n_drifts; ++j) {
      double prev = -1.0;
      CHECK(transition_blend_at(cfg, j, 0) == 0.0);
      CHECK(transition_blend_at(cfg, j, cfg.n_chunks - 1) == 1.0);
      for (int k = 0; k < cfg.n_chunks; ++k) {
        const double b = transition_blend_at(cfg, j, k);
        CHECK(b >= prev);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        if (type == DriftType::kSudden) CHECK((b == 0.0 || b == 1.0));
        prev = b;
      }
    }
  }
}

TEST_CASE("incremental window has the configured width") {
  StreamConfig cfg = small_config();
  cfg.drift_type = DriftType::kIncremental;
  const int w = transition_window(cfg);
  CHECK(w == 6);  // ceil(24 / (2*2))
  int interior = 0;
  for (int k = 0; k < cfg.n_chunks; ++k) {
    const double b = transition_blend_at(cfg, 0, k);
    if (b > 0.0 && b < 1.0) ++interior;
  }
  CHECK(interior == w);
}

TEST_CASE("sudden drift moves the class-conditional means") {
  StreamConfig cfg = small_config();
  cfg.n_drifts = 1;
  cfg.n_chunks = 10;
  cfg.chunk_size = 2000;
  const auto stream = generate_synthetic_stream(cfg);
  // transition center = round(10/2) = 5; compare class-0 feature means on
  // either side
  auto class_mean = [&](const DataChunk& chunk, int cls, int feature) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if ((*chunk.labels)[i] == cls) {
        sum += chunk.features(i, feature);
        ++n;
      }
    }
    return sum / n;
  };
  double moved = 0.0;
  for (int f = 0; f < cfg.n_features; ++f)
    moved = std::max(moved, std::abs(class_mean(stream[4], 0, f) -
                                     class_mean(stream[5], 0, f)));
  CHECK(moved > 0.5);  // independent uniform[-3,3] means rarely coincide
  // no drift inside a stable segment
  double stable = 0.0;
  for (int f = 0; f < cfg.n_features; ++f)
    stable = std::max(stable, std::abs(class_mean(stream[0], 0, f) -
                                       class_mean(stream[3], 0, f)));
  CHECK(stable < 0.3);
}

TEST_CASE("label noise flips labels without touching features") {
  StreamConfig clean = small_config();
  StreamConfig noisy = small_config();
  noisy.label_noise = 0.2;
  const auto a = generate_synthetic_stream(clean);
  const auto b = generate_synthetic_stream(noisy);
  std::size_t flips = 0, total = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].features == b[k].features);
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      flips += (*a[k].labels)[i] != (*b[k].labels)[i];
      ++total;
    }
  }
  const double rate = static_cast<double>(flips) / total;
  CHECK(rate > 0.1);
  CHECK(rate < 0.3);
}

TEST_CASE("csv round trip preserves features and labels exactly") {
  const auto stream = generate_synthetic_stream(small_config());
  const auto path = tmp_file("roundtrip.csv");
  write_csv_stream(stream, path);
  const auto back = read_csv_stream(path, 60);
  REQUIRE(back.size() == stream.size());
  for (std::size_t k = 0; k < stream.size(); ++k) {
    CHECK(back[k].features == stream[k].features);
    CHECK(*back[k].labels == *stream[k].labels);
    CHECK(back[k].n_classes == 2);
  }
  std::filesystem::remove(path);
}

TEST_CASE("csv reader drops the partial trailing chunk") {
  const auto stream = generate_synthetic_stream(small_config());
  const auto path = tmp_file("partial.csv");
  write_csv_stream(stream, path);
  const auto back = read_csv_stream(path, 100);  // 24*60 = 1440 -> 14 chunks
  CHECK(back.size() == 14);
  std::filesystem::remove(path);
}

TEST_CASE("csv reader maps non-numeric labels by first appearance") {
  const auto path = tmp_file("textlabels.csv");
  std::ofstream(path) << "f0,label\n1.0,pos\n2.0,neg\n3.0,pos\n4.0,neg\n";
  const auto chunks = read_csv_stream(path, 2);
  REQUIRE(chunks.size() == 2);
  CHECK(*chunks[0].labels == std::vector<int>{0, 1});
  CHECK(*chunks[1].labels == std::vector<int>{0, 1});
  std::filesystem::remove(path);
}

TEST_CASE("csv reader reports the offending row") {
  const auto path = tmp_file("badrow.csv");
  std::ofstream(path) << "f0,label\n1.0,0\nnot_a_number,1\n";
  CHECK_THROWS_WITH_AS(read_csv_stream(path, 1),
                       doctest::Contains("row 3"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects single-class streams") {
  const auto path = tmp_file("oneclass.csv");
  std::ofstream(path) << "f0,label\n1.0,0\n2.0,0\n";
  CHECK_THROWS_AS(read_csv_stream(path, 1), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("chunk subset keeps row order and labels") {
  const auto stream = generate_synthetic_stream(small_config());
  const std::vector<std::size_t> idx = {3, 7, 11};
  const auto sub = stream[0].subset(idx);
  REQUIRE(sub.size() == 3);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t f = 0; f < sub.n_features(); ++f)
      CHECK(sub.features(i, f) == stream[0].features(idx[i], f));
    CHECK((*sub.labels)[i] == (*stream[0].labels)[idx[i]]);
  }
}

TEST_CASE("semisynthetic transforms bound projected data to [0,1]") {
  StreamConfig cfg;
  cfg.n_chunks = 9;
  cfg.chunk_size = 40;
  cfg.n_features = 2;
  cfg.n_drifts = 2;
  cfg.label_noise = 0.0;
  cfg.seed = 5;

  DataChunk dataset;
  dataset.n_classes = 2;
  dataset.features = Matrix(100, 5);
  dataset.labels = std::vector<int>(100);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 2.0);
  for (auto& v : dataset.features.data()) v = g(rng);
  for (std::size_t i = 0; i < 100; ++i) (*dataset.labels)[i] = i % 2;

  const auto transforms =
      semisynthetic_transforms(dataset, cfg, Interpolation::kNearest);
  REQUIRE(transforms.size() == 9);
  // Anchor chunks project the dataset inside the normalized unit box.
  for (int k : {0, 4, 8}) {
    const auto& t = transforms[k];
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const auto x = dataset.features.row(r);
      for (int j = 0; j < cfg.n_features; ++j) {
        double y = t.offset[j];
        for (std::size_t c = 0; c < 5; ++c) y += x[c] * t.weights(c, j);
        CHECK(y >= -1e-9);
        CHECK(y <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("nearest interpolation holds each anchor between midpoints") {
  StreamConfig cfg;
  cfg.n_chunks = 9;
  cfg.chunk_size = 10;
  cfg.n_features = 2;
  cfg.n_drifts = 2;  // anchors at chunks 0, 4, 8
  cfg.seed = 5;

  DataChunk dataset;
  dataset.n_classes = 2;
  dataset.features = Matrix(50, 4);
  dataset.labels = std::vector<int>(50);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : dataset.features.data()) v = g(rng);
  for (std::size_t i = 0; i < 50; ++i) (*dataset.labels)[i] = i % 2;

  const auto t = semisynthetic_transforms(dataset, cfg, Interpolation::kNearest);
  CHECK(t[1].weights == t[0].weights);
  CHECK(t[3].weights == t[4].weights);
  CHECK(t[5].weights == t[4].weights);
  CHECK(t[7].weights == t[8].weights);
  CHECK_FALSE(t[0].weights == t[4].weights);
}

TEST_CASE("cubic interpolation passes through anchors and stays clamped") {
  StreamConfig cfg;
  cfg.n_chunks = 9;
  cfg.chunk_size = 10;
  cfg.n_features = 2;
  cfg.n_drifts = 2;  // anchor positions 0, 4, 8 (exact integers)
  cfg.seed = 5;

  DataChunk dataset;
  dataset.n_classes = 2;
  dataset.features = Matrix(50, 4);
  dataset.labels = std::vector<int>(50);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : dataset.features.data()) v = g(rng);
  for (std::size_t i = 0; i < 50; ++i) (*dataset.labels)[i] = i % 2;

  const auto nearest =
      semisynthetic_transforms(dataset, cfg, Interpolation::kNearest);
  const auto cubic =
      semisynthetic_transforms(dataset, cfg, Interpolation::kCubic);
  // At anchor chunks the spline interpolates the anchor map.
  for (int k : {0, 4, 8}) {
    for (std::size_t e = 0; e < cubic[k].weights.data().size(); ++e)
      CHECK(cubic[k].weights.data()[e] ==
            doctest::Approx(nearest[k].weights.data()[e]).epsilon(1e-9));
  }
  // Between anchors every entry stays within the anchor range (clamped) and
  // intermediate maps differ from both neighbors.
  for (std::size_t e = 0; e < cubic[2].weights.data().size(); ++e) {
    const double lo = std::min({nearest[0].weights.data()[e],
                                nearest[4].weights.data()[e],
                                nearest[8].weights.data()[e]});
    const double hi = std::max({nearest[0].weights.data()[e],
                                nearest[4].weights.data()[e],
                                nearest[8].weights.data()[e]});
    for (int k = 0; k < cfg.n_chunks; ++k) {
      CHECK(cubic[k].weights.data()[e] >= lo - 1e-12);
      CHECK(cubic[k].weights.data()[e] <= hi + 1e-12);
    }
  }
}

TEST_CASE("semisynthetic stream sampling is interpolation-agnostic") {
  StreamConfig cfg;
  cfg.n_chunks = 5;
  cfg.chunk_size = 30;
  cfg.n_features = 2;
  cfg.n_drifts = 1;
  cfg.label_noise = 0.0;
  cfg.seed = 9;

  DataChunk dataset;
  dataset.n_classes = 2;
  dataset.features = Matrix(80, 3);
  dataset.labels = std::vector<int>(80);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : dataset.features.data()) v = g(rng);
  for (std::size_t i = 0; i < 80; ++i) (*dataset.labels)[i] = i % 2;

  const auto a =
      generate_semisynthetic_stream(dataset, cfg, Interpolation::kNearest);
  const auto b =
      generate_semisynthetic_stream(dataset, cfg, Interpolation::kCubic);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    CHECK(*a[k].labels == *b[k].labels);  // same rows drawn, only maps differ
}
