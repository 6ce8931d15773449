#include "awae/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "awae/errors.hpp"

namespace awae {

namespace {

constexpr std::uint64_t kNoiseSeedSalt = 0x9E3779B97F4A7C15ull;

// Class-conditional Gaussian concept: one unit-covariance cluster per class.
struct Concept {
  Matrix class_means;  // n_classes x n_features
};

std::vector<Concept> draw_concepts(int count, int n_classes, int n_features,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean_dist(-3.0, 3.0);
  std::vector<Concept> concepts(count);
  for (auto& c : concepts) {
    c.class_means = Matrix(n_classes, n_features);
    for (auto& v : c.class_means.data()) v = mean_dist(rng);
  }
  return concepts;
}

// Center chunk index of transition j (0-based transitions).
int transition_center(const StreamConfig& cfg, int j) {
  return static_cast<int>(std::lround(static_cast<double>(j + 1) *
                                      cfg.n_chunks / (cfg.n_drifts + 1)));
}

// Blend of transition j at chunk k: 0 before, 1 after, linear inside the
// window for incremental/gradual, step for sudden.
double transition_blend(const StreamConfig& cfg, int j, int k) {
  const int center = transition_center(cfg, j);
  if (cfg.drift_type == DriftType::kSudden) return k >= center ? 1.0 : 0.0;
  const int w = transition_window(cfg);
  const int start = center - w / 2;
  if (k < start) return 0.0;
  if (k >= start + w) return 1.0;
  return static_cast<double>(k - start + 1) / (w + 1);
}

// Balanced per-chunk label sequence, shuffled.
std::vector<int> balanced_labels(int chunk_size, int n_classes,
                                 std::mt19937_64& rng) {
  std::vector<int> labels;
  labels.reserve(chunk_size);
  const int base = chunk_size / n_classes;
  const int rem = chunk_size % n_classes;
  for (int c = 0; c < n_classes; ++c) {
    const int count = base + (c < rem ? 1 : 0);
    labels.insert(labels.end(), count, c);
  }
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

void apply_label_noise(std::vector<DataChunk>& chunks, double noise,
                       int n_classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ kNoiseSeedSalt);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> other(0, n_classes - 2);
  for (auto& chunk : chunks) {
    for (auto& label : *chunk.labels) {
      const double u = coin(rng);
      if (u < noise) {
        int repl = other(rng);
        if (repl >= label) ++repl;
        label = repl;
      }
    }
  }
}

// Natural cubic spline through (xs, ys); returns second derivatives.
std::vector<double> spline_second_derivatives(const std::vector<double>& xs,
                                              const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a[i] = (xs[i] - xs[i - 1]) / 6.0;
    b[i] = (xs[i + 1] - xs[i - 1]) / 3.0;
    c[i] = (xs[i + 1] - xs[i]) / 6.0;
    d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) -
           (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
  }
  // Thomas algorithm on the interior unknowns.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double f = a[i] / b[i - 1];
    b[i] -= f * c[i - 1];
    d[i] -= f * d[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (d[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
    if (i == 1) break;
  }
  return m;
}

double spline_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<double>& m, double x) {
  const std::size_t n = xs.size();
  if (n == 1) return ys[0];
  std::size_t i = 0;
  while (i + 2 < n && x > xs[i + 1]) ++i;
  const double h = xs[i + 1] - xs[i];
  const double t = (xs[i + 1] - x) / h;
  const double u = (x - xs[i]) / h;
  return t * ys[i] + u * ys[i + 1] +
         ((t * t * t - t) * m[i] + (u * u * u - u) * m[i + 1]) * h * h / 6.0;
}

struct ParsedCsv {
  Matrix features;
  std::vector<int> labels;
  int n_classes = 0;
};

ParsedCsv parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stream file: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty stream file: " + path.string());

  ParsedCsv out;
  std::vector<std::string> label_strings;
  std::map<std::string, int> first_seen;
  std::vector<double> row_buf;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    row_buf.clear();
    std::size_t start = 0;
    std::vector<std::string> cells;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() < 2)
      throw ParseError("row " + std::to_string(line_no) +
                       ": expected features and a label column");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      const std::string& cell = cells[i];
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("row " + std::to_string(line_no) +
                         ": non-numeric feature cell '" + cell + "'");
      row_buf.push_back(value);
    }
    out.features.append_row(row_buf);
    const std::string& label = cells.back();
    auto [it, inserted] =
        first_seen.emplace(label, static_cast<int>(first_seen.size()));
    out.labels.push_back(it->second);
    label_strings.push_back(label);
  }
  out.n_classes = static_cast<int>(first_seen.size());
  if (out.n_classes < 2)
    throw ConfigError("stream in " + path.string() +
                      " has fewer than 2 distinct labels");

  // When labels are already the dense index set {0..M-1}, keep their numeric
  // values so write/read round-trips preserve labels exactly.
  bool numeric_dense = true;
  for (const auto& [text, idx] : first_seen) {
    long value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 0 ||
        value >= out.n_classes) {
      numeric_dense = false;
      break;
    }
  }
  if (numeric_dense) {
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      long value = 0;
      std::from_chars(label_strings[i].data(),
                      label_strings[i].data() + label_strings[i].size(), value);
      out.labels[i] = static_cast<int>(value);
    }
  }
  return out;
}

}  // namespace

std::string to_string(DriftType t) {
  switch (t) {
    case DriftType::kSudden: return "sudden";
    case DriftType::kGradual: return "gradual";
    case DriftType::kIncremental: return "incremental";
  }
  return "sudden";
}

DriftType drift_type_from_string(const std::string& s) {
  if (s == "sudden") return DriftType::kSudden;
  if (s == "gradual") return DriftType::kGradual;
  if (s == "incremental") return DriftType::kIncremental;
  throw ConfigError("unknown drift_type: " + s);
}

Interpolation interpolation_from_string(const std::string& s) {
  if (s == "nearest") return Interpolation::kNearest;
  if (s == "cubic") return Interpolation::kCubic;
  throw ConfigError("unknown interpolation: " + s);
}

DataChunk DataChunk::subset(std::span<const std::size_t> idx) const {
  if (!labels) throw StateError("subset of an unlabeled chunk");
  DataChunk out;
  out.index = index;
  out.n_classes = n_classes;
  out.features = features.select_rows(idx);
  std::vector<int> sub_labels;
  sub_labels.reserve(idx.size());
  for (auto i : idx) sub_labels.push_back((*labels)[i]);
  out.labels = std::move(sub_labels);
  return out;
}

void StreamConfig::validate() const {
  if (n_chunks < 1) throw ConfigError("n_chunks must be positive");
  if (chunk_size < 1) throw ConfigError("chunk_size must be positive");
  if (n_features < 1) throw ConfigError("n_features must be positive");
  if (n_drifts < 0) throw ConfigError("n_drifts must be non-negative");
  if (n_drifts >= n_chunks) throw ConfigError("n_drifts must be < n_chunks");
  if (label_noise < 0.0 || label_noise > 1.0)
    throw ConfigError("label_noise must be in [0,1]");
  if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
}

int transition_window(const StreamConfig& config) {
  if (config.n_drifts == 0) return 0;
  return static_cast<int>(std::ceil(static_cast<double>(config.n_chunks) /
                                    (2.0 * config.n_drifts)));
}

double transition_blend_at(const StreamConfig& config, int transition,
                           int chunk_index) {
  return transition_blend(config, transition, chunk_index);
}

double blend_at(const StreamConfig& config, int chunk_index) {
  double blend = 0.0;
  for (int j = 0; j < config.n_drifts; ++j) {
    const double b = transition_blend(config, j, chunk_index);
    if (b > 0.0 && b < 1.0) return b;
    if (b == 1.0) blend = 0.0;  // past this transition, next concept is base
  }
  return blend;
}

std::vector<DataChunk> generate_synthetic_stream(const StreamConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const auto concepts = draw_concepts(config.n_drifts + 1, config.n_classes,
                                      config.n_features, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<DataChunk> chunks;
  chunks.reserve(config.n_chunks);
  for (int k = 0; k < config.n_chunks; ++k) {
    // Locate the governing transition at this chunk.
    int completed = 0;
    double blend = 0.0;
    for (int j = 0; j < config.n_drifts; ++j) {
      const double b = transition_blend(config, j, k);
      if (b == 1.0) {
        completed = j + 1;
      } else if (b > 0.0) {
        blend = b;
        break;
      } else {
        break;
      }
    }
    const Concept& from = concepts[completed];
    const Concept& to = concepts[std::min(completed + 1, config.n_drifts)];

    DataChunk chunk;
    chunk.index = k;
    chunk.n_classes = config.n_classes;
    chunk.labels = balanced_labels(config.chunk_size, config.n_classes, rng);
    chunk.features = Matrix(config.chunk_size, config.n_features);
    for (int i = 0; i < config.chunk_size; ++i) {
      const int label = (*chunk.labels)[i];
      auto row = chunk.features.row(i);
      if (blend == 0.0) {
        for (int f = 0; f < config.n_features; ++f)
          row[f] = from.class_means(label, f) + noise(rng);
      } else if (config.drift_type == DriftType::kGradual) {
        const Concept& src = coin(rng) < blend ? to : from;
        for (int f = 0; f < config.n_features; ++f)
          row[f] = src.class_means(label, f) + noise(rng);
      } else {  // incremental: steady progression between the concepts
        for (int f = 0; f < config.n_features; ++f) {
          const double mean = (1.0 - blend) * from.class_means(label, f) +
                              blend * to.class_means(label, f);
          row[f] = mean + noise(rng);
        }
      }
    }
    chunks.push_back(std::move(chunk));
  }

  if (config.label_noise > 0.0)
    apply_label_noise(chunks, config.label_noise, config.n_classes,
                      config.seed);
  return chunks;
}

std::vector<ProjectionTransform> semisynthetic_transforms(
    const DataChunk& dataset, const StreamConfig& config,
    Interpolation interpolation) {
  if (!dataset.has_labels())
    throw StateError("semi-synthetic generation requires a labeled dataset");
  config.validate();
  if (static_cast<std::size_t>(config.n_features) > dataset.n_features())
    throw ConfigError("n_features exceeds dataset feature count");

  const std::size_t d = dataset.n_features();
  const std::size_t f = static_cast<std::size_t>(config.n_features);
  const int versions = config.n_drifts + 1;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<ProjectionTransform> anchors(versions);
  for (auto& anchor : anchors) {
    Matrix p(d, f);
    for (auto& v : p.data()) v = gauss(rng);
    for (std::size_t j = 0; j < f; ++j) {
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) norm += p(i, j) * p(i, j);
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (std::size_t i = 0; i < d; ++i) p(i, j) /= norm;
    }
    // Min-max normalization of the projected dataset, folded into the
    // transform so interpolation acts on the full affine map.
    std::vector<double> lo(f, std::numeric_limits<double>::infinity());
    std::vector<double> hi(f, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const auto x = dataset.features.row(r);
      for (std::size_t j = 0; j < f; ++j) {
        double y = 0.0;
        for (std::size_t i = 0; i < d; ++i) y += x[i] * p(i, j);
        lo[j] = std::min(lo[j], y);
        hi[j] = std::max(hi[j], y);
      }
    }
    anchor.weights = Matrix(d, f);
    anchor.offset.assign(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      const double range = hi[j] - lo[j];
      const double scale = range > 0.0 ? 1.0 / range : 0.0;
      for (std::size_t i = 0; i < d; ++i)
        anchor.weights(i, j) = p(i, j) * scale;
      anchor.offset[j] = range > 0.0 ? -lo[j] * scale : 0.5;
    }
  }

  // Anchor positions along the chunk axis.
  std::vector<double> positions(versions);
  for (int v = 0; v < versions; ++v)
    positions[v] = config.n_drifts == 0
                       ? 0.0
                       : static_cast<double>(v) * (config.n_chunks - 1) /
                             config.n_drifts;

  std::vector<ProjectionTransform> per_chunk(config.n_chunks);
  if (interpolation == Interpolation::kNearest || versions == 1) {
    for (int k = 0; k < config.n_chunks; ++k) {
      int best = 0;
      for (int v = 1; v < versions; ++v)
        if (std::abs(k - positions[v]) < std::abs(k - positions[best]))
          best = v;
      per_chunk[k] = anchors[best];
    }
    return per_chunk;
  }

  // Cubic: one natural spline per affine-map entry, clamped to the anchor
  // range of that entry.
  const std::size_t n_entries = d * f + f;
  std::vector<double> ys(versions);
  for (int k = 0; k < config.n_chunks; ++k) {
    per_chunk[k].weights = Matrix(d, f);
    per_chunk[k].offset.assign(f, 0.0);
  }
  for (std::size_t e = 0; e < n_entries; ++e) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < versions; ++v) {
      const double y = e < d * f ? anchors[v].weights.data()[e]
                                 : anchors[v].offset[e - d * f];
      ys[v] = y;
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    const auto m = spline_second_derivatives(positions, ys);
    for (int k = 0; k < config.n_chunks; ++k) {
      double y = spline_eval(positions, ys, m, static_cast<double>(k));
      y = std::clamp(y, lo, hi);
      if (e < d * f)
        per_chunk[k].weights.data()[e] = y;
      else
        per_chunk[k].offset[e - d * f] = y;
    }
  }
  return per_chunk;
}

std::vector<DataChunk> generate_semisynthetic_stream(
    const DataChunk& dataset, const StreamConfig& config,
    Interpolation interpolation) {
  const auto transforms =
      semisynthetic_transforms(dataset, config, interpolation);

  // Continue the generator stream past the anchor draws so instance sampling
  // stays aligned between interpolation modes.
  std::mt19937_64 rng(config.seed ^ 0xA5A5A5A5A5A5A5A5ull);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);

  const std::size_t d = dataset.n_features();
  const std::size_t f = static_cast<std::size_t>(config.n_features);
  std::vector<DataChunk> chunks;
  chunks.reserve(config.n_chunks);
  for (int k = 0; k < config.n_chunks; ++k) {
    const auto& t = transforms[k];
    DataChunk chunk;
    chunk.index = k;
    chunk.n_classes = dataset.n_classes;
    chunk.features = Matrix(config.chunk_size, f);
    chunk.labels = std::vector<int>(config.chunk_size);
    for (int i = 0; i < config.chunk_size; ++i) {
      const std::size_t r = pick(rng);
      (*chunk.labels)[i] = (*dataset.labels)[r];
      const auto x = dataset.features.row(r);
      auto row = chunk.features.row(i);
      for (std::size_t j = 0; j < f; ++j) {
        double y = t.offset[j];
        for (std::size_t c = 0; c < d; ++c) y += x[c] * t.weights(c, j);
        row[j] = y;
      }
    }
    chunks.push_back(std::move(chunk));
  }
  if (config.label_noise > 0.0)
    apply_label_noise(chunks, config.label_noise, dataset.n_classes,
                      config.seed);
  return chunks;
}

std::vector<DataChunk> read_csv_stream(const std::filesystem::path& path,
                                       std::size_t chunk_size) {
  if (chunk_size == 0) throw ConfigError("chunk_size must be positive");
  ParsedCsv parsed = parse_csv(path);
  const std::size_t n_chunks = parsed.features.rows() / chunk_size;
  std::vector<DataChunk> chunks;
  chunks.reserve(n_chunks);
  std::vector<std::size_t> idx(chunk_size);
  for (std::size_t k = 0; k < n_chunks; ++k) {
    std::iota(idx.begin(), idx.end(), k * chunk_size);
    DataChunk chunk;
    chunk.index = static_cast<int>(k);
    chunk.n_classes = parsed.n_classes;
    chunk.features = parsed.features.select_rows(idx);
    chunk.labels = std::vector<int>(parsed.labels.begin() + k * chunk_size,
                                    parsed.labels.begin() +
                                        (k + 1) * chunk_size);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

void write_csv_stream(const std::vector<DataChunk>& chunks,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stream file: " + path.string());
  if (chunks.empty()) {
    out << "label\n";
    return;
  }
  const std::size_t d = chunks.front().n_features();
  const int m = chunks.front().n_classes;
  for (const auto& chunk : chunks) {
    if (chunk.n_features() != d || chunk.n_classes != m)
      throw ShapeError("chunks disagree on feature count or class count");
    if (!chunk.has_labels())
      throw StateError("cannot write an unlabeled chunk to a stream file");
  }
  for (std::size_t j = 0; j < d; ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[64];
  for (const auto& chunk : chunks) {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const auto row = chunk.features.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
        out << buf << ',';
      }
      out << (*chunk.labels)[i] << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace awae
