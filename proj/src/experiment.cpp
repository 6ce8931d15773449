#include "awae/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "awae/errors.hpp"

namespace awae {

namespace {

using nlohmann::json;

StreamConfig parse_stream_config(const json& j) {
  StreamConfig cfg;
  cfg.n_chunks = j.value("n_chunks", cfg.n_chunks);
  cfg.chunk_size = j.value("chunk_size", cfg.chunk_size);
  cfg.n_features = j.value("n_features", cfg.n_features);
  cfg.n_drifts = j.value("n_drifts", cfg.n_drifts);
  if (j.contains("drift_type"))
    cfg.drift_type = drift_type_from_string(j.at("drift_type"));
  cfg.label_noise = j.value("label_noise", cfg.label_noise);
  cfg.n_classes = j.value("n_classes", cfg.n_classes);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

StreamSpec parse_stream_spec(const json& j) {
  StreamSpec spec;
  const std::string type = j.value("type", "synthetic");
  if (type == "synthetic") {
    spec.kind = StreamSpec::Kind::kSynthetic;
    spec.synthetic = parse_stream_config(j);
  } else if (type == "semisynthetic") {
    spec.kind = StreamSpec::Kind::kSemiSynthetic;
    spec.synthetic = parse_stream_config(j);
    if (!j.contains("dataset"))
      throw ConfigError("semisynthetic stream needs a 'dataset' path");
    spec.dataset_path = j.at("dataset").get<std::string>();
    spec.interpolation =
        interpolation_from_string(j.value("interpolation", "nearest"));
  } else if (type == "csv") {
    spec.kind = StreamSpec::Kind::kCsv;
    if (!j.contains("path")) throw ConfigError("csv stream needs a 'path'");
    spec.csv_path = j.at("path").get<std::string>();
    spec.csv_chunk_size = j.value("chunk_size", spec.csv_chunk_size);
  } else {
    throw ConfigError("unknown stream type: " + type);
  }
  if (spec.kind == StreamSpec::Kind::kSemiSynthetic &&
      !std::filesystem::exists(spec.dataset_path))
    throw ConfigError("missing stream file: " + spec.dataset_path.string());
  if (spec.kind == StreamSpec::Kind::kCsv &&
      !std::filesystem::exists(spec.csv_path))
    throw ConfigError("missing stream file: " + spec.csv_path.string());
  return spec;
}

LearnerConfig parse_learner_config(const json& j) {
  LearnerConfig cfg;
  cfg.gnb_var_smoothing = j.value("gnb_var_smoothing", cfg.gnb_var_smoothing);
  cfg.ht_grace_period = j.value("ht_grace_period", cfg.ht_grace_period);
  cfg.ht_split_confidence =
      j.value("ht_split_confidence", cfg.ht_split_confidence);
  cfg.mlp_hidden = j.value("mlp_hidden", cfg.mlp_hidden);
  cfg.mlp_max_iter = j.value("mlp_max_iter", cfg.mlp_max_iter);
  cfg.mlp_learning_rate = j.value("mlp_learning_rate", cfg.mlp_learning_rate);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

AwaeConfig parse_awae_config(const json& j) {
  AwaeConfig cfg;
  cfg.capacity = j.value("capacity", cfg.capacity);
  cfg.pre_pruning = j.value("pre_pruning", cfg.pre_pruning);
  cfg.post_pruning = j.value("post_pruning", cfg.post_pruning);
  if (j.contains("weighting"))
    cfg.weighting = weighting_from_string(j.at("weighting"));
  if (j.contains("aging")) cfg.aging = aging_from_string(j.at("aging"));
  cfg.theta = j.value("theta", cfg.theta);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.xi = j.value("xi", cfg.xi);
  cfg.rejuvenation_power =
      j.value("rejuvenation_power", cfg.rejuvenation_power);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.rejuvenation_enabled =
      j.value("rejuvenation", cfg.rejuvenation_enabled);
  cfg.validate();
  return cfg;
}

MethodFactoryArgs parse_method(const json& j) {
  MethodFactoryArgs args;
  args.method = j.at("method").get<std::string>();
  args.learner = learner_kind_from_string(j.value("learner", "gnb"));
  if (j.contains("learner_config"))
    args.learner_config = parse_learner_config(j.at("learner_config"));
  if (j.contains("awae")) args.awae = parse_awae_config(j.at("awae"));
  args.capacity = j.value("capacity", args.capacity);
  args.awae.capacity = j.value("capacity", args.awae.capacity);
  return args;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
}

std::filesystem::path resolve_output_dir(std::string dir) {
  std::filesystem::path p(dir);
  const char* root = std::getenv("AWAE_OUTPUT_ROOT");
  if (p.is_relative() && root != nullptr && *root != '\0')
    return std::filesystem::path(root) / p;
  return p;
}

void write_records_csv(std::ostream& os, const RunResult& run) {
  char buf[512];
  for (const auto& r : run.records) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%s,%s,%llu,%d,%.17g,%.17g,%.17g,%zu,%.17g\n",
                  run.run_id.c_str(), run.method.c_str(), run.learner.c_str(),
                  run.drift_type.c_str(),
                  static_cast<unsigned long long>(run.seed), r.chunk,
                  r.accuracy, r.balanced_accuracy, r.labeled_fraction,
                  r.pool_size, r.wall_time_ms);
    os << buf;
  }
}

struct ResultRow {
  std::string run_id, method, learner, drift_type;
  std::uint64_t seed = 0;
  int chunk = 0;
  double accuracy = 0.0, balanced_accuracy = 0.0, labeled_fraction = 0.0;
  std::size_t pool_size = 0;
  double wall_time_ms = 0.0;
};

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open results file: " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    ResultRow row;
    std::getline(ss, row.run_id, ',');
    std::getline(ss, row.method, ',');
    std::getline(ss, row.learner, ',');
    std::getline(ss, row.drift_type, ',');
    std::getline(ss, cell, ',');
    row.seed = std::stoull(cell);
    std::getline(ss, cell, ',');
    row.chunk = std::stoi(cell);
    std::getline(ss, cell, ',');
    row.accuracy = std::stod(cell);
    std::getline(ss, cell, ',');
    row.balanced_accuracy = std::stod(cell);
    std::getline(ss, cell, ',');
    row.labeled_fraction = std::stod(cell);
    std::getline(ss, cell, ',');
    row.pool_size = std::stoul(cell);
    std::getline(ss, cell, ',');
    row.wall_time_ms = std::stod(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

bool is_synthetic_drift(const std::string& drift) {
  return drift == "sudden" || drift == "gradual" || drift == "incremental";
}

}  // namespace

std::string StreamSpec::drift_label() const {
  switch (kind) {
    case Kind::kSynthetic: return to_string(synthetic.drift_type);
    case Kind::kSemiSynthetic:
      return interpolation == Interpolation::kNearest ? "semi-nearest"
                                                      : "semi-cubic";
    case Kind::kCsv: return "csv";
  }
  return "csv";
}

StreamSpec load_stream_spec(const std::filesystem::path& path) {
  const json j = load_json(path);
  return parse_stream_spec(j.contains("stream") ? j.at("stream") : j);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const json j = load_json(path);
  ExperimentConfig cfg;
  if (!j.contains("stream")) throw ConfigError("config missing 'stream'");
  cfg.stream = parse_stream_spec(j.at("stream"));
  if (!j.contains("methods") || j.at("methods").empty())
    throw ConfigError("config needs at least one method");
  for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m));
  if (j.contains("labeling")) {
    const auto& lab = j.at("labeling");
    const std::string mode = lab.value("mode", "full");
    if (mode == "full") {
      cfg.full_labeling = true;
    } else if (mode == "bals") {
      cfg.full_labeling = false;
      cfg.bals.threshold = lab.value("threshold", cfg.bals.threshold);
      cfg.bals.budget = lab.value("budget", cfg.bals.budget);
      cfg.bals.validate();
    } else {
      throw ConfigError("unknown labeling mode: " + mode);
    }
  }
  if (j.contains("seeds"))
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty()) throw ConfigError("config needs at least one seed");
  cfg.output_dir = resolve_output_dir(j.value("output_dir", "out"));
  cfg.record_timing = j.value("record_timing", false);
  cfg.workers = j.value("workers", 1);
  return cfg;
}

std::vector<DataChunk> build_stream(const StreamSpec& spec,
                                    std::uint64_t seed) {
  switch (spec.kind) {
    case StreamSpec::Kind::kSynthetic: {
      StreamConfig cfg = spec.synthetic;
      cfg.seed = seed;
      return generate_synthetic_stream(cfg);
    }
    case StreamSpec::Kind::kSemiSynthetic: {
      StreamConfig cfg = spec.synthetic;
      cfg.seed = seed;
      // chunk size 1 keeps every row (larger sizes drop the partial tail)
      const auto whole = read_csv_stream(spec.dataset_path, 1);
      if (whole.empty())
        throw ConfigError("semisynthetic dataset is empty: " +
                          spec.dataset_path.string());
      DataChunk dataset;
      dataset.n_classes = whole.front().n_classes;
      dataset.features = Matrix(0, whole.front().n_features());
      dataset.labels = std::vector<int>{};
      for (const auto& c : whole) {
        dataset.features.append_row(c.features.row(0));
        dataset.labels->push_back((*c.labels)[0]);
      }
      return generate_semisynthetic_stream(dataset, cfg, spec.interpolation);
    }
    case StreamSpec::Kind::kCsv:
      return read_csv_stream(spec.csv_path, spec.csv_chunk_size);
  }
  throw ConfigError("unknown stream kind");
}

std::string run_id_for(const MethodFactoryArgs& method, std::uint64_t seed) {
  return method.method + "-" + to_string(method.learner) + "-s" +
         std::to_string(seed);
}

namespace {

RunResult execute_run(const ExperimentConfig& config,
                      const MethodFactoryArgs& method_args,
                      std::uint64_t seed) {
  RunResult result;
  result.run_id = run_id_for(method_args, seed);
  result.method = method_args.method;
  result.learner = to_string(method_args.learner);
  result.drift_type = config.stream.drift_label();
  result.seed = seed;
  try {
    const auto stream = build_stream(config.stream, seed);
    MethodFactoryArgs args = method_args;
    args.learner_config.seed = seed;
    auto method = make_method(args);
    RunOptions options;
    options.full_labeling = config.full_labeling;
    options.bals = config.bals;
    options.bals.seed = seed;
    options.record_timing = config.record_timing;
    result.records = run_test_then_train(stream, *method, options);

    std::filesystem::create_directories(config.output_dir / "runs");
    std::ofstream snap(config.output_dir / "runs" / (result.run_id + ".dfp"),
                       std::ios::binary);
    save_snapshot(*method, snap);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, bool force) {
  std::filesystem::create_directories(config.output_dir / "runs");

  struct Task {
    MethodFactoryArgs method;
    std::uint64_t seed;
    std::filesystem::path shard;
    bool cached;
  };
  std::vector<Task> tasks;
  for (const auto& method : config.methods) {
    for (const auto seed : config.seeds) {
      Task task{method, seed,
                config.output_dir / "runs" /
                    (run_id_for(method, seed) + ".csv"),
                false};
      task.cached = !force && std::filesystem::exists(task.shard);
      tasks.push_back(std::move(task));
    }
  }

  int failures = 0;
  std::mutex mutex;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (next >= tasks.size()) return;
        i = next++;
      }
      const Task& task = tasks[i];
      if (task.cached) continue;
      const RunResult result = execute_run(config, task.method, task.seed);
      if (result.failed) {
        std::lock_guard lock(mutex);
        ++failures;
        std::ofstream err(task.shard.string() + ".failed");
        err << result.error << "\n";
        continue;
      }
      std::ofstream shard(task.shard);
      shard << kResultsHeader << "\n";
      write_records_csv(shard, result);
    }
  };

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Deterministic merge in grid order.
  std::ofstream merged(config.output_dir / "results.csv");
  if (!merged)
    throw IoError("cannot write " +
                  (config.output_dir / "results.csv").string());
  merged << kResultsHeader << "\n";
  for (const Task& task : tasks) {
    std::ifstream shard(task.shard);
    if (!shard) continue;
    std::string line;
    std::getline(shard, line);  // skip shard header
    while (std::getline(shard, line))
      if (!line.empty()) merged << line << "\n";
  }
  return failures;
}

int write_report(const std::filesystem::path& results_csv,
                 const std::filesystem::path& out_dir,
                 const ReportOptions& options) {
  const auto rows = read_results(results_csv);
  if (rows.empty()) return 3;
  std::filesystem::create_directories(out_dir / "curves");

  // Per-run curves.
  std::map<std::string, std::vector<const ResultRow*>> by_run;
  std::vector<std::string> run_order;
  for (const auto& row : rows) {
    auto [it, inserted] = by_run.try_emplace(row.run_id);
    if (inserted) run_order.push_back(row.run_id);
    it->second.push_back(&row);
  }
  for (const auto& run_id : run_order) {
    std::ofstream curve(out_dir / "curves" / (run_id + ".csv"));
    curve << "chunk,cumulative_mean_accuracy\n";
    double sum = 0.0;
    std::size_t count = 0;
    char buf[64];
    for (const ResultRow* row : by_run[run_id]) {
      sum += row->accuracy;
      ++count;
      std::snprintf(buf, sizeof(buf), "%.17g", sum / count);
      curve << row->chunk << ',' << buf << "\n";
    }
  }

  // Entry = method within a (learner, drift) group, indexed 1.. in order of
  // first appearance, mirroring the comparison-table convention.
  struct Entry {
    std::string method;
    // per-seed score sequences (synthetic streams score by accuracy,
    // everything else by balanced accuracy)
    std::map<std::uint64_t, std::vector<double>> per_seed;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Entry>> groups;
  std::vector<std::pair<std::string, std::string>> group_order;
  for (const auto& row : rows) {
    const auto key = std::make_pair(row.learner, row.drift_type);
    auto it = groups.find(key);
    if (it == groups.end()) {
      it = groups.emplace(key, std::vector<Entry>{}).first;
      group_order.push_back(key);
    }
    auto& entries = it->second;
    auto entry = std::find_if(entries.begin(), entries.end(),
                              [&](const Entry& e) {
                                return e.method == row.method;
                              });
    if (entry == entries.end()) {
      entries.push_back({row.method, {}});
      entry = std::prev(entries.end());
    }
    const double score = is_synthetic_drift(row.drift_type)
                             ? row.accuracy
                             : row.balanced_accuracy;
    entry->per_seed[row.seed].push_back(score);
  }

  std::ofstream table(out_dir / "report.txt");
  std::ofstream comparisons(out_dir / "comparisons.csv");
  comparisons << "learner,drift_type,method_a,method_b,mean_a,mean_b,"
                 "t_statistic,p_value,significant,degenerate\n";

  for (const auto& key : group_order) {
    const auto& entries = groups[key];
    table << "== learner " << key.first << " / stream " << key.second
          << " ==\n";

    // Pairing vectors: per-seed means by default, pooled per-chunk scores
    // averaged over seeds behind the sensitivity flag.
    std::vector<std::vector<double>> paired(entries.size());
    std::vector<double> grand_mean(entries.size(), 0.0);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (options.per_chunk_pairing) {
        std::size_t n_chunks = 0;
        for (const auto& [seed, scores] : entries[e].per_seed)
          n_chunks = std::max(n_chunks, scores.size());
        std::vector<double> acc(n_chunks, 0.0);
        for (const auto& [seed, scores] : entries[e].per_seed)
          for (std::size_t c = 0; c < scores.size(); ++c)
            acc[c] += scores[c] / entries[e].per_seed.size();
        paired[e] = std::move(acc);
      } else {
        for (const auto& [seed, scores] : entries[e].per_seed) {
          double mean = 0.0;
          for (double s : scores) mean += s;
          paired[e].push_back(mean / scores.size());
        }
      }
      for (double s : paired[e]) grand_mean[e] += s;
      grand_mean[e] /= paired[e].empty() ? 1 : paired[e].size();
    }

    for (std::size_t a = 0; a < entries.size(); ++a) {
      std::vector<std::size_t> beaten;
      for (std::size_t b = 0; b < entries.size(); ++b) {
        if (a == b) continue;
        if (paired[a].size() != paired[b].size() || paired[a].size() < 3)
          continue;
        const auto cmp = paired_t_test(paired[a], paired[b]);
        comparisons << key.first << ',' << key.second << ','
                    << entries[a].method << ',' << entries[b].method << ','
                    << cmp.mean_a << ',' << cmp.mean_b << ','
                    << cmp.t_statistic << ',' << cmp.p_value << ','
                    << (cmp.significant ? 1 : 0) << ','
                    << (cmp.degenerate ? 1 : 0) << "\n";
        if (cmp.significant && cmp.mean_a > cmp.mean_b)
          beaten.push_back(b + 1);
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3f", grand_mean[a]);
      table << "(" << a + 1 << ") " << entries[a].method << "  " << buf
            << "  ";
      if (beaten.empty()) {
        table << "-";
      } else {
        for (std::size_t i = 0; i < beaten.size(); ++i)
          table << (i ? ", " : "") << beaten[i];
      }
      table << "\n";
    }
    table << "\n";
  }
  return 0;
}

}  // namespace awae
