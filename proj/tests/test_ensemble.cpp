#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "awae/ensemble.hpp"
#include "awae/errors.hpp"
#include "awae/stream.hpp"
#include "helpers.hpp"

using namespace awae;
using namespace awae::testing;

namespace {

// Independent generalized-diversity oracle: tally simultaneous-failure
// probabilities directly.
// p(1) = E[f]/n and p(2) = E[f(f-1)]/(n(n-1)) over the per-instance failure
// count f; the shared factor 1/(n*instances) cancels in the ratio, so the
// whole statistic reduces to exact integer sums.
double gd_oracle(const std::vector<std::vector<bool>>& correct) {
  const std::size_t n = correct.size();
  const std::size_t instances = correct.front().size();
  long long s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    long long f = 0;
    for (const auto& member : correct) f += member[i] ? 0 : 1;
    s1 += f;
    s2 += f * (f - 1);
  }
  if (s1 == 0) return 1.0;
  return 1.0 - static_cast<double>(s2) /
                   (static_cast<double>(s1) * static_cast<double>(n - 1));
}

}  // namespace

// --- Weighting formulas ---------------------------------------------------

TEST_CASE("same weighting assigns 1/|pool| to every member") {
  auto sp = make_scripted_pool({{0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 0, 0}},
                               {0, 1, 0, 1}, 2);
  compute_weights(sp.pool, sp.x, sp.y, WeightingMethod::kSame, 0.0);
  for (const auto& m : sp.pool.members)
    CHECK(m.weight == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("kuncheva weighting: accuracy 0.8 gives weight 4") {
  // member 0: 4/5 correct; member 1: 2/5; member 2: 5/5 (capped)
  auto sp = make_scripted_pool({{0, 1, 0, 1, 0},
                                {1, 0, 0, 1, 1},
                                {0, 1, 0, 1, 1}},
                               {0, 1, 0, 1, 1}, 2);
  compute_weights(sp.pool, sp.x, sp.y, WeightingMethod::kKuncheva, 0.0);
  CHECK(sp.pool.members[0].weight == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sp.pool.members[1].weight ==
        doctest::Approx(0.6 / 0.4).epsilon(1e-12));
  CHECK(sp.pool.members[2].weight == doctest::Approx(1e6));
}

TEST_CASE("proportional weighting divides by ensemble accuracy") {
  // members vote 50/50 on instance 2, tie falls to class 0 (truth) there.
  auto sp = make_scripted_pool({{0, 1, 0, 1}, {0, 1, 1, 1}},
                               {0, 1, 0, 1}, 2, {1.0, 1.0});
  const double pool_acc = ensemble_accuracy(sp.pool, sp.x, sp.y);
  REQUIRE(pool_acc == doctest::Approx(1.0));
  compute_weights(sp.pool, sp.x, sp.y, WeightingMethod::kProportional, 0.05);
  CHECK(sp.pool.members[0].weight ==
        doctest::Approx(1.0 / pool_acc).epsilon(1e-12));
  CHECK(sp.pool.members[1].weight ==
        doctest::Approx(0.75 / pool_acc).epsilon(1e-12));
}

TEST_CASE("proportional weighting zeroes members below theta") {
  auto sp = make_scripted_pool({{0, 1, 0, 1}, {1, 0, 1, 0}},
                               {0, 1, 0, 1}, 2, {1.0, 1.0});
  compute_weights(sp.pool, sp.x, sp.y, WeightingMethod::kProportional, 0.3);
  CHECK(sp.pool.members[0].weight > 0.0);
  CHECK(sp.pool.members[1].weight == 0.0);  // accuracy 0 -> ratio 0 < theta
}

TEST_CASE("bell weighting follows the gaussian closed form") {
  auto sp = make_scripted_pool({{0, 1, 0, 1}, {0, 1, 1, 1}},
                               {0, 1, 0, 1}, 2, {1.0, 1.0});
  const double pool_acc = ensemble_accuracy(sp.pool, sp.x, sp.y);
  compute_weights(sp.pool, sp.x, sp.y, WeightingMethod::kBell, 0.05);
  const double d0 = pool_acc - 1.0;
  const double d1 = pool_acc - 0.75;
  CHECK(sp.pool.members[0].weight ==
        doctest::Approx(std::exp(-d0 * d0 / 2.0) / std::sqrt(2.0 * M_PI))
            .epsilon(1e-12));
  CHECK(sp.pool.members[1].weight ==
        doctest::Approx(std::exp(-d1 * d1 / 2.0) / std::sqrt(2.0 * M_PI))
            .epsilon(1e-12));
}

// --- Aging ----------------------------------------------------------------

TEST_CASE("constant aging subtracts delta and floors at theta") {
  auto sp = make_scripted_pool({{0}, {0}}, {0}, 2, {0.5, 0.14}, {1, 1});
  apply_aging(sp.pool, sp.x, sp.y, AgingMethod::kConstant, 0.05, 0.1, 0.5);
  CHECK(sp.pool.members[0].weight == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(sp.pool.members[1].weight == 0.0);  // 0.04 < theta -> zeroed
}

TEST_CASE("gaussian aging multiplies by exp(-itter*xi/2)") {
  auto sp = make_scripted_pool({{0}, {0}}, {0}, 2, {0.8, 0.8}, {1, 4});
  apply_aging(sp.pool, sp.x, sp.y, AgingMethod::kGaussian, 0.0, 0.1, 0.5);
  CHECK(sp.pool.members[0].weight ==
        doctest::Approx(0.8 * std::exp(-1.0 * 0.5 / 2.0)).epsilon(1e-12));
  CHECK(sp.pool.members[1].weight ==
        doctest::Approx(0.8 * std::exp(-4.0 * 0.5 / 2.0)).epsilon(1e-12));
}

TEST_CASE("proportional aging rescales accuracy by sqrt(residence)") {
  // member 0 is 100% correct, residence 4; member 1 is 50% correct,
  // residence 1
  auto sp = make_scripted_pool({{0, 1}, {0, 0}}, {0, 1}, 2, {0.3, 0.3},
                               {4, 1});
  apply_aging(sp.pool, sp.x, sp.y, AgingMethod::kProportional, 0.0, 0.1, 0.5);
  CHECK(sp.pool.members[0].weight ==
        doctest::Approx(1.0 / std::sqrt(4.0)).epsilon(1e-12));
  CHECK(sp.pool.members[1].weight == doctest::Approx(0.5).epsilon(1e-12));
}

// --- Rejuvenation ---------------------------------------------------------

TEST_CASE("rejuvenation rewinds residence only above the mean weight") {
  auto sp = make_scripted_pool({{0}, {0}, {0}}, {0}, 2, {0.9, 0.3, 0.3},
                               {5, 5, 1});
  // mean weight = 0.5; only member 0 qualifies; step = floor(2.0*0.9)=1
  rejuvenate(sp.pool, 2.0);
  CHECK(sp.pool.members[0].residence == 4);
  CHECK(sp.pool.members[1].residence == 5);
  CHECK(sp.pool.members[2].residence == 1);
}

TEST_CASE("rejuvenation step is at least 1 and clamps at zero") {
  auto sp = make_scripted_pool({{0}, {0}}, {0}, 2, {0.4, 0.1}, {0, 3});
  // member 0: step = max(1, floor(2*0.4)) = 1, residence 0 stays 0
  rejuvenate(sp.pool, 2.0);
  CHECK(sp.pool.members[0].residence == 0);
  CHECK(sp.pool.members[1].residence == 3);
}

// --- Generalized diversity ------------------------------------------------

TEST_CASE("generalized diversity matches the counting oracle") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t members = 2 + trial % 5;
    const auto table = random_table(rng, members, 50);
    CHECK(generalized_diversity(table) ==
          doctest::Approx(gd_oracle(table)).epsilon(1e-12));
    const double gd = generalized_diversity(table);
    CHECK(gd >= 0.0);
    CHECK(gd <= 1.0);
  }
}

TEST_CASE("generalized diversity edge cases") {
  // No member ever fails: p(1) = 0 -> defined as 1.
  CHECK(generalized_diversity({{true, true}, {true, true}}) == 1.0);
  // Failures never coincide: p(2) = 0 -> 1.
  CHECK(generalized_diversity(
            {{false, true, true}, {true, false, true}}) == 1.0);
  // All members share every failure -> 0.
  CHECK(generalized_diversity(
            {{false, true, false}, {false, true, false}}) == 0.0);
  // Fewer than two members is undefined.
  CHECK_THROWS_AS(generalized_diversity({{true, false}}), StateError);
}

TEST_CASE("pool-level diversity agrees with the table-level value") {
  auto sp = make_scripted_pool({{0, 1, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}},
                               {0, 1, 0, 1}, 2);
  std::vector<std::vector<bool>> table(3);
  const std::vector<std::vector<int>> preds = {{0, 1, 0, 1},
                                               {1, 1, 0, 0},
                                               {0, 0, 1, 1}};
  for (std::size_t k = 0; k < 3; ++k) {
    table[k].resize(4);
    for (std::size_t i = 0; i < 4; ++i) table[k][i] = preds[k][i] == sp.y[i];
  }
  CHECK(generalized_diversity(sp.pool, sp.x, sp.y) ==
        doctest::Approx(generalized_diversity(table)).epsilon(1e-12));
}

// --- Voting ---------------------------------------------------------------

TEST_CASE("weighted vote picks the heaviest class, ties to lower index") {
  auto sp = make_scripted_pool({{0, 0}, {1, 1}, {1, 0}}, {0, 0}, 2,
                               {0.3, 0.3, 0.4});
  // instance 0: class0=0.3, class1=0.7 -> 1; instance 1: 0.7 vs 0.3 -> 0
  const auto pred = combine_predict(sp.pool, sp.x);
  CHECK(pred[0] == 1);
  CHECK(pred[1] == 0);
  // exact tie 0.5/0.5 goes to class 0
  auto tie = make_scripted_pool({{0}, {1}}, {0}, 2, {0.5, 0.5});
  CHECK(combine_predict(tie.pool, tie.x)[0] == 0);
}

TEST_CASE("scaling all weights leaves the vote unchanged") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> wdist(0.01, 3.0);
  std::uniform_int_distribution<int> cls(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<int>> preds(4, std::vector<int>(12));
    std::vector<double> weights(4);
    for (auto& p : preds)
      for (auto& v : p) v = cls(rng);
    for (auto& w : weights) w = wdist(rng);
    std::vector<int> truth(12, 0);
    auto a = make_scripted_pool(preds, truth, 3, weights);
    std::vector<double> scaled = weights;
    const double factor = wdist(rng);
    for (auto& w : scaled) w *= factor;
    auto b = make_scripted_pool(preds, truth, 3, scaled);
    CHECK(combine_predict(a.pool, a.x) == combine_predict(b.pool, b.x));
  }
}

TEST_CASE("all-zero weights fall back to a uniform vote") {
  auto sp = make_scripted_pool({{1}, {1}, {0}}, {0}, 2, {0.0, 0.0, 0.0});
  CHECK(combine_predict(sp.pool, sp.x)[0] == 1);  // 2-of-3 majority
  const Matrix s = combine_support(sp.pool, sp.x);
  CHECK(s(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

// --- Pruning --------------------------------------------------------------

namespace {

// Exhaustive leave-one-out oracle mirroring the published contract: score
// every size-L subset, keep the best, break ties by removing the member with
// the largest residence.
std::size_t prune_oracle(const std::vector<std::vector<int>>& preds,
                         const std::vector<double>& weights,
                         const std::vector<int>& residences,
                         const std::vector<int>& truth, int n_classes,
                         PruningMode mode, double alpha) {
  const std::size_t L1 = preds.size();
  std::size_t best_removed = 0;
  double best_score = -1e300;
  for (std::size_t r = 0; r < L1; ++r) {
    std::vector<std::size_t> subset;
    for (std::size_t k = 0; k < L1; ++k)
      if (k != r) subset.push_back(k);

    // diversity via direct failure counting
    double diversity = 0.0;
    if (subset.size() >= 2) {
      std::vector<std::vector<bool>> table;
      for (auto k : subset) {
        std::vector<bool> row(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i)
          row[i] = preds[k][i] == truth[i];
        table.push_back(std::move(row));
      }
      diversity = gd_oracle(table);
    }

    double score = diversity;
    if (mode == PruningMode::kPost) {
      // weighted-vote accuracy of the subset
      double wsum = 0.0;
      for (auto k : subset) wsum += weights[k];
      std::size_t hits = 0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        std::vector<double> score_c(n_classes, 0.0);
        for (auto k : subset)
          score_c[preds[k][i]] += wsum > 0.0 ? weights[k] : 1.0;
        int best = 0;
        for (int c = 1; c < n_classes; ++c)
          if (score_c[c] > score_c[best]) best = c;
        hits += best == truth[i];
      }
      const double acc = static_cast<double>(hits) / truth.size();
      score = alpha * acc + (1.0 - alpha) * diversity;
    }
    if (score > best_score ||
        (score == best_score &&
         residences[r] > residences[best_removed])) {
      best_score = score;
      best_removed = r;
    }
  }
  return best_removed;
}

}  // namespace

TEST_CASE("prune matches the exhaustive leave-one-out oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size_dist(2, 6);
  std::uniform_real_distribution<double> wdist(0.0, 1.0);
  std::uniform_int_distribution<int> rdist(1, 8);
  std::bernoulli_distribution correct_coin(0.7);

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = size_dist(rng);
    const std::size_t n = 50;
    std::vector<int> truth(n);
    for (auto& t : truth) t = static_cast<int>(rng() % 2);
    std::vector<std::vector<int>> preds(L + 1, std::vector<int>(n));
    for (auto& p : preds)
      for (std::size_t i = 0; i < n; ++i)
        p[i] = correct_coin(rng) ? truth[i] : 1 - truth[i];
    std::vector<double> weights(L + 1);
    for (auto& w : weights) w = wdist(rng);
    std::vector<int> residences(L + 1);
    for (auto& r : residences) r = rdist(rng);

    for (const auto mode : {PruningMode::kPre, PruningMode::kPost}) {
      for (const double alpha : {0.0, 0.5, 1.0}) {
        auto sp = make_scripted_pool(preds, truth, 2, weights, residences);
        sp.pool.capacity = L;
        const std::size_t removed = prune(sp.pool, sp.x, sp.y, mode, alpha);
        const std::size_t expected = prune_oracle(
            preds, weights, residences, truth, 2, mode, alpha);
        CAPTURE(trial);
        CAPTURE(static_cast<int>(mode));
        CAPTURE(alpha);
        if (removed != expected) {
          for (std::size_t r = 0; r < L + 1; ++r) {
            std::vector<std::vector<bool>> table;
            for (std::size_t k = 0; k < L + 1; ++k) {
              if (k == r) continue;
              std::vector<bool> row(n);
              for (std::size_t i = 0; i < n; ++i)
                row[i] = preds[k][i] == truth[i];
              table.push_back(std::move(row));
            }
            MESSAGE("remove ", r, " residence ", residences[r],
                    " oracle diversity ", gd_oracle(table), " impl diversity ",
                    generalized_diversity(table));
          }
        }
        CHECK(removed == expected);
        CHECK(sp.pool.size() == L);
      }
    }
  }
}

TEST_CASE("prune requires exactly capacity+1 members") {
  auto sp = make_scripted_pool({{0}, {1}}, {0}, 2);
  sp.pool.capacity = 5;
  CHECK_THROWS_AS(prune(sp.pool, sp.x, sp.y, PruningMode::kPost, 0.5),
                  StateError);
}

// --- process_chunk invariants ---------------------------------------------

TEST_CASE("processed pools keep normalized positive weights within capacity") {
  StreamConfig scfg;
  scfg.n_chunks = 25;
  scfg.chunk_size = 80;
  scfg.n_features = 4;
  scfg.n_drifts = 2;
  scfg.seed = 3;
  const auto stream = generate_synthetic_stream(scfg);

  AwaeConfig cfg;  // defaults: bell weighting, constant aging, post-pruning
  EnsemblePool pool;
  pool.capacity = cfg.capacity;
  LearnerConfig lcfg;
  for (const auto& chunk : stream) {
    process_chunk(pool, chunk, cfg, LearnerKind::kGnb, lcfg);
    CHECK(pool.size() >= 1);
    CHECK(pool.size() <= cfg.capacity);
    CHECK(pool.weight_sum() == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& m : pool.members) {
      CHECK(m.weight > 0.0);
      CHECK(m.residence >= 1);
    }
  }
}

TEST_CASE("rejuvenation-enabled processing also keeps the invariants") {
  StreamConfig scfg;
  scfg.n_chunks = 15;
  scfg.chunk_size = 60;
  scfg.n_features = 3;
  scfg.n_drifts = 1;
  scfg.seed = 4;
  const auto stream = generate_synthetic_stream(scfg);

  AwaeConfig cfg;
  cfg.rejuvenation_enabled = true;
  cfg.weighting = WeightingMethod::kKuncheva;
  cfg.aging = AgingMethod::kGaussian;
  EnsemblePool pool;
  pool.capacity = cfg.capacity;
  for (const auto& chunk : stream) {
    process_chunk(pool, chunk, cfg, LearnerKind::kGnb, LearnerConfig{});
    CHECK(pool.weight_sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pool.size() <= cfg.capacity);
  }
}

TEST_CASE("a fully aged-out pool recovers with the newest member") {
  StreamConfig scfg;
  scfg.n_chunks = 3;
  scfg.chunk_size = 40;
  scfg.n_features = 3;
  scfg.n_drifts = 1;
  scfg.seed = 5;
  const auto stream = generate_synthetic_stream(scfg);

  AwaeConfig cfg;
  cfg.aging = AgingMethod::kConstant;
  cfg.delta = 10.0;  // wipes out every weight each chunk
  EnsemblePool pool;
  pool.capacity = cfg.capacity;
  for (const auto& chunk : stream) {
    process_chunk(pool, chunk, cfg, LearnerKind::kGnb, LearnerConfig{});
    REQUIRE(pool.size() == 1);
    CHECK(pool.members[0].weight == doctest::Approx(1.0));
    CHECK(pool.members[0].birth_chunk == chunk.index);
  }
}

TEST_CASE("train hook reports the source chunk and instance count") {
  StreamConfig scfg;
  scfg.n_chunks = 4;
  scfg.chunk_size = 30;
  scfg.n_features = 3;
  scfg.n_drifts = 1;
  scfg.seed = 6;
  const auto stream = generate_synthetic_stream(scfg);

  std::vector<std::pair<int, std::size_t>> seen;
  AwaeConfig cfg;
  EnsemblePool pool;
  pool.capacity = cfg.capacity;
  for (const auto& chunk : stream)
    process_chunk(pool, chunk, cfg, LearnerKind::kGnb, LearnerConfig{},
                  [&](int idx, std::size_t count) {
                    seen.emplace_back(idx, count);
                  });
  REQUIRE(seen.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(seen[k].first == static_cast<int>(k));
    CHECK(seen[k].second == 30);
  }
}

TEST_CASE("awae config validation") {
  AwaeConfig cfg;
  cfg.capacity = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = AwaeConfig{};
  cfg.theta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = AwaeConfig{};
  cfg.rejuvenation_power = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = AwaeConfig{};
  cfg.alpha = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
