#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "confset/calibration.hpp"
#include "confset/error.hpp"
#include "confset/rng.hpp"

using namespace confset;

namespace {

// The running 2x2 example: pooled scores {0.5, 0.2, 0.1, -0.3}, N=2, K=2.
ScorePool hand_pool() {
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(2, 2);
  pool.scores << 0.5, -0.3, 0.1, 0.2;
  return pool;
}

ScorePool random_pool(int rows, int cols, std::uint64_t seed) {
  Rng rng(RandomSeed{seed});
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) pool.scores(i, k) = rng.normal();
  }
  return pool;
}

// Direct-definition evaluation: (1/N) * #{pool entries >= t}.
double brute_g_value(const ScorePool& pool, double t) {
  int count = 0;
  for (int i = 0; i < pool.n(); ++i) {
    for (int k = 0; k < pool.class_count(); ++k) {
      if (pool.scores(i, k) >= t) ++count;
    }
  }
  return static_cast<double>(count) / pool.n();
}

// Direct-definition generalized inverse inf{t : G(t) <= beta}. G drops just
// AFTER each pool score, so the qualifying set is an open ray whose infimum
// is the largest pool score still violating the constraint; the smallest
// score always violates it because G there equals K > beta.
double brute_g_inverse(const ScorePool& pool, double beta) {
  std::vector<double> candidates;
  for (int i = 0; i < pool.n(); ++i) {
    for (int k = 0; k < pool.class_count(); ++k) candidates.push_back(pool.scores(i, k));
  }
  std::sort(candidates.begin(), candidates.end(), std::greater<double>());
  for (const double t : candidates) {
    if (brute_g_value(pool, t) > beta) return t;
  }
  return candidates.front();  // unreachable for beta < K
}

}  // namespace

TEST_CASE("hand pool: G values by enumeration") {
  const EmpiricalG g = build_empirical_g(hand_pool());
  CHECK(g.pool_rows() == 2);
  CHECK(g.class_count() == 2);
  CHECK(g.g_value(0.15) == doctest::Approx(1.0));
  CHECK(g.g_value(0.2) == doctest::Approx(1.0));   // non-strict: 0.5 and 0.2 qualify
  CHECK(g.g_value(0.1) == doctest::Approx(1.5));
  CHECK(g.g_value(0.5) == doctest::Approx(0.5));   // exactly one score at the max
  CHECK(g.g_value(-1.0) == doctest::Approx(2.0));  // everything qualifies: K
  CHECK(g.g_value(0.9) == doctest::Approx(0.0));   // above the max: nothing does
}

TEST_CASE("hand pool: inverse at beta=1 is 0.1") {
  const EmpiricalG g = build_empirical_g(hand_pool());
  CHECK(g.g_inverse(1.0) == doctest::Approx(0.1));
  // Everything strictly above the inverse satisfies G <= beta.
  CHECK(g.g_value(0.1 + 1e-12) <= 1.0);
  // Just below it the constraint fails (a pool score sits below).
  CHECK(g.g_value(0.1 - 1e-12) > 1.0);
}

TEST_CASE("single-score pool: inverse of any beta below 1/N is the score itself") {
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(1, 1);
  pool.scores << 0.7;
  const EmpiricalG g = build_empirical_g(pool);
  CHECK(g.g_inverse(0.5) == doctest::Approx(0.7));
}

TEST_CASE("beta is confined to the open interval (0, K)") {
  const EmpiricalG g = build_empirical_g(hand_pool());
  CHECK_THROWS_AS(g.g_inverse(0.0), ValidationError);
  CHECK_THROWS_AS(g.g_inverse(2.0), ValidationError);
  CHECK_THROWS_AS(g.g_inverse(-1.0), ValidationError);
  CHECK_THROWS_AS(g.g_inverse(2.5), ValidationError);
  CHECK_THROWS_AS(g.pool_information(0.0), ValidationError);
  CHECK_THROWS_AS(g.pool_information(2.0), ValidationError);
  CHECK_NOTHROW(g.g_inverse(1.999));
  CHECK_NOTHROW(g.g_inverse(0.001));
}

TEST_CASE("non-finite pool scores are rejected") {
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(1, 2);
  pool.scores << 0.5, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_empirical_g(pool), ValidationError);
}

TEST_CASE("g_value is non-increasing") {
  const EmpiricalG g = build_empirical_g(random_pool(40, 3, 8));
  Rng rng(RandomSeed{9});
  for (int trial = 0; trial < 2000; ++trial) {
    double t1 = 6.0 * rng.uniform01() - 3.0;
    double t2 = 6.0 * rng.uniform01() - 3.0;
    if (t1 > t2) std::swap(t1, t2);
    CHECK(g.g_value(t1) >= g.g_value(t2));
  }
}

TEST_CASE("g_value range is [0, K]") {
  const EmpiricalG g = build_empirical_g(random_pool(25, 4, 10));
  Rng rng(RandomSeed{11});
  for (int trial = 0; trial < 2000; ++trial) {
    const double t = 20.0 * rng.uniform01() - 10.0;
    const double value = g.g_value(t);
    CHECK(value >= 0.0);
    CHECK(value <= 4.0);
  }
}

TEST_CASE("inverse consistency across a beta grid") {
  const EmpiricalG g = build_empirical_g(random_pool(30, 3, 12));
  for (double beta = 0.1; beta < 3.0; beta += 0.1) {
    const double threshold = g.g_inverse(beta);
    CHECK(g.g_value(threshold + 1e-9) <= beta);
    CHECK(g.g_value(std::nextafter(threshold, 100.0)) <= beta);
    if (threshold > g.sorted_pool().back()) {
      CHECK(g.g_value(threshold - 1e-9) > beta);
    }
  }
}

TEST_CASE("brute-force agreement on all pools of size up to 12") {
  Rng rng(RandomSeed{77});
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = 1 + static_cast<int>(rng.below(4));
    const int cols = 1 + static_cast<int>(rng.below(3));
    if (rows * cols > 12) continue;
    ScorePool pool;
    pool.scores = Eigen::MatrixXd(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < cols; ++k) {
        // Small integer grid provokes ties on purpose.
        pool.scores(i, k) = static_cast<double>(rng.below(7)) * 0.25 - 0.5;
      }
    }
    const EmpiricalG g = build_empirical_g(pool);
    for (double t = -1.0; t <= 1.51; t += 0.125) {
      CHECK(g.g_value(t) == brute_g_value(pool, t));
    }
    for (double beta = 0.1; beta < cols; beta += 0.1) {
      CHECK(g.g_inverse(beta) == brute_g_inverse(pool, beta));
    }
  }
}

TEST_CASE("pool information: hand case N=1, K=2, beta=1.5") {
  ScorePool pool;
  pool.scores = Eigen::MatrixXd(1, 2);
  pool.scores << 0.4, 0.9;
  const EmpiricalG g = build_empirical_g(pool);
  // G at the two scores is {2, 1}; only the larger one satisfies G <= 1.5.
  CHECK(g.pool_information(1.5) == doctest::Approx(1.0));
}

TEST_CASE("pool information brackets beta for distinct pools") {
  const ScorePool pool = random_pool(50, 4, 13);
  const EmpiricalG g = build_empirical_g(pool);
  for (double beta = 0.25; beta < 4.0; beta += 0.25) {
    const double info = g.pool_information(beta);
    CHECK(info <= beta);
    CHECK(info > beta - 4.0 / 50.0);
  }
}

TEST_CASE("membership nesting in beta") {
  const ScorePool pool = random_pool(20, 3, 14);
  const EmpiricalG g = build_empirical_g(pool);
  Rng rng(RandomSeed{15});
  for (int trial = 0; trial < 500; ++trial) {
    const double s = 4.0 * rng.uniform01() - 2.0;
    const double beta1 = 0.5, beta2 = 2.2;
    if (g.g_value(s) <= beta1) CHECK(g.g_value(s) <= beta2);
  }
}

TEST_CASE("randomized draws: constant pool and determinism") {
  ScorePool constant;
  constant.scores = Eigen::MatrixXd::Constant(5, 3, 0.42);
  const auto draws = randomized_pool_draw(constant, 100, RandomSeed{3});
  CHECK(draws.size() == 100);
  for (const double z : draws) CHECK(z == 0.42);

  const ScorePool pool = random_pool(10, 2, 16);
  const auto a = randomized_pool_draw(pool, 50, RandomSeed{4});
  const auto b = randomized_pool_draw(pool, 50, RandomSeed{4});
  CHECK(a == b);
}

TEST_CASE("randomized draws feed a uniform G transform") {
  // Kolmogorov-Smirnov check of G(Z)/K against Uniform(0,1) at level 0.001.
  const ScorePool pool = random_pool(2000, 3, 17);
  const EmpiricalG g = build_empirical_g(pool);
  const int draws = 100000;
  const auto z = randomized_pool_draw(pool, draws, RandomSeed{18});
  std::vector<double> u(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) u[i] = g.g_value(z[i]) / 3.0;
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = static_cast<double>(i + 1) / draws - u[i];
    const double lo = u[i] - static_cast<double>(i) / draws;
    ks = std::max(ks, std::max(hi, lo));
  }
  // Critical value sqrt(-ln(alpha/2)/2)/sqrt(n) at alpha = 0.001, plus the
  // 1.5/N step-resolution slack of the finite pool.
  const double critical = std::sqrt(-std::log(0.0005) / 2.0) / std::sqrt(draws);
  CHECK(ks <= critical + 1.5 / 2000.0);
}

TEST_CASE("jitter: deterministic, tiny, and column-sensitive") {
  const double jittered = jitter_score(0.25, 0, 7);
  CHECK(jitter_score(0.25, 0, 7) == jittered);
  CHECK(jittered >= 0.25);
  CHECK(jittered < 0.25 + 1e-9);
  CHECK(jitter_score(0.25, 1, 7) != jittered);
  CHECK(jitter_score(0.25, 0, 8) != jittered);

  Eigen::MatrixXd scores(2, 2);
  scores << 0.25, 0.25, 0.5, 0.25;
  const Eigen::MatrixXd jittered_matrix = jitter_scores(scores, 7);
  CHECK(jittered_matrix(0, 0) == jittered);
  // Equal scores in different columns separate; same column still collides.
  CHECK(jittered_matrix(0, 0) != jittered_matrix(0, 1));
  CHECK(jittered_matrix(0, 1) == jittered_matrix(1, 1));
}
