#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "confset/rng.hpp"

namespace confset {

// Scores of one model on a calibration pool: row i = scores of all K classes
// at pool point i.
struct ScorePool {
  Eigen::MatrixXd scores;

  int n() const { return static_cast<int>(scores.rows()); }
  int class_count() const { return static_cast<int>(scores.cols()); }
};

// Empirical tail-sum function of a pooled score sample:
//   G(t) = (1/N) * #{pool entries >= t},   range [0, K].
// A step function, non-increasing and left-continuous, evaluated by binary
// search on the descending-sorted pool.
class EmpiricalG {
 public:
  EmpiricalG() = default;
  EmpiricalG(std::vector<double> sorted_pool, int pool_rows, int class_count);

  double g_value(double t) const;

  // inf{t : G(t) <= beta}; beta must lie in the open interval (0, K).
  double g_inverse(double beta) const;

  // (1/N) * #{pool entries s : G(s) <= beta} — the average set size the rule
  // "G(score) <= beta" yields on the pool itself.
  double pool_information(double beta) const;

  const std::vector<double>& sorted_pool() const { return sorted_pool_; }
  int pool_rows() const { return pool_rows_; }
  int class_count() const { return class_count_; }

 private:
  void check_beta(double beta) const;

  std::vector<double> sorted_pool_;  // descending, length pool_rows * class_count
  int pool_rows_ = 0;
  int class_count_ = 0;
};

EmpiricalG build_empirical_g(const ScorePool& pool);

// One draw = the score at a uniformly random (row, column) of the pool.
std::vector<double> randomized_pool_draw(const ScorePool& pool, int count, RandomSeed seed);

// Deterministic tie-breaking noise in [0, 1e-9), keyed by the score's bit
// pattern, its class column and a salt. Applied identically to pool and query
// scores it restores the continuity the calibration math assumes; equal
// scores within the same column still collide by construction.
double jitter_score(double score, int class_column, std::uint64_t salt);

// Column-wise jitter of a whole score matrix.
Eigen::MatrixXd jitter_scores(const Eigen::MatrixXd& scores, std::uint64_t salt);

}  // namespace confset
