#include "confset/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>

#include "confset/error.hpp"

namespace confset {

EmpiricalG::EmpiricalG(std::vector<double> sorted_pool, int pool_rows, int class_count)
    : sorted_pool_(std::move(sorted_pool)), pool_rows_(pool_rows), class_count_(class_count) {
  if (pool_rows_ < 1 || class_count_ < 1 ||
      sorted_pool_.size() != static_cast<std::size_t>(pool_rows_) * class_count_) {
    throw ValidationError("pool shape mismatch");
  }
  if (!std::is_sorted(sorted_pool_.begin(), sorted_pool_.end(), std::greater<double>())) {
    throw ValidationError("pool is not sorted descending");
  }
}

double EmpiricalG::g_value(double t) const {
  // First entry strictly below t bounds the prefix of entries >= t.
  const auto first_below =
      std::upper_bound(sorted_pool_.begin(), sorted_pool_.end(), t, std::greater<double>());
  const auto count = static_cast<double>(first_below - sorted_pool_.begin());
  return count / pool_rows_;
}

void EmpiricalG::check_beta(double beta) const {
  if (!(beta > 0.0 && beta < class_count_)) {
    throw ValidationError("beta must lie in the open interval (0, " +
                          std::to_string(class_count_) + "), got " + std::to_string(beta));
  }
}

double EmpiricalG::g_inverse(double beta) const {
  check_beta(beta);
  // G(t) <= beta iff #{entries >= t} <= floor(beta * N); the infimum of such t
  // is the (floor(beta*N)+1)-th largest pooled entry.
  const auto cutoff = static_cast<std::size_t>(std::floor(beta * pool_rows_));
  return sorted_pool_[cutoff];
}

double EmpiricalG::pool_information(double beta) const {
  check_beta(beta);
  std::size_t count = 0;
  std::size_t index = 0;
  while (index < sorted_pool_.size()) {
    // Entries tied with sorted_pool_[index] share one G value: the tie group's
    // last 1-based position divided by N.
    std::size_t last = index;
    while (last + 1 < sorted_pool_.size() && sorted_pool_[last + 1] == sorted_pool_[index]) ++last;
    if (static_cast<double>(last + 1) / pool_rows_ <= beta) count += last - index + 1;
    index = last + 1;
  }
  return static_cast<double>(count) / pool_rows_;
}

EmpiricalG build_empirical_g(const ScorePool& pool) {
  if (pool.n() < 1 || pool.class_count() < 1) throw ValidationError("empty score pool");
  if (!pool.scores.allFinite()) throw ValidationError("non-finite score in pool");
  std::vector<double> flat(pool.scores.data(), pool.scores.data() + pool.scores.size());
  std::sort(flat.begin(), flat.end(), std::greater<double>());
  return EmpiricalG(std::move(flat), pool.n(), pool.class_count());
}

std::vector<double> randomized_pool_draw(const ScorePool& pool, int count, RandomSeed seed) {
  if (count < 1) throw ValidationError("draw count must be >= 1");
  Rng rng(seed);
  std::vector<double> draws(count);
  for (int i = 0; i < count; ++i) {
    const auto row = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool.n())));
    const auto column = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool.class_count())));
    draws[i] = pool.scores(row, column);
  }
  return draws;
}

double jitter_score(double score, int class_column, std::uint64_t salt) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &score, sizeof(bits));
  const std::uint64_t keyed =
      mix64(bits ^ mix64(static_cast<std::uint64_t>(class_column) ^ salt));
  const double unit = static_cast<double>(keyed >> 11) * 0x1.0p-53;  // [0, 1)
  return score + 1e-9 * unit;
}

Eigen::MatrixXd jitter_scores(const Eigen::MatrixXd& scores, std::uint64_t salt) {
  Eigen::MatrixXd out(scores.rows(), scores.cols());
  for (int j = 0; j < scores.cols(); ++j) {
    for (int i = 0; i < scores.rows(); ++i) {
      out(i, j) = jitter_score(scores(i, j), j, salt);
    }
  }
  return out;
}

}  // namespace confset
