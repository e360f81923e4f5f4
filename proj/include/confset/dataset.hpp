#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "confset/rng.hpp"

namespace confset {

// Labeled sample: features row i pairs with labels[i] in {1, ..., class_count}.
struct LabeledDataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  int class_count = 0;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }

  // Throws ValidationError on any invariant breach.
  void validate() const;
};

struct UnlabeledDataset {
  Eigen::MatrixXd features;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
};

// fold_assignment[i] in {1, ..., V}; all fold sizes in {floor(n/V), floor(n/V)+1}.
struct FoldPartition {
  std::vector<int> fold_assignment;
  int V = 0;

  int n() const { return static_cast<int>(fold_assignment.size()); }
  std::vector<int> fold_rows(int fold) const;
  std::vector<int> complement_rows(int fold) const;
};

struct SplitResult {
  LabeledDataset train;
  UnlabeledDataset calibrate;
  LabeledDataset test;
};

// CSV with a header row; every non-label column must parse as a finite real,
// the label column as an integer >= 1. class_count_override = 0 means
// "use the maximum observed label".
LabeledDataset load_labeled_csv(const std::string& path, const std::string& label_column,
                                int class_count_override = 0);

// CSV with a header row, all-feature columns; drop_column (if non-empty and
// present) is skipped so a labeled file can feed calibration unchanged.
UnlabeledDataset load_unlabeled_csv(const std::string& path, const std::string& drop_column = "");

void write_labeled_csv(const LabeledDataset& data, const std::string& path,
                       const std::string& label_column = "label");

// Seeded disjoint split into train / calibrate / test; part sizes are the
// largest-remainder rounding of fractions * n. Stratified mode forces equal
// per-class counts in the train part.
SplitResult split_dataset(const LabeledDataset& data, double train_fraction,
                          double calibrate_fraction, double test_fraction, RandomSeed seed,
                          bool stratified = false);

FoldPartition vfold_partition(int n, int V, RandomSeed seed);

LabeledDataset select_rows(const LabeledDataset& data, const std::vector<int>& rows);

}  // namespace confset
