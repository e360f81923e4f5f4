#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "confset/dataset.hpp"
#include "confset/error.hpp"

using namespace confset;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("./" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("labeled csv: three rows, labels {1,2,2}") {
  TempFile file("t_basic.csv", "f1,f2,label\n0.5,1.0,1\n-0.25,2.0,2\n3.5,0.0,2\n");
  const LabeledDataset data = load_labeled_csv(file.path, "label");
  CHECK(data.n() == 3);
  CHECK(data.d() == 2);
  CHECK(data.class_count == 2);
  CHECK(data.labels == std::vector<int>{1, 2, 2});
  CHECK(data.features(0, 0) == doctest::Approx(0.5));
  CHECK(data.features(2, 1) == doctest::Approx(0.0));
}

TEST_CASE("labeled csv: label column anywhere, class count override") {
  TempFile file("t_mid.csv", "a,label,b\n1,2,3\n4,1,6\n");
  const LabeledDataset data = load_labeled_csv(file.path, "label", 5);
  CHECK(data.class_count == 5);
  CHECK(data.labels == std::vector<int>{2, 1});
  CHECK(data.features(0, 0) == doctest::Approx(1.0));
  CHECK(data.features(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("labeled csv: zero label rejected with file-line location") {
  // Row numbers in loader messages are 1-based file lines; the header is
  // line 1, so the offending data row here is line 3.
  TempFile file("t_zero.csv", "f1,label\n1.0,1\n2.0,0\n");
  CHECK_THROWS_WITH_AS(load_labeled_csv(file.path, "label"),
                       doctest::Contains("label out of range at row 3"), ValidationError);
}

TEST_CASE("labeled csv: label above an explicit class count is rejected") {
  TempFile file("t_over.csv", "f1,label\n1.0,1\n2.0,4\n");
  CHECK_THROWS_WITH_AS(load_labeled_csv(file.path, "label", 3),
                       doctest::Contains("label out of range at row 3"), ValidationError);
}

TEST_CASE("labeled csv: unparseable cell reported with location") {
  TempFile file("t_bad.csv", "f1,label\nnope,1\n");
  CHECK_THROWS_AS(load_labeled_csv(file.path, "label"), ValidationError);
  try {
    load_labeled_csv(file.path, "label");
  } catch (const ValidationError& error) {
    const std::string what = error.what();
    CHECK(what.find("row 2") != std::string::npos);
    CHECK(what.find("f1") != std::string::npos);
  }
}

TEST_CASE("in-memory validation reports the data index, not a file line") {
  LabeledDataset data;
  data.features = Eigen::MatrixXd::Zero(2, 1);
  data.labels = {1, 5};
  data.class_count = 3;
  CHECK_THROWS_WITH_AS(data.validate(), doctest::Contains("label out of range at index 1"),
                       ValidationError);
}

TEST_CASE("labeled csv: missing file and empty file rejected") {
  CHECK_THROWS_AS(load_labeled_csv("./no_such_file.csv", "label"), ValidationError);
  TempFile file("t_empty.csv", "");
  CHECK_THROWS_AS(load_labeled_csv(file.path, "label"), ValidationError);
  TempFile header_only("t_header.csv", "f1,label\n");
  CHECK_THROWS_AS(load_labeled_csv(header_only.path, "label"), ValidationError);
}

TEST_CASE("labeled csv: missing label column rejected") {
  TempFile file("t_nolabel.csv", "f1,f2\n1,2\n");
  CHECK_THROWS_AS(load_labeled_csv(file.path, "label"), ValidationError);
}

TEST_CASE("unlabeled csv: drop column is skipped when present") {
  TempFile file("t_unlab.csv", "f1,label,f2\n1,9,2\n3,9,4\n");
  const UnlabeledDataset with_drop = load_unlabeled_csv(file.path, "label");
  CHECK(with_drop.n() == 2);
  CHECK(with_drop.d() == 2);
  CHECK(with_drop.features(1, 1) == doctest::Approx(4.0));

  TempFile plain("t_unlab2.csv", "f1,f2\n1,2\n");
  const UnlabeledDataset no_drop = load_unlabeled_csv(plain.path, "label");
  CHECK(no_drop.d() == 2);
}

TEST_CASE("csv round trip preserves values exactly") {
  LabeledDataset data;
  data.features = Eigen::MatrixXd(2, 2);
  data.features << 0.1234567890123456789, -1e-17, 3.0, 4.0;
  data.labels = {1, 3};
  data.class_count = 3;
  const std::string path = "./t_roundtrip.csv";
  write_labeled_csv(data, path);
  const LabeledDataset back = load_labeled_csv(path, "label", 3);
  std::remove(path.c_str());
  CHECK(back.n() == 2);
  CHECK(back.labels == data.labels);
  CHECK(back.features(0, 0) == data.features(0, 0));
  CHECK(back.features(0, 1) == data.features(0, 1));
}

namespace {

LabeledDataset tiny_dataset(int n, int class_count) {
  LabeledDataset data;
  data.features = Eigen::MatrixXd(n, 2);
  data.labels.resize(n);
  data.class_count = class_count;
  for (int i = 0; i < n; ++i) {
    data.features(i, 0) = i;
    data.features(i, 1) = -i;
    data.labels[i] = (i % class_count) + 1;
  }
  return data;
}

}  // namespace

TEST_CASE("split: n=10 fractions (0.5,0.2,0.3) gives parts 5,2,3") {
  const LabeledDataset data = tiny_dataset(10, 2);
  const SplitResult split = split_dataset(data, 0.5, 0.2, 0.3, RandomSeed{17});
  CHECK(split.train.n() == 5);
  CHECK(split.calibrate.n() == 2);
  CHECK(split.test.n() == 3);
}

TEST_CASE("split: the three parts partition the rows") {
  const LabeledDataset data = tiny_dataset(23, 3);
  const SplitResult split = split_dataset(data, 0.4, 0.3, 0.3, RandomSeed{5});
  std::multiset<double> seen;
  for (int i = 0; i < split.train.n(); ++i) seen.insert(split.train.features(i, 0));
  for (int i = 0; i < split.calibrate.n(); ++i) seen.insert(split.calibrate.features(i, 0));
  for (int i = 0; i < split.test.n(); ++i) seen.insert(split.test.features(i, 0));
  CHECK(seen.size() == 23);
  std::multiset<double> expected;
  for (int i = 0; i < 23; ++i) expected.insert(i);
  CHECK(seen == expected);
}

TEST_CASE("split: same seed twice gives identical assignments") {
  const LabeledDataset data = tiny_dataset(30, 3);
  const SplitResult a = split_dataset(data, 0.5, 0.25, 0.25, RandomSeed{123});
  const SplitResult b = split_dataset(data, 0.5, 0.25, 0.25, RandomSeed{123});
  CHECK(a.train.features == b.train.features);
  CHECK(a.train.labels == b.train.labels);
  CHECK(a.calibrate.features == b.calibrate.features);
  CHECK(a.test.features == b.test.features);
}

TEST_CASE("split: invalid fractions rejected") {
  const LabeledDataset data = tiny_dataset(10, 2);
  CHECK_THROWS_AS(split_dataset(data, 0.5, 0.2, 0.2, RandomSeed{1}), ValidationError);
  CHECK_THROWS_AS(split_dataset(data, 0.0, 0.5, 0.5, RandomSeed{1}), ValidationError);
  CHECK_THROWS_AS(split_dataset(data, 0.98, 0.01, 0.01, RandomSeed{1}), ValidationError);
}

TEST_CASE("split: stratified mode balances the train part") {
  const LabeledDataset data = tiny_dataset(40, 4);
  const SplitResult split = split_dataset(data, 0.5, 0.25, 0.25, RandomSeed{7}, true);
  std::vector<int> counts(4, 0);
  for (const int label : split.train.labels) ++counts[label - 1];
  for (const int count : counts) CHECK(count == 5);
}

TEST_CASE("vfold: n=10 V=3 gives fold sizes {4,3,3}") {
  const FoldPartition partition = vfold_partition(10, 3, RandomSeed{3});
  std::vector<int> sizes;
  for (int v = 1; v <= 3; ++v) sizes.push_back(static_cast<int>(partition.fold_rows(v).size()));
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<int>{3, 3, 4});
}

TEST_CASE("vfold: n=9 V=3 gives equal folds") {
  const FoldPartition partition = vfold_partition(9, 3, RandomSeed{3});
  for (int v = 1; v <= 3; ++v) CHECK(partition.fold_rows(v).size() == 3);
}

TEST_CASE("vfold: V outside [2, n] rejected") {
  CHECK_THROWS_AS(vfold_partition(5, 6, RandomSeed{1}), ValidationError);
  CHECK_THROWS_AS(vfold_partition(5, 1, RandomSeed{1}), ValidationError);
}

TEST_CASE("vfold: folds and complements cover rows exactly once, over a grid") {
  for (const int n : {7, 12, 20, 31}) {
    for (const int V : {2, 3, 5}) {
      const FoldPartition partition = vfold_partition(n, V, RandomSeed{static_cast<std::uint64_t>(n * 100 + V)});
      std::set<int> seen;
      for (int v = 1; v <= V; ++v) {
        const auto rows = partition.fold_rows(v);
        const int lo = n / V;
        CHECK((static_cast<int>(rows.size()) == lo || static_cast<int>(rows.size()) == lo + 1));
        for (const int row : rows) seen.insert(row);
        const auto complement = partition.complement_rows(v);
        CHECK(rows.size() + complement.size() == static_cast<std::size_t>(n));
      }
      CHECK(seen.size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("vfold: seeded determinism") {
  const FoldPartition a = vfold_partition(17, 4, RandomSeed{55});
  const FoldPartition b = vfold_partition(17, 4, RandomSeed{55});
  CHECK(a.fold_assignment == b.fold_assignment);
}

TEST_CASE("select_rows keeps requested rows in order") {
  const LabeledDataset data = tiny_dataset(6, 2);
  const LabeledDataset picked = select_rows(data, {4, 1});
  CHECK(picked.n() == 2);
  CHECK(picked.features(0, 0) == doctest::Approx(4.0));
  CHECK(picked.features(1, 0) == doctest::Approx(1.0));
  CHECK(picked.labels[0] == data.labels[4]);
}
