#include "confset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "confset/error.hpp"

namespace confset {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& cell, int row, const std::string& column) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ValidationError("unparseable cell at row " + std::to_string(row) + ", column '" +
                          column + "': '" + cell + "'");
  }
  if (used != trimmed(cell).size() && used != cell.size()) {
    throw ValidationError("unparseable cell at row " + std::to_string(row) + ", column '" +
                          column + "': '" + cell + "'");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value at row " + std::to_string(row) + ", column '" +
                          column + "'");
  }
  return value;
}

int parse_label(const std::string& cell, int row, const std::string& column) {
  long value = 0;
  try {
    std::size_t used = 0;
    value = std::stol(cell, &used);
    if (used != trimmed(cell).size() && used != cell.size()) throw std::invalid_argument(cell);
  } catch (const std::exception&) {
    throw ValidationError("unparseable label at row " + std::to_string(row) + ", column '" +
                          column + "': '" + cell + "'");
  }
  if (value < 1) {
    throw ValidationError("label out of range at row " + std::to_string(row) + ": " +
                          std::to_string(value));
  }
  return static_cast<int>(value);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ValidationError("missing file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(file, line)) throw ValidationError("empty file: " + path);
  for (auto& name : split_line(line)) table.header.push_back(trimmed(name));
  int row = 1;
  while (std::getline(file, line)) {
    ++row;
    if (trimmed(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw ValidationError("row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.empty()) throw ValidationError("no data rows in file: " + path);
  return table;
}

std::vector<int> seeded_permutation(int n, RandomSeed seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);
  return order;
}

// Largest-remainder rounding of fractions * n to integer part sizes.
std::vector<int> part_sizes(int n, const std::vector<double>& fractions) {
  std::vector<int> sizes(fractions.size());
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * n;
    sizes[i] = static_cast<int>(std::floor(exact));
    assigned += sizes[i];
    remainders.emplace_back(-(exact - sizes[i]), static_cast<int>(i));
  }
  std::sort(remainders.begin(), remainders.end());
  for (int extra = 0; extra < n - assigned; ++extra) sizes[remainders[extra].second] += 1;
  return sizes;
}

}  // namespace

void LabeledDataset::validate() const {
  if (n() < 1) throw ValidationError("dataset has no rows");
  if (d() < 1) throw ValidationError("dataset has no feature columns");
  if (class_count < 2) throw ValidationError("class_count must be >= 2");
  if (static_cast<int>(labels.size()) != n()) {
    throw ValidationError("label count does not match feature row count");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > class_count) {
      throw ValidationError("label out of range at index " + std::to_string(i) + ": " +
                            std::to_string(labels[i]));
    }
  }
  if (!features.allFinite()) throw ValidationError("non-finite feature value");
}

std::vector<int> FoldPartition::fold_rows(int fold) const {
  std::vector<int> rows;
  for (int i = 0; i < n(); ++i) {
    if (fold_assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<int> FoldPartition::complement_rows(int fold) const {
  std::vector<int> rows;
  for (int i = 0; i < n(); ++i) {
    if (fold_assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

LabeledDataset load_labeled_csv(const std::string& path, const std::string& label_column,
                                int class_count_override) {
  const CsvTable table = read_csv(path);
  int label_index = -1;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] == label_column) label_index = static_cast<int>(j);
  }
  if (label_index < 0) throw ValidationError("label column '" + label_column + "' not found");
  if (table.header.size() < 2) throw ValidationError("no feature columns besides the label");

  const int n = static_cast<int>(table.rows.size());
  const int d = static_cast<int>(table.header.size()) - 1;
  LabeledDataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int file_row = i + 2;  // 1-based, after the header
    int feature = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (static_cast<int>(j) == label_index) {
        data.labels[i] = parse_label(table.rows[i][j], file_row, table.header[j]);
      } else {
        data.features(i, feature++) = parse_real(table.rows[i][j], file_row, table.header[j]);
      }
    }
  }
  const int max_label = *std::max_element(data.labels.begin(), data.labels.end());
  data.class_count = class_count_override > 0 ? class_count_override : max_label;
  if (data.class_count < 2) data.class_count = 2;
  for (int i = 0; i < n; ++i) {
    if (data.labels[i] > data.class_count) {
      throw ValidationError("label out of range at row " + std::to_string(i + 2) + ": " +
                            std::to_string(data.labels[i]));
    }
  }
  data.validate();
  return data;
}

UnlabeledDataset load_unlabeled_csv(const std::string& path, const std::string& drop_column) {
  const CsvTable table = read_csv(path);
  std::vector<int> keep;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (drop_column.empty() || table.header[j] != drop_column) keep.push_back(static_cast<int>(j));
  }
  if (keep.empty()) throw ValidationError("no feature columns in file: " + path);
  UnlabeledDataset data;
  data.features.resize(static_cast<int>(table.rows.size()), static_cast<int>(keep.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      data.features(static_cast<int>(i), static_cast<int>(j)) =
          parse_real(table.rows[i][keep[j]], static_cast<int>(i) + 2, table.header[keep[j]]);
    }
  }
  return data;
}

void write_labeled_csv(const LabeledDataset& data, const std::string& path,
                       const std::string& label_column) {
  std::ofstream file(path);
  if (!file) throw ValidationError("cannot open for writing: " + path);
  for (int j = 0; j < data.d(); ++j) file << "f" << (j + 1) << ",";
  file << label_column << "\n";
  file.precision(17);
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) file << data.features(i, j) << ",";
    file << data.labels[i] << "\n";
  }
}

LabeledDataset select_rows(const LabeledDataset& data, const std::vector<int>& rows) {
  LabeledDataset out;
  out.features.resize(static_cast<int>(rows.size()), data.d());
  out.labels.resize(rows.size());
  out.class_count = data.class_count;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<int>(i)) = data.features.row(rows[i]);
    out.labels[i] = data.labels[rows[i]];
  }
  return out;
}

SplitResult split_dataset(const LabeledDataset& data, double train_fraction,
                          double calibrate_fraction, double test_fraction, RandomSeed seed,
                          bool stratified) {
  data.validate();
  if (train_fraction <= 0 || calibrate_fraction <= 0 || test_fraction <= 0) {
    throw ValidationError("split fractions must be positive");
  }
  if (std::abs(train_fraction + calibrate_fraction + test_fraction - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  const int n = data.n();
  const auto sizes = part_sizes(n, {train_fraction, calibrate_fraction, test_fraction});
  if (sizes[0] == 0 || sizes[1] == 0 || sizes[2] == 0) {
    throw ValidationError("a split fraction produces an empty part at n=" + std::to_string(n));
  }

  std::vector<int> train_rows, rest_rows;
  if (stratified) {
    const int K = data.class_count;
    if (sizes[0] % K != 0) {
      throw ValidationError("stratified split needs a train size divisible by class count (" +
                            std::to_string(sizes[0]) + " rows, " + std::to_string(K) +
                            " classes)");
    }
    const int per_class = sizes[0] / K;
    std::vector<std::vector<int>> by_class(K);
    for (int i = 0; i < n; ++i) by_class[data.labels[i] - 1].push_back(i);
    Rng rng(seed);
    for (int c = 0; c < K; ++c) {
      if (static_cast<int>(by_class[c].size()) < per_class) {
        throw ValidationError("stratified split infeasible: class " + std::to_string(c + 1) +
                              " has " + std::to_string(by_class[c].size()) + " rows, needs " +
                              std::to_string(per_class));
      }
      rng.shuffle(by_class[c]);
      train_rows.insert(train_rows.end(), by_class[c].begin(), by_class[c].begin() + per_class);
      rest_rows.insert(rest_rows.end(), by_class[c].begin() + per_class, by_class[c].end());
    }
    rng.shuffle(rest_rows);
  } else {
    auto order = seeded_permutation(n, seed);
    train_rows.assign(order.begin(), order.begin() + sizes[0]);
    rest_rows.assign(order.begin() + sizes[0], order.end());
  }

  const std::vector<int> calibrate_rows(rest_rows.begin(), rest_rows.begin() + sizes[1]);
  const std::vector<int> test_rows(rest_rows.begin() + sizes[1], rest_rows.end());

  SplitResult result;
  result.train = select_rows(data, train_rows);
  result.test = select_rows(data, test_rows);
  result.calibrate.features.resize(sizes[1], data.d());
  for (std::size_t i = 0; i < calibrate_rows.size(); ++i) {
    result.calibrate.features.row(static_cast<int>(i)) = data.features.row(calibrate_rows[i]);
  }
  return result;
}

FoldPartition vfold_partition(int n, int V, RandomSeed seed) {
  if (V < 2) throw ValidationError("fold count must be >= 2");
  if (V > n) throw ValidationError("fold count " + std::to_string(V) + " exceeds n=" +
                                   std::to_string(n));
  const auto order = seeded_permutation(n, seed);
  FoldPartition partition;
  partition.V = V;
  partition.fold_assignment.resize(n);
  // First n % V folds take floor(n/V)+1 rows, the rest floor(n/V).
  const int base = n / V;
  const int bumped = n % V;
  int cursor = 0;
  for (int fold = 1; fold <= V; ++fold) {
    const int size = base + (fold <= bumped ? 1 : 0);
    for (int i = 0; i < size; ++i) partition.fold_assignment[order[cursor++]] = fold;
  }
  return partition;
}

}  // namespace confset
