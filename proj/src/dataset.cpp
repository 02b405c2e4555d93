#include "fsel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fsel/rng.hpp"
#include "fsel/text.hpp"

namespace fsel {

// ---------------------------------------------------------------------------
// RowAccessLog

RowAccessLog::RowAccessLog(int n_rows) : n_rows_(n_rows) {
  if (n_rows < 0) throw ValidationError("access log row count must be non-negative");
  begin_phase("setup");
}

void RowAccessLog::begin_phase(std::string name) {
  Phase p;
  p.name = std::move(name);
  p.hit = std::make_unique<std::atomic<std::uint8_t>[]>(static_cast<std::size_t>(n_rows_));
  for (int i = 0; i < n_rows_; ++i) p.hit[static_cast<std::size_t>(i)].store(0, std::memory_order_relaxed);
  phases_.push_back(std::move(p));
  current_.store(&phases_.back(), std::memory_order_release);
}

void RowAccessLog::touch(int original_row) noexcept {
  Phase* p = current_.load(std::memory_order_acquire);
  if (!p) return;
  if (original_row < 0 || original_row >= n_rows_) return;
  p->hit[static_cast<std::size_t>(original_row)].store(1, std::memory_order_relaxed);
}

std::vector<int> RowAccessLog::rows_touched(int p) const {
  const Phase& ph = phases_[static_cast<std::size_t>(p)];
  std::vector<int> rows;
  for (int i = 0; i < n_rows_; ++i)
    if (ph.hit[static_cast<std::size_t>(i)].load(std::memory_order_relaxed)) rows.push_back(i);
  return rows;
}

int RowAccessLog::find_phase(const std::string& name) const {
  for (std::size_t i = 0; i < phases_.size(); ++i)
    if (phases_[i].name == name) return static_cast<int>(i);
  return -1;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<double> values, int n_features, std::vector<int> labels,
                 std::vector<std::string> class_names, std::vector<std::string> feature_names)
    : n_features_(n_features),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      feature_names_(std::move(feature_names)) {
  if (n_features_ <= 0) throw ValidationError("dataset must have at least one feature");
  if (values_.size() % static_cast<std::size_t>(n_features_) != 0)
    throw ValidationError("value buffer size is not a multiple of the feature count");
  n_samples_ = static_cast<int>(values_.size() / static_cast<std::size_t>(n_features_));
  origin_rows_.resize(static_cast<std::size_t>(n_samples_));
  for (int i = 0; i < n_samples_; ++i) origin_rows_[static_cast<std::size_t>(i)] = i;
  check_shape_and_finite();

  if (class_names_.size() < 2) throw ValidationError("dataset must contain at least 2 classes");
  for (std::size_t i = 1; i < class_names_.size(); ++i)
    if (!(class_names_[i - 1] < class_names_[i]))
      throw ValidationError("class names must be strictly sorted");
}

Dataset::Dataset(restricted_tag, std::vector<double> values, int n_features,
                 std::vector<int> labels, std::vector<std::string> class_names,
                 std::vector<std::string> feature_names, std::vector<int> origin_rows,
                 RowAccessLog* log)
    : n_features_(n_features),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      feature_names_(std::move(feature_names)),
      origin_rows_(std::move(origin_rows)),
      log_(log) {
  n_samples_ = static_cast<int>(labels_.size());
  check_shape_and_finite();
}

void Dataset::check_shape_and_finite() const {
  if (static_cast<std::size_t>(n_samples_) != labels_.size())
    throw ValidationError("row count does not match label count");
  if (static_cast<std::size_t>(n_features_) != feature_names_.size())
    throw ValidationError("column count does not match feature-name count");
  for (int l : labels_)
    if (l < 0 || static_cast<std::size_t>(l) >= class_names_.size())
      throw ValidationError("label id out of range of the class table");
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("dataset contains a non-finite value");
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(class_names_.size(), 0);
  for (int l : labels_) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

Dataset Dataset::subset_rows(std::span<const int> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * static_cast<std::size_t>(n_features_));
  std::vector<int> labels;
  labels.reserve(rows.size());
  std::vector<int> origins;
  origins.reserve(rows.size());
  for (int r : rows) {
    if (r < 0 || r >= n_samples_) throw ValidationError("row index out of range");
    for (int c = 0; c < n_features_; ++c) values.push_back(value(r, c));
    labels.push_back(labels_[static_cast<std::size_t>(r)]);
    origins.push_back(origin_rows_[static_cast<std::size_t>(r)]);
  }
  return Dataset(restricted_tag{}, std::move(values), n_features_, std::move(labels), class_names_,
                 feature_names_, std::move(origins), log_);
}

Dataset Dataset::select_columns(std::span<const int> cols) const {
  if (cols.empty()) throw ValidationError("column selection must keep at least one column");
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (int c : cols) {
    if (c < 0 || c >= n_features_) throw ValidationError("column index out of range");
    names.push_back(feature_names_[static_cast<std::size_t>(c)]);
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_samples_) * cols.size());
  for (int r = 0; r < n_samples_; ++r)
    for (int c : cols) values.push_back(value(r, c));
  return Dataset(restricted_tag{}, std::move(values), static_cast<int>(cols.size()), labels_,
                 class_names_, std::move(names), origin_rows_, log_);
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

bool cell_is_numeric(const std::string& cell) {
  double v;
  return parse_double(cell, v);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<std::vector<std::string>> records;
  std::vector<int> line_numbers;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (first && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
      // UTF-8 BOM
      line.erase(0, 3);
    }
    first = false;
    if (line.empty()) continue;
    records.push_back(split_csv_line(line));
    line_numbers.push_back(line_no);
  }
  if (records.empty()) throw ParseError("'" + path + "' contains no data");

  const std::size_t n_cols = records[0].size();
  if (n_cols < 2) throw ParseError("need at least one feature column and one label column");

  bool has_header = false;
  for (const std::string& cell : records[0])
    if (!cell_is_numeric(cell)) has_header = true;

  std::vector<std::string> header;
  std::size_t data_start = 0;
  if (has_header) {
    header = records[0];
    data_start = 1;
  } else {
    for (std::size_t c = 0; c < n_cols; ++c) header.push_back("f" + std::to_string(c));
  }

  // Resolve the label column: header name first, then 0-based index.
  int label_idx = -1;
  if (has_header) {
    for (std::size_t c = 0; c < n_cols; ++c)
      if (header[c] == label_column) label_idx = static_cast<int>(c);
  }
  if (label_idx < 0) {
    long long idx;
    if (parse_int(label_column, idx) && idx >= 0 && idx < static_cast<long long>(n_cols))
      label_idx = static_cast<int>(idx);
  }
  if (label_idx < 0)
    throw ValidationError("label column '" + label_column + "' not found in '" + path + "'");

  if (data_start >= records.size()) throw ParseError("'" + path + "' has a header but no data rows");

  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < n_cols; ++c)
    if (static_cast<int>(c) != label_idx) feature_names.push_back(header[c]);

  const int n_features = static_cast<int>(n_cols - 1);
  std::vector<double> values;
  std::vector<std::string> raw_labels;
  for (std::size_t r = data_start; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != n_cols)
      throw ParseError("row " + std::to_string(line_numbers[r]) + ": expected " +
                       std::to_string(n_cols) + " columns, got " + std::to_string(rec.size()));
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (static_cast<int>(c) == label_idx) {
        raw_labels.push_back(rec[c]);
        continue;
      }
      double v;
      if (!parse_double(rec[c], v))
        throw ParseError("row " + std::to_string(line_numbers[r]) + ", column " +
                         std::to_string(c + 1) + " ('" + rec[c] + "'): not numeric");
      if (!std::isfinite(v))
        throw ParseError("row " + std::to_string(line_numbers[r]) + ", column " +
                         std::to_string(c + 1) + ": non-finite value");
      values.push_back(v);
    }
  }

  // Class ids follow the lexicographic order of the label tokens.
  std::map<std::string, int> class_ids;
  for (const std::string& l : raw_labels) class_ids.emplace(l, 0);
  std::vector<std::string> class_names;
  for (auto& [name, id] : class_ids) {
    id = static_cast<int>(class_names.size());
    class_names.push_back(name);
  }
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const std::string& l : raw_labels) labels.push_back(class_ids[l]);

  (void)n_features;
  return Dataset(std::move(values), static_cast<int>(n_cols - 1), std::move(labels),
                 std::move(class_names), std::move(feature_names));
}

void write_csv(const Dataset& dataset, const std::string& path,
               const std::string& label_column_name) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (int c = 0; c < dataset.n_features(); ++c)
    out << csv_escape(dataset.feature_names()[static_cast<std::size_t>(c)]) << ',';
  out << csv_escape(label_column_name) << '\n';
  for (int r = 0; r < dataset.n_samples(); ++r) {
    for (int c = 0; c < dataset.n_features(); ++c) out << format_double(dataset.value(r, c)) << ',';
    out << csv_escape(dataset.class_names()[static_cast<std::size_t>(dataset.label(r))]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Synthetic data

Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_informative < 0 || spec.n_noise < 0)
    throw ValidationError("feature counts must be non-negative");
  if (spec.n_informative + spec.n_noise < 1)
    throw ValidationError("synthetic spec needs at least one feature");
  if (spec.n_samples < 4)
    throw ValidationError("synthetic spec needs at least 4 samples (2 per class)");
  if (!(spec.class_separation >= 0.0))
    throw ValidationError("class separation must be non-negative");

  const int n_features = spec.n_informative + spec.n_noise;
  Rng rng(mix_seed(spec.seed, 0xD5));

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(spec.n_samples) * static_cast<std::size_t>(n_features));
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(spec.n_samples));
  for (int r = 0; r < spec.n_samples; ++r) {
    const int cls = r % 2;  // alternate A,B so any prefix stays balanced
    labels.push_back(cls);
    for (int c = 0; c < n_features; ++c) {
      double v = rng.gaussian();
      if (c < spec.n_informative && cls == 1) v += spec.class_separation;
      values.push_back(v);
    }
  }

  std::vector<std::string> feature_names;
  for (int c = 0; c < n_features; ++c) feature_names.push_back("f" + std::to_string(c));
  return Dataset(std::move(values), n_features, std::move(labels), {"A", "B"},
                 std::move(feature_names));
}

// ---------------------------------------------------------------------------
// Stratified 5x2 plan

SplitPlan make_5x2_plan(const Dataset& dataset, std::uint64_t seed) {
  const std::vector<int> counts = dataset.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < 2)
      throw ValidationError("class '" + dataset.class_names()[c] +
                            "' has fewer than 2 samples; cannot stratify 2 folds");

  std::vector<std::vector<int>> by_class(counts.size());
  for (int r = 0; r < dataset.n_samples(); ++r)
    by_class[static_cast<std::size_t>(dataset.label(r))].push_back(r);

  SplitPlan plan;
  plan.seed = seed;
  plan.repetitions.resize(5);
  for (int rep = 0; rep < 5; ++rep) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    auto& [fold_a, fold_b] = plan.repetitions[static_cast<std::size_t>(rep)];
    bool odd_to_a = true;  // odd-sized classes alternate which fold gets the extra
    for (auto cls_rows : by_class) {
      rng.shuffle(cls_rows);
      bool to_a = true;
      if (cls_rows.size() % 2 == 1) {
        to_a = odd_to_a;
        odd_to_a = !odd_to_a;
      }
      for (int r : cls_rows) {
        (to_a ? fold_a : fold_b).push_back(r);
        to_a = !to_a;
      }
    }
    std::sort(fold_a.begin(), fold_a.end());
    std::sort(fold_b.begin(), fold_b.end());
  }
  return plan;
}

}  // namespace fsel
