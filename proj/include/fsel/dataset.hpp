#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsel/error.hpp"

namespace fsel {

/// Records which original rows were touched, grouped into named phases.
/// Harness runs attach one to audit that held-out rows never feed selection.
/// touch() is safe to call from concurrent scorers; begin_phase() is not and
/// must run between parallel regions.
class RowAccessLog {
 public:
  explicit RowAccessLog(int n_rows);

  void begin_phase(std::string name);
  void touch(int original_row) noexcept;

  int phase_count() const { return static_cast<int>(phases_.size()); }
  const std::string& phase_name(int p) const { return phases_[static_cast<std::size_t>(p)].name; }
  /// Ascending original row indices touched during phase p.
  std::vector<int> rows_touched(int p) const;
  /// Index of the first phase with this exact name, or -1.
  int find_phase(const std::string& name) const;

 private:
  struct Phase {
    std::string name;
    std::unique_ptr<std::atomic<std::uint8_t>[]> hit;
  };

  int n_rows_;
  std::vector<Phase> phases_;
  std::atomic<Phase*> current_{nullptr};
};

/// Immutable samples-by-features matrix with class labels and feature names.
/// Class names are kept sorted so that class ids give the lexicographic label
/// order used by every tie-break. Row-restricted copies remember the original
/// row each sample came from and keep reporting it to the attached access log.
class Dataset {
 public:
  /// Validates shape, finiteness, and that at least 2 classes are present.
  /// Per-class sample minimums are checked where they matter, at split time.
  Dataset(std::vector<double> values, int n_features, std::vector<int> labels,
          std::vector<std::string> class_names, std::vector<std::string> feature_names);

  int n_samples() const { return n_samples_; }
  int n_features() const { return n_features_; }
  int n_classes() const { return static_cast<int>(class_names_.size()); }

  double value(int row, int col) const {
    if (log_) log_->touch(origin_rows_[static_cast<std::size_t>(row)]);
    return values_[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_features_) +
                   static_cast<std::size_t>(col)];
  }

  int label(int row) const { return labels_[static_cast<std::size_t>(row)]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  /// Per-class sample counts, indexed by class id.
  std::vector<int> class_counts() const;

  /// Copy restricted to the given rows, in the given order. The copy shares
  /// the parent's class table and access log; its origin indices compose, so
  /// audits keep seeing original row numbers. Class-minimum invariants are
  /// not re-imposed on restricted copies (fold halves may hold single-sample
  /// classes).
  Dataset subset_rows(std::span<const int> rows) const;

  /// Copy keeping the given columns, in the given order.
  Dataset select_columns(std::span<const int> cols) const;

  void attach_access_log(RowAccessLog* log) { log_ = log; }
  RowAccessLog* access_log() const { return log_; }
  const std::vector<int>& origin_rows() const { return origin_rows_; }

 private:
  struct restricted_tag {};
  Dataset(restricted_tag, std::vector<double> values, int n_features, std::vector<int> labels,
          std::vector<std::string> class_names, std::vector<std::string> feature_names,
          std::vector<int> origin_rows, RowAccessLog* log);

  void check_shape_and_finite() const;

  int n_samples_ = 0;
  int n_features_ = 0;
  std::vector<double> values_;  // row-major
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::string> feature_names_;
  std::vector<int> origin_rows_;
  RowAccessLog* log_ = nullptr;
};

/// Five stratified 2-fold splits of the same sample set.
struct SplitPlan {
  struct Repetition {
    std::vector<int> fold_a;
    std::vector<int> fold_b;
  };
  std::vector<Repetition> repetitions;  // always 5
  std::uint64_t seed = 0;
};

/// Recipe for a two-class Gaussian dataset with planted informative columns.
struct SyntheticSpec {
  int n_samples = 0;
  int n_informative = 0;
  int n_noise = 0;
  double class_separation = 1.0;
  std::uint64_t seed = 0;
};

/// Loads a comma-separated dataset. The first line is a header iff any of its
/// cells is non-numeric. label_column names a header column or gives a
/// 0-based column index.
Dataset load_csv(const std::string& path, const std::string& label_column);

/// Writes the dataset with a header row; feature values use shortest
/// round-trip formatting, so load_csv(write_csv(d)) recovers d exactly.
void write_csv(const Dataset& dataset, const std::string& path,
               const std::string& label_column_name = "class");

/// Two balanced classes "A"/"B"; informative columns 0..n_informative-1 get a
/// class-conditional mean shift of class_separation, noise columns are
/// N(0,1) for both classes. Pure function of the spec.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Five independent stratified 2-fold splits. Per class and repetition the
/// fold counts differ by at most one; which fold receives the odd sample
/// alternates across odd-sized classes.
SplitPlan make_5x2_plan(const Dataset& dataset, std::uint64_t seed);

}  // namespace fsel
