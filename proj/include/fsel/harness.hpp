#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsel/dataset.hpp"
#include "fsel/inducers.hpp"
#include "fsel/relevance.hpp"

namespace fsel {

/// Paired outer-5x2cv experiment: on each outer training half, run the plain
/// and the accumulated search with identical scorer seeds, then measure both
/// returned subsets on the held-out half.
struct ExperimentConfig {
  InducerConfig inducer;
  std::optional<int> prefilter_k;  // BSS/WSS top-k, re-ranked per training fold
  bool global_prefilter = false;   // rank once on the full data instead (leaks rows)
  SearchDirection direction = SearchDirection::Backward;
  double lambda = 2.0 / 3.0;
  WeightingKind weighting = WeightingKind::Unit;
  AccumulationMode accumulation = AccumulationMode::PerSubset;
  std::uint64_t outer_seed = 0;
  std::uint64_t inner_seed = 0;
  int threads = 1;
};

struct FoldOutcome {
  int fold = 0;        // 0..9
  int repetition = 0;  // 0..4
  int train_half = 0;  // 0: fold A trains, 1: fold B trains
  std::string algorithm;
  double test_error = 0.0;
  int subset_size = 0;
  std::vector<std::string> members;  // original feature names
  bool refit_singular = false;       // final LDA refit failed; error recorded as 1.0
};

struct ExperimentReport {
  std::string plain_label;  // "sbg" or "sfg"
  std::string plus_label;   // "sbg+" or "sfg+"
  std::vector<FoldOutcome> rows;  // 20 rows: per fold, plain then plus
  double mean_error_plain = 0.0;
  double mean_error_plus = 0.0;
  double mean_size_plain = 0.0;
  double mean_size_plus = 0.0;
  std::vector<double> paired_error_diff;  // per fold: plus - plain
  std::vector<double> paired_size_diff;

  const FoldOutcome& row(int fold, bool plus) const;
};

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config);

/// CSV with one row per (fold, algorithm) under the header
/// fold,repetition,orientation,algorithm,test_error,subset_size,subset_members
/// followed by a trailing aggregate block (mean and paired-mean-diff rows).
void write_report_csv(const ExperimentReport& report, std::ostream& out);
void write_report_csv(const ExperimentReport& report, const std::string& path);

/// Parses a file produced by write_report_csv.
ExperimentReport read_report_csv(const std::string& path);

/// Human-readable summary: mean test error (percent, one decimal) and mean
/// subset size per algorithm, plus any refit warnings.
void print_summary(const ExperimentReport& report, std::ostream& out);

}  // namespace fsel
