#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsel/mask.hpp"
#include "fsel/relevance.hpp"
#include "fsel/scorer.hpp"

namespace fsel {

enum class SearchAlgorithm { Sbg, SbgPlus, Sfg, SfgPlus };

SearchAlgorithm parse_algorithm(const std::string& name);
std::string algorithm_name(SearchAlgorithm algo);
SearchDirection algorithm_direction(SearchAlgorithm algo);
bool algorithm_accumulated(SearchAlgorithm algo);

struct SearchConfig {
  SearchAlgorithm algorithm = SearchAlgorithm::Sbg;
  double lambda = 2.0 / 3.0;  // ignored by the plain variants
  WeightingKind weighting = WeightingKind::Unit;
  AccumulationMode accumulation = AccumulationMode::PerSubset;
  int threads = 1;
};

/// One scored candidate move.
struct Evaluation {
  int feature = -1;      // feature whose add/remove produced `mask`
  FeatureMask mask;      // the evaluated subset
  double score = 0.0;
};

/// One search step: every candidate evaluation in ascending feature order,
/// plus the surviving subset.
struct StepRecord {
  FeatureMask pre_mask;
  std::vector<Evaluation> evaluations;
  int chosen_feature = -1;
  FeatureMask post_mask;
  double post_score = 0.0;
};

/// Full record of a search run; the audit surface for equivalence and replay
/// checks. call_count is n(n+1)/2 for a full run of width n.
struct SearchTrace {
  std::vector<StepRecord> steps;
  std::uint64_t call_count = 0;
};

/// Best subset along the trace: the highest-scoring post-step survivor, the
/// empty set excluded; score ties go to the smaller subset. A width-1
/// backward run has no non-empty survivor; it yields the full mask with a
/// NaN score rather than spending an extra scorer call.
struct SelectionResult {
  FeatureMask best_mask;
  double best_score = 0.0;
  SearchTrace trace;
};

/// Sequential backward elimination: start from the full set, each step drops
/// the feature whose removal maximizes the score (ties toward the lowest
/// feature index), down to the empty set with no stopping criterion.
SelectionResult run_sbg(Scorer& scorer, int threads = 1);

/// Backward elimination with accumulated evidence: identical evaluation
/// schedule to run_sbg; every step first folds its evaluations into the
/// accumulator table (per config.accumulation), then removes the feature
/// maximizing the backward selection merit at config.lambda. lambda = 0
/// reproduces run_sbg trace-for-trace.
SelectionResult run_sbg_plus(Scorer& scorer, const SearchConfig& config);

/// Forward mirror images: start from the empty set and add features.
SelectionResult run_sfg(Scorer& scorer, int threads = 1);
SelectionResult run_sfg_plus(Scorer& scorer, const SearchConfig& config);

/// Dispatch on config.algorithm.
SelectionResult run_search(Scorer& scorer, const SearchConfig& config);

/// One CSV row per evaluation: step,candidate_feature,mask_bitstring,score,
/// chosen_flag. Scores use shortest round-trip formatting, so equal traces
/// produce byte-identical files.
void write_trace_csv(const SearchTrace& trace, std::ostream& out);
void write_trace_csv(const SearchTrace& trace, const std::string& path);

}  // namespace fsel
