#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fsel/mask.hpp"

namespace fsel {

/// Weight given to one subset observation when it is folded into a feature's
/// evidence: 1, |X|/n, or the observation's own score.
enum class WeightingKind { Unit, SizeFraction, ScoreWeighted };

WeightingKind parse_weighting(const std::string& name);
std::string weighting_name(WeightingKind kind);

double weighting_value(WeightingKind kind, const FeatureMask& mask, double score);

enum class SearchDirection { Backward, Forward };
enum class AccumulationMode { PerSubset, LiteralAlg2 };

AccumulationMode parse_accumulation(const std::string& name);
std::string accumulation_name(AccumulationMode mode);

/// Per-feature running evidence: weighted score sums and weights over the
/// evaluated subsets that contain / don't contain the feature, plus raw
/// observation counters.
class AccumulatorTable {
 public:
  explicit AccumulatorTable(int width);

  int width() const { return width_; }

  /// Folds one evaluated (subset, score) pair into every feature's matching
  /// side. Scores must lie in [0,1].
  void add_observation(const FeatureMask& mask, double score, WeightingKind weighting);

  /// Verbatim backward-step bookkeeping of the accumulated search pseudocode:
  /// each member of `current` gains the SUM of the other members' removal
  /// scores on its plus side (counter +1), each non-member gains the current
  /// set's own cached score on its minus side. Unit weights throughout.
  /// `removal_scores` is indexed by feature; only entries for members of
  /// `current` are read. `current_score` may be empty only when `current` is
  /// the full set (no non-member exists to update).
  void add_backward_step(const FeatureMask& current, const std::vector<double>& removal_scores,
                         std::optional<double> current_score);

  /// Mirror image for forward steps: each non-member of `current` gains the
  /// sum of the other candidates' addition scores on its minus side, each
  /// member gains the cached current-set score on its plus side.
  void add_forward_step(const FeatureMask& current, const std::vector<double>& addition_scores,
                        std::optional<double> current_score);

  double plus_sum(int x) const { return cells_[idx(x)].plus_sum; }
  double plus_weight(int x) const { return cells_[idx(x)].plus_weight; }
  double minus_sum(int x) const { return cells_[idx(x)].minus_sum; }
  double minus_weight(int x) const { return cells_[idx(x)].minus_weight; }
  std::uint64_t n_plus(int x) const { return cells_[idx(x)].n_plus; }
  std::uint64_t n_minus(int x) const { return cells_[idx(x)].n_minus; }

  /// Weighted average of one side; empty when that side has zero weight.
  std::optional<double> plus_average(int x) const;
  std::optional<double> minus_average(int x) const;

 private:
  struct Cell {
    double plus_sum = 0.0;
    double plus_weight = 0.0;
    double minus_sum = 0.0;
    double minus_weight = 0.0;
    std::uint64_t n_plus = 0;
    std::uint64_t n_minus = 0;
  };

  std::size_t idx(int x) const;

  int width_;
  std::vector<Cell> cells_;
};

/// Combined step score mixing accumulated evidence with the current-step
/// evaluation j_hat: (lambda/2) * (avg+ - avg- + 1) + (1 - lambda) * j_hat.
/// A side with zero weight falls back to j_hat, which neutralizes the
/// evidence term toward conventional behavior instead of inventing evidence.
double estimated_relevance(const AccumulatorTable& table, int feature, double lambda,
                           double j_hat);

/// Step-selection merit. Forward steps rank candidates by
/// estimated_relevance directly (add the feature the evidence favors).
/// Backward steps rank by the mirrored evidence term
/// (lambda/2) * (avg- - avg+ + 1) + (1 - lambda) * j_hat, so the removed
/// feature is the one the evidence speaks against; at lambda = 0 both reduce
/// exactly to j_hat.
double selection_merit(const AccumulatorTable& table, int feature, double lambda, double j_hat,
                       SearchDirection direction);

/// Exact exponential-cost relevance statistics over all 2^n subsets.
struct ExactOracleResult {
  int width = 0;
  std::vector<double> plus_mean;            // mean score of subsets containing x
  std::vector<double> minus_mean;           // mean score of subsets lacking x
  std::vector<double> relevance;            // plus_mean - minus_mean
  std::vector<double> relevance_compact;    // same value via paired differences
  std::vector<double> relevance_weighted;   // weighted paired differences
};

/// Enumerates every subset once and evaluates score_fn on it. Refuses widths
/// above n_guard.
ExactOracleResult exact_relevance(const std::function<double(const FeatureMask&)>& score_fn,
                                  int n, WeightingKind weighting, int n_guard = 20);

/// Truth table mapping every subset of n features to a score.
struct ScoreTable {
  int width = 0;
  std::vector<double> scores;  // indexed by FeatureMask::to_uint()

  double at(const FeatureMask& mask) const { return scores[mask.to_uint()]; }
};

/// Reads "bitstring,score" lines; every one of the 2^n subsets must appear
/// exactly once.
ScoreTable load_score_table(const std::string& path);

}  // namespace fsel
