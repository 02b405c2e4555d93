#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>

#include "fsel/dataset.hpp"
#include "fsel/mask.hpp"
#include "fsel/scorer.hpp"

namespace fsel {

enum class InducerKind { OneNn, Lda };

struct InducerConfig {
  InducerKind kind = InducerKind::OneNn;
  double lda_gamma = 1e-6;  // shrinkage toward mean(diag(S)) * I
};

InducerKind parse_inducer(const std::string& name);
std::string inducer_name(InducerKind kind);

/// Label of the training sample nearest to the query in Euclidean distance
/// restricted to masked columns; distance ties go to the lowest training
/// index. An empty mask predicts the majority class (label-order ties).
int predict_1nn(const Dataset& train, const FeatureMask& mask, std::span<const double> query);

/// Classic LDA with pooled within-class covariance S shrunk to
/// S + gamma*mean(diag(S))*I and empirical class priors. Returns one class id
/// per test row; posterior ties go to the lexicographically first label.
/// Throws SingularityError when the shrunk covariance cannot be factorized.
std::vector<int> fit_predict_lda(const Dataset& train, const FeatureMask& mask,
                                 const Dataset& test, double gamma);

/// Misclassification fraction of the configured inducer trained on `train`
/// and applied to `test`, both restricted to `mask`. Propagates
/// SingularityError from LDA.
double holdout_error(const Dataset& train, const Dataset& test, const FeatureMask& mask,
                     const InducerConfig& inducer);

/// Realizes subset usefulness as mean accuracy over the 10 fold pairs of one
/// stratified 5x2 plan drawn from inner_seed at construction. Scores are
/// memoized per mask; repeats skip the fit work but still count as calls.
/// An LDA singularity contributes that fold's accuracy as 0.
class SubsetScorer final : public Scorer {
 public:
  SubsetScorer(const Dataset& data, InducerConfig inducer, std::uint64_t inner_seed);

  double score(const FeatureMask& mask) override;
  int width() const override { return data_->n_features(); }
  std::uint64_t calls() const override { return calls_.load(std::memory_order_relaxed); }

  const SplitPlan& plan() const { return plan_; }

 private:
  double evaluate(const FeatureMask& mask) const;

  const Dataset* data_;
  InducerConfig inducer_;
  SplitPlan plan_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, double> memo_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace fsel
