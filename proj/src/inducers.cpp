#include "fsel/inducers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fsel {

InducerKind parse_inducer(const std::string& name) {
  if (name == "1nn") return InducerKind::OneNn;
  if (name == "lda") return InducerKind::Lda;
  throw ValidationError("unknown inducer '" + name + "' (expected 1nn or lda)");
}

std::string inducer_name(InducerKind kind) {
  return kind == InducerKind::OneNn ? "1nn" : "lda";
}

namespace {

std::vector<int> all_rows(const Dataset& d) {
  std::vector<int> rows(static_cast<std::size_t>(d.n_samples()));
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

/// Majority class over the given rows; count ties go to the lowest class id,
/// which is the lexicographically first label.
int majority_class(const Dataset& d, const std::vector<int>& rows) {
  std::vector<int> counts(static_cast<std::size_t>(d.n_classes()), 0);
  for (int r : rows) ++counts[static_cast<std::size_t>(d.label(r))];
  int best = 0;
  for (int c = 1; c < d.n_classes(); ++c)
    if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
  return best;
}

template <class QueryAt>
int nn_core(const Dataset& d, const std::vector<int>& train_rows, const std::vector<int>& cols,
            QueryAt query_at) {
  int best_row = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int r : train_rows) {
    double dist = 0.0;
    for (int c : cols) {
      const double diff = d.value(r, c) - query_at(c);
      dist += diff * diff;
    }
    if (dist < best_dist) {  // strict: equal distances keep the earlier row
      best_dist = dist;
      best_row = r;
    }
  }
  return d.label(best_row);
}

struct LdaModel {
  std::vector<int> class_ids;  // classes present in the training rows
  Eigen::MatrixXd w;           // d x K, column k holds S^-1 mu_k
  Eigen::VectorXd b;           // K offsets: -mu_k' S^-1 mu_k / 2 + ln prior_k
  int majority = 0;            // used when the mask is empty
  bool prior_only = false;
};

LdaModel lda_fit(const Dataset& d, const std::vector<int>& rows, const std::vector<int>& cols,
                 double gamma) {
  if (gamma < 0.0) throw ValidationError("LDA shrinkage gamma must be non-negative");

  std::vector<int> counts(static_cast<std::size_t>(d.n_classes()), 0);
  for (int r : rows) ++counts[static_cast<std::size_t>(d.label(r))];
  std::vector<int> present;
  for (int c = 0; c < d.n_classes(); ++c)
    if (counts[static_cast<std::size_t>(c)] > 0) present.push_back(c);
  if (present.size() < 2) throw ValidationError("LDA needs at least 2 classes in the training set");

  LdaModel model;
  model.class_ids = present;

  const int dim = static_cast<int>(cols.size());
  if (dim == 0) {
    model.prior_only = true;
    model.majority = majority_class(d, rows);
    return model;
  }

  const int n = static_cast<int>(rows.size());
  const int k = static_cast<int>(present.size());
  if (n - k <= 0) throw SingularityError("too few samples per class to pool a covariance");

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(dim, k);
  std::vector<int> class_pos(static_cast<std::size_t>(d.n_classes()), -1);
  for (int j = 0; j < k; ++j) class_pos[static_cast<std::size_t>(present[static_cast<std::size_t>(j)])] = j;

  for (int r : rows) {
    const int j = class_pos[static_cast<std::size_t>(d.label(r))];
    for (int c = 0; c < dim; ++c)
      means(c, j) += d.value(r, cols[static_cast<std::size_t>(c)]);
  }
  for (int j = 0; j < k; ++j)
    means.col(j) /= static_cast<double>(counts[static_cast<std::size_t>(present[static_cast<std::size_t>(j)])]);

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd x(dim);
  for (int r : rows) {
    const int j = class_pos[static_cast<std::size_t>(d.label(r))];
    for (int c = 0; c < dim; ++c)
      x(c) = d.value(r, cols[static_cast<std::size_t>(c)]) - means(c, j);
    scatter.noalias() += x * x.transpose();
  }
  Eigen::MatrixXd s = scatter / static_cast<double>(n - k);
  const double ridge = gamma * s.diagonal().mean();
  s.diagonal().array() += ridge;

  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw SingularityError("pooled within-class covariance is singular");

  model.w = llt.solve(means);
  model.b.resize(k);
  for (int j = 0; j < k; ++j) {
    const double prior = static_cast<double>(counts[static_cast<std::size_t>(present[static_cast<std::size_t>(j)])]) /
                         static_cast<double>(n);
    model.b(j) = -0.5 * means.col(j).dot(model.w.col(j)) + std::log(prior);
  }
  return model;
}

int lda_predict(const LdaModel& model, const Eigen::VectorXd& query) {
  if (model.prior_only) return model.majority;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(model.class_ids.size()); ++j) {
    const double score = model.w.col(j).dot(query) + model.b(j);
    if (score > best_score) {  // strict: ties keep the lowest class id
      best_score = score;
      best = j;
    }
  }
  return model.class_ids[static_cast<std::size_t>(best)];
}

double fold_accuracy(const Dataset& d, const std::vector<int>& train_rows,
                     const std::vector<int>& test_rows, const std::vector<int>& cols,
                     const InducerConfig& inducer) {
  if (test_rows.empty()) throw ValidationError("empty test fold");
  int correct = 0;
  if (cols.empty()) {
    const int maj = majority_class(d, train_rows);
    for (int r : test_rows)
      if (d.label(r) == maj) ++correct;
  } else if (inducer.kind == InducerKind::OneNn) {
    for (int r : test_rows) {
      const int pred = nn_core(d, train_rows, cols, [&](int c) { return d.value(r, c); });
      if (pred == d.label(r)) ++correct;
    }
  } else {
    const LdaModel model = lda_fit(d, train_rows, cols, inducer.lda_gamma);
    Eigen::VectorXd q(static_cast<int>(cols.size()));
    for (int r : test_rows) {
      for (int c = 0; c < static_cast<int>(cols.size()); ++c)
        q(c) = d.value(r, cols[static_cast<std::size_t>(c)]);
      if (lda_predict(model, q) == d.label(r)) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(test_rows.size());
}

}  // namespace

int predict_1nn(const Dataset& train, const FeatureMask& mask, std::span<const double> query) {
  if (train.n_samples() == 0) throw ValidationError("1NN needs a non-empty training set");
  if (mask.width() != train.n_features())
    throw ValidationError("mask width does not match the feature count");
  if (static_cast<int>(query.size()) != train.n_features())
    throw ValidationError("query length does not match the feature count");
  const std::vector<int> rows = all_rows(train);
  const std::vector<int> cols = mask.indices();
  if (cols.empty()) return majority_class(train, rows);
  return nn_core(train, rows, cols, [&](int c) { return query[static_cast<std::size_t>(c)]; });
}

std::vector<int> fit_predict_lda(const Dataset& train, const FeatureMask& mask,
                                 const Dataset& test, double gamma) {
  if (mask.width() != train.n_features())
    throw ValidationError("mask width does not match the feature count");
  if (test.n_features() != train.n_features())
    throw ValidationError("test feature count does not match the training set");
  const LdaModel model = lda_fit(train, all_rows(train), mask.indices(), gamma);
  const std::vector<int> cols = mask.indices();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test.n_samples()));
  Eigen::VectorXd q(std::max<int>(1, static_cast<int>(cols.size())));
  for (int r = 0; r < test.n_samples(); ++r) {
    for (int c = 0; c < static_cast<int>(cols.size()); ++c)
      q(c) = test.value(r, cols[static_cast<std::size_t>(c)]);
    out.push_back(lda_predict(model, q));
  }
  return out;
}

double holdout_error(const Dataset& train, const Dataset& test, const FeatureMask& mask,
                     const InducerConfig& inducer) {
  if (test.n_samples() == 0) throw ValidationError("empty test set");
  const std::vector<int> cols = mask.indices();
  int correct = 0;
  if (cols.empty()) {
    const int maj = majority_class(train, all_rows(train));
    for (int r = 0; r < test.n_samples(); ++r)
      if (test.label(r) == maj) ++correct;
  } else if (inducer.kind == InducerKind::OneNn) {
    const std::vector<int> rows = all_rows(train);
    for (int r = 0; r < test.n_samples(); ++r) {
      const int pred = nn_core(train, rows, cols, [&](int c) { return test.value(r, c); });
      if (pred == test.label(r)) ++correct;
    }
  } else {
    const std::vector<int> preds = fit_predict_lda(train, mask, test, inducer.lda_gamma);
    for (int r = 0; r < test.n_samples(); ++r)
      if (preds[static_cast<std::size_t>(r)] == test.label(r)) ++correct;
  }
  return 1.0 - static_cast<double>(correct) / static_cast<double>(test.n_samples());
}

SubsetScorer::SubsetScorer(const Dataset& data, InducerConfig inducer, std::uint64_t inner_seed)
    : data_(&data), inducer_(inducer), plan_(make_5x2_plan(data, inner_seed)) {
  if (inducer_.lda_gamma < 0.0) throw ValidationError("LDA shrinkage gamma must be non-negative");
}

double SubsetScorer::score(const FeatureMask& mask) {
  if (mask.width() != data_->n_features())
    throw ValidationError("mask width does not match the dataset");
  calls_.fetch_add(1, std::memory_order_relaxed);
  const std::string key = mask.bitstring();
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const double value = evaluate(mask);
  {
    std::lock_guard<std::mutex> lock(mu_);
    memo_.emplace(key, value);
  }
  return value;
}

double SubsetScorer::evaluate(const FeatureMask& mask) const {
  const std::vector<int> cols = mask.indices();
  double total = 0.0;
  for (const auto& rep : plan_.repetitions) {
    for (int orientation = 0; orientation < 2; ++orientation) {
      const std::vector<int>& train_rows = orientation == 0 ? rep.fold_a : rep.fold_b;
      const std::vector<int>& test_rows = orientation == 0 ? rep.fold_b : rep.fold_a;
      double acc;
      try {
        acc = fold_accuracy(*data_, train_rows, test_rows, cols, inducer_);
      } catch (const SingularityError&) {
        acc = 0.0;  // unaffordable fold under LDA counts as total miss
      }
      total += acc;
    }
  }
  return total / 10.0;
}

}  // namespace fsel
