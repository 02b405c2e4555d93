#include "fsel/prefilter.hpp"

#include <algorithm>
#include <limits>

#include "fsel/error.hpp"

namespace fsel {

GeneRanking bss_wss_rank(const Dataset& dataset) {
  const int n = dataset.n_samples();
  const int p = dataset.n_features();
  const int k = dataset.n_classes();
  const std::vector<int> counts = dataset.class_counts();
  int present = 0;
  for (int c : counts)
    if (c > 0) ++present;
  if (present < 2) throw ValidationError("BSS/WSS ranking needs at least 2 classes");

  GeneRanking ranking;
  ranking.reserve(static_cast<std::size_t>(p));
  std::vector<double> class_mean(static_cast<std::size_t>(k));
  for (int j = 0; j < p; ++j) {
    double grand = 0.0;
    std::fill(class_mean.begin(), class_mean.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double v = dataset.value(i, j);
      grand += v;
      class_mean[static_cast<std::size_t>(dataset.label(i))] += v;
    }
    grand /= static_cast<double>(n);
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        class_mean[static_cast<std::size_t>(c)] /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    double bss = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const double d = class_mean[static_cast<std::size_t>(c)] - grand;
      bss += static_cast<double>(counts[static_cast<std::size_t>(c)]) * d * d;
    }
    double wss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = dataset.value(i, j) - class_mean[static_cast<std::size_t>(dataset.label(i))];
      wss += d * d;
    }

    double score;
    if (wss == 0.0)
      score = bss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    else
      score = bss / wss;
    ranking.push_back({j, score});
  }

  std::stable_sort(ranking.begin(), ranking.end(), [](const RankedFeature& a, const RankedFeature& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature < b.feature;
  });
  return ranking;
}

TopKSelection select_top_k(const Dataset& dataset, const GeneRanking& ranking, int k) {
  if (k < 1) throw ValidationError("top-k selection needs k >= 1");
  if (k > dataset.n_features())
    throw ValidationError("k = " + std::to_string(k) + " exceeds the feature count of " +
                          std::to_string(dataset.n_features()));
  if (ranking.size() != static_cast<std::size_t>(dataset.n_features()))
    throw ValidationError("ranking does not cover every feature");

  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) keep.push_back(ranking[static_cast<std::size_t>(i)].feature);
  std::sort(keep.begin(), keep.end());  // original column order survives selection

  TopKSelection sel{dataset.select_columns(keep), std::move(keep)};
  return sel;
}

}  // namespace fsel
