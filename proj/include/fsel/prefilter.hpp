#pragma once

#include <vector>

#include "fsel/dataset.hpp"

namespace fsel {

/// Features ordered by descending between/within sum-of-squares ratio.
struct RankedFeature {
  int feature = -1;
  double score = 0.0;  // +infinity when within-class scatter is exactly zero
};
using GeneRanking = std::vector<RankedFeature>;

/// Per feature j: BSS = sum_k n_k (mean_kj - mean_j)^2 over classes,
/// WSS = pooled within-class squared deviations. Score BSS/WSS, with
/// WSS = 0 mapping to +infinity when BSS > 0 and to 0 when BSS = 0.
/// Ties rank the lower feature index first.
GeneRanking bss_wss_rank(const Dataset& dataset);

struct TopKSelection {
  Dataset data;                // the k kept columns, in original column order
  std::vector<int> index_map;  // new column index -> original column index
};

TopKSelection select_top_k(const Dataset& dataset, const GeneRanking& ranking, int k);

}  // namespace fsel
