#include "fsel/search.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "fsel/error.hpp"
#include "fsel/text.hpp"

namespace fsel {

SearchAlgorithm parse_algorithm(const std::string& name) {
  if (name == "sbg") return SearchAlgorithm::Sbg;
  if (name == "sbg+") return SearchAlgorithm::SbgPlus;
  if (name == "sfg") return SearchAlgorithm::Sfg;
  if (name == "sfg+") return SearchAlgorithm::SfgPlus;
  throw ValidationError("unknown algorithm '" + name + "' (expected sbg, sbg+, sfg, or sfg+)");
}

std::string algorithm_name(SearchAlgorithm algo) {
  switch (algo) {
    case SearchAlgorithm::Sbg: return "sbg";
    case SearchAlgorithm::SbgPlus: return "sbg+";
    case SearchAlgorithm::Sfg: return "sfg";
    case SearchAlgorithm::SfgPlus: return "sfg+";
  }
  return "sbg";
}

SearchDirection algorithm_direction(SearchAlgorithm algo) {
  return (algo == SearchAlgorithm::Sbg || algo == SearchAlgorithm::SbgPlus)
             ? SearchDirection::Backward
             : SearchDirection::Forward;
}

bool algorithm_accumulated(SearchAlgorithm algo) {
  return algo == SearchAlgorithm::SbgPlus || algo == SearchAlgorithm::SfgPlus;
}

namespace {

/// Scores all candidate moves; slot i of the result pairs with candidates[i].
/// Workers write disjoint slots, so results are independent of scheduling.
std::vector<double> score_candidates(Scorer& scorer, const std::vector<FeatureMask>& masks,
                                     int threads) {
  std::vector<double> scores(masks.size());
  const int n = static_cast<int>(masks.size());
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) scores[static_cast<std::size_t>(i)] = scorer.score(masks[static_cast<std::size_t>(i)]);
    return scores;
  }
  const int workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += workers)
        scores[static_cast<std::size_t>(i)] = scorer.score(masks[static_cast<std::size_t>(i)]);
    });
  }
  for (auto& th : pool) th.join();
  return scores;
}

SelectionResult run_generic(Scorer& scorer, SearchDirection direction, bool accumulated,
                            const SearchConfig& config) {
  const int n = scorer.width();
  if (n < 1) throw ValidationError("search needs at least one feature");
  if (accumulated && !(config.lambda >= 0.0 && config.lambda <= 1.0))
    throw ValidationError("lambda must lie in [0,1], got " + format_double(config.lambda));

  const bool backward = direction == SearchDirection::Backward;
  FeatureMask current = backward ? FeatureMask::full(n) : FeatureMask(n);
  AccumulatorTable table(n);
  std::optional<double> current_score;  // J of the surviving set, for literal bookkeeping

  SelectionResult result;
  result.trace.steps.reserve(static_cast<std::size_t>(n));
  const std::uint64_t calls_before = scorer.calls();

  for (int step = 0; step < n; ++step) {
    const std::vector<int> candidates = backward ? current.indices() : current.absent_indices();
    std::vector<FeatureMask> masks;
    masks.reserve(candidates.size());
    for (int x : candidates) masks.push_back(backward ? current.without(x) : current.with(x));
    const std::vector<double> scores = score_candidates(scorer, masks, config.threads);

    StepRecord record;
    record.pre_mask = current;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      record.evaluations.push_back({candidates[i], masks[i], scores[i]});

    if (accumulated) {
      // Evidence is folded in before the selection is made.
      if (config.accumulation == AccumulationMode::PerSubset) {
        for (std::size_t i = 0; i < candidates.size(); ++i)
          table.add_observation(masks[i], scores[i], config.weighting);
      } else {
        std::vector<double> by_feature(static_cast<std::size_t>(n), 0.0);
        for (std::size_t i = 0; i < candidates.size(); ++i)
          by_feature[static_cast<std::size_t>(candidates[i])] = scores[i];
        if (backward)
          table.add_backward_step(current, by_feature, current_score);
        else
          table.add_forward_step(current, by_feature, current_score);
      }
    }

    int chosen = -1;
    double best_merit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double merit =
          accumulated
              ? selection_merit(table, candidates[i], config.lambda, scores[i], direction)
              : scores[i];
      if (merit > best_merit) {  // strict: ties keep the lowest feature index
        best_merit = merit;
        chosen = static_cast<int>(i);
      }
    }

    record.chosen_feature = candidates[static_cast<std::size_t>(chosen)];
    record.post_mask = masks[static_cast<std::size_t>(chosen)];
    record.post_score = scores[static_cast<std::size_t>(chosen)];
    current = record.post_mask;
    current_score = record.post_score;
    result.trace.steps.push_back(std::move(record));
  }
  result.trace.call_count = scorer.calls() - calls_before;

  bool found = false;
  for (const StepRecord& s : result.trace.steps) {
    if (s.post_mask.none()) continue;
    const bool better =
        !found || s.post_score > result.best_score ||
        (s.post_score == result.best_score && s.post_mask.count() < result.best_mask.count());
    if (better) {
      result.best_mask = s.post_mask;
      result.best_score = s.post_score;
      found = true;
    }
  }
  if (!found) {
    // A width-1 backward run only ever scores the empty set.
    result.best_mask = FeatureMask::full(n);
    result.best_score = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace

SelectionResult run_sbg(Scorer& scorer, int threads) {
  SearchConfig config;
  config.threads = threads;
  return run_generic(scorer, SearchDirection::Backward, false, config);
}

SelectionResult run_sbg_plus(Scorer& scorer, const SearchConfig& config) {
  return run_generic(scorer, SearchDirection::Backward, true, config);
}

SelectionResult run_sfg(Scorer& scorer, int threads) {
  SearchConfig config;
  config.threads = threads;
  return run_generic(scorer, SearchDirection::Forward, false, config);
}

SelectionResult run_sfg_plus(Scorer& scorer, const SearchConfig& config) {
  return run_generic(scorer, SearchDirection::Forward, true, config);
}

SelectionResult run_search(Scorer& scorer, const SearchConfig& config) {
  return run_generic(scorer, algorithm_direction(config.algorithm),
                     algorithm_accumulated(config.algorithm), config);
}

void write_trace_csv(const SearchTrace& trace, std::ostream& out) {
  out << "step,candidate_feature,mask_bitstring,score,chosen_flag\n";
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const StepRecord& step = trace.steps[s];
    for (const Evaluation& e : step.evaluations) {
      out << (s + 1) << ',' << e.feature << ',' << e.mask.bitstring() << ','
          << format_double(e.score) << ',' << (e.feature == step.chosen_feature ? 1 : 0) << '\n';
    }
  }
}

void write_trace_csv(const SearchTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trace_csv(trace, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace fsel
