#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fsel/dataset.hpp"
#include "fsel/inducers.hpp"
#include "fsel/rng.hpp"
#include "fsel/search.hpp"

using namespace fsel;

namespace {

/// J(X) = |X ∩ {f0,f1}| / 2 - 0.1 |X ∩ {f2}|; two useful features, one
/// mildly harmful one.
double toy3(const FeatureMask& m) {
  return (static_cast<double>(m.test(0)) + static_cast<double>(m.test(1))) / 2.0 -
         0.1 * static_cast<double>(m.test(2));
}

std::string trace_string(const SearchTrace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

std::vector<int> removal_order(const SelectionResult& r) {
  std::vector<int> order;
  for (const StepRecord& s : r.trace.steps) order.push_back(s.chosen_feature);
  return order;
}

}  // namespace

TEST_CASE("sbg walks the three-feature example as derived by hand") {
  FunctionScorer scorer(3, toy3);
  const SelectionResult r = run_sbg(scorer);

  REQUIRE(r.trace.steps.size() == 3);
  const StepRecord& s1 = r.trace.steps[0];
  REQUIRE(s1.evaluations.size() == 3);
  CHECK(s1.evaluations[0].score == doctest::Approx(0.4));  // drop f0
  CHECK(s1.evaluations[1].score == doctest::Approx(0.4));  // drop f1
  CHECK(s1.evaluations[2].score == doctest::Approx(1.0));  // drop f2
  CHECK(s1.chosen_feature == 2);

  const StepRecord& s2 = r.trace.steps[1];
  CHECK(s2.evaluations[0].score == doctest::Approx(0.5));
  CHECK(s2.evaluations[1].score == doctest::Approx(0.5));
  CHECK(s2.chosen_feature == 0);  // tie resolved toward the lowest index

  CHECK(r.best_mask == FeatureMask::of(3, {0, 1}));
  CHECK(r.best_score == doctest::Approx(1.0));
  CHECK(r.trace.call_count == 6);
}

TEST_CASE("width-one backward search degenerates to the full mask") {
  FunctionScorer scorer(1, [](const FeatureMask& m) { return m.none() ? 0.3 : 0.9; });
  const SelectionResult r = run_sbg(scorer);
  REQUIRE(r.trace.steps.size() == 1);
  CHECK(r.trace.steps[0].evaluations.size() == 1);
  CHECK(r.trace.steps[0].evaluations[0].mask.none());
  CHECK(r.trace.call_count == 1);
  CHECK(r.best_mask == FeatureMask::full(1));
  CHECK(std::isnan(r.best_score));  // the full set is never scored on this path
}

TEST_CASE("all four algorithms issue exactly n(n+1)/2 scorer calls") {
  Rng rng(6);
  for (int n = 1; n <= 12; ++n) {
    std::vector<double> table(std::size_t{1} << n);
    for (double& v : table) v = rng.uniform01();
    const auto fn = [&table](const FeatureMask& m) { return table[m.to_uint()]; };
    const std::uint64_t expected = static_cast<std::uint64_t>(n) * (n + 1) / 2;

    for (double lambda : {0.0, 2.0 / 3.0, 1.0}) {
      for (AccumulationMode mode : {AccumulationMode::PerSubset, AccumulationMode::LiteralAlg2}) {
        for (SearchAlgorithm algo : {SearchAlgorithm::Sbg, SearchAlgorithm::SbgPlus,
                                     SearchAlgorithm::Sfg, SearchAlgorithm::SfgPlus}) {
          FunctionScorer scorer(n, fn);
          SearchConfig config;
          config.algorithm = algo;
          config.lambda = lambda;
          config.accumulation = mode;
          const SelectionResult r = run_search(scorer, config);
          CHECK(r.trace.call_count == expected);
          CHECK(scorer.calls() == expected);
        }
      }
    }
  }
}

TEST_CASE("lambda zero makes the plus variants byte-identical to the plain ones") {
  Rng rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(7));
    std::vector<double> table(std::size_t{1} << n);
    for (double& v : table) v = rng.uniform01();
    const auto fn = [&table](const FeatureMask& m) { return table[m.to_uint()]; };

    for (AccumulationMode mode : {AccumulationMode::PerSubset, AccumulationMode::LiteralAlg2}) {
      SearchConfig config;
      config.lambda = 0.0;
      config.accumulation = mode;

      FunctionScorer s1(n, fn);
      const SelectionResult plain_b = run_sbg(s1);
      FunctionScorer s2(n, fn);
      config.algorithm = SearchAlgorithm::SbgPlus;
      const SelectionResult plus_b = run_sbg_plus(s2, config);
      CHECK(trace_string(plain_b.trace) == trace_string(plus_b.trace));
      CHECK(plain_b.best_mask == plus_b.best_mask);
      CHECK(plain_b.best_score == plus_b.best_score);

      FunctionScorer s3(n, fn);
      const SelectionResult plain_f = run_sfg(s3);
      FunctionScorer s4(n, fn);
      config.algorithm = SearchAlgorithm::SfgPlus;
      const SelectionResult plus_f = run_sfg_plus(s4, config);
      CHECK(trace_string(plain_f.trace) == trace_string(plus_f.trace));
      CHECK(plain_f.best_mask == plus_f.best_mask);
    }
  }
}

TEST_CASE("accumulated backward search on the toy removes the harmful feature first") {
  FunctionScorer scorer(3, toy3);
  SearchConfig config;
  config.algorithm = SearchAlgorithm::SbgPlus;
  config.lambda = 2.0 / 3.0;
  const SelectionResult r = run_sbg_plus(scorer, config);

  // Step 1 evidence after accumulating (0.4, 0.4, 1.0): subsets holding f2
  // average 0.4 while the one without it scores 1.0, so both the evidence
  // and the removal score point at f2.
  CHECK(removal_order(r) == std::vector<int>{2, 0, 1});
  CHECK(r.best_mask == FeatureMask::of(3, {0, 1}));
  CHECK(r.best_score == doctest::Approx(1.0));
}

TEST_CASE("accumulated backward search in literal mode matches its hand simulation") {
  FunctionScorer scorer(3, toy3);
  SearchConfig config;
  config.algorithm = SearchAlgorithm::SbgPlus;
  config.lambda = 2.0 / 3.0;
  config.accumulation = AccumulationMode::LiteralAlg2;
  const SelectionResult r = run_sbg_plus(scorer, config);
  CHECK(removal_order(r) == std::vector<int>{2, 0, 1});
  CHECK(r.best_mask == FeatureMask::of(3, {0, 1}));
}

TEST_CASE("sfg walks the three-feature example as derived by hand") {
  FunctionScorer scorer(3, toy3);
  const SelectionResult r = run_sfg(scorer);

  const StepRecord& s1 = r.trace.steps[0];
  REQUIRE(s1.evaluations.size() == 3);
  CHECK(s1.evaluations[0].score == doctest::Approx(0.5));
  CHECK(s1.evaluations[1].score == doctest::Approx(0.5));
  CHECK(s1.evaluations[2].score == doctest::Approx(-0.1));
  CHECK(s1.chosen_feature == 0);  // tie resolved toward the lowest index

  CHECK(r.best_mask == FeatureMask::of(3, {0, 1}));
  CHECK(r.best_score == doctest::Approx(1.0));
  CHECK(r.trace.call_count == 6);
}

TEST_CASE("monotone score functions favor large sets in both directions") {
  const int n = 5;
  const auto fn = [n](const FeatureMask& m) {
    return static_cast<double>(m.count()) / static_cast<double>(n);
  };

  FunctionScorer forward(n, fn);
  const SelectionResult f = run_sfg(forward);
  CHECK(f.best_mask == FeatureMask::full(n));
  CHECK(f.best_score == doctest::Approx(1.0));

  // The backward trace never scores the full set, so its best survivor is the
  // largest strict subset.
  FunctionScorer backward(n, fn);
  const SelectionResult b = run_sbg(backward);
  CHECK(b.best_mask.count() == n - 1);
  CHECK(b.best_score == doctest::Approx(static_cast<double>(n - 1) / n));
}

TEST_CASE("trace chains and cardinalities are coherent") {
  Rng rng(17);
  for (SearchAlgorithm algo : {SearchAlgorithm::Sbg, SearchAlgorithm::SbgPlus,
                               SearchAlgorithm::Sfg, SearchAlgorithm::SfgPlus}) {
    const int n = 6;
    std::vector<double> table(std::size_t{1} << n);
    for (double& v : table) v = rng.uniform01();
    FunctionScorer scorer(n, [&table](const FeatureMask& m) { return table[m.to_uint()]; });
    SearchConfig config;
    config.algorithm = algo;
    const SelectionResult r = run_search(scorer, config);

    const bool backward = algorithm_direction(algo) == SearchDirection::Backward;
    REQUIRE(r.trace.steps.size() == static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < r.trace.steps.size(); ++s) {
      const StepRecord& step = r.trace.steps[s];
      const int expected_pre = backward ? n - static_cast<int>(s) : static_cast<int>(s);
      CHECK(step.pre_mask.count() == expected_pre);
      CHECK(step.post_mask.count() == expected_pre + (backward ? -1 : 1));
      if (s > 0) CHECK(r.trace.steps[s - 1].post_mask == step.pre_mask);
      // Evaluations are recorded in ascending feature order.
      for (std::size_t i = 1; i < step.evaluations.size(); ++i)
        CHECK(step.evaluations[i - 1].feature < step.evaluations[i].feature);
    }

    // Best-of-trace: non-empty, and never beaten by another survivor.
    CHECK_FALSE(r.best_mask.none());
    for (const StepRecord& step : r.trace.steps)
      if (!step.post_mask.none()) CHECK(r.best_score >= step.post_score);
  }
}

TEST_CASE("best-of-trace score ties prefer the smaller subset") {
  // Forward: {f0} and {f0,f1} both score 0.9.
  FunctionScorer scorer(2, [](const FeatureMask& m) {
    if (m.none()) return 0.0;
    if (m.test(0) && !m.test(1)) return 0.9;
    if (m.test(0) && m.test(1)) return 0.9;
    return 0.3;
  });
  const SelectionResult r = run_sfg(scorer);
  CHECK(r.best_mask == FeatureMask::of(2, {0}));
  CHECK(r.best_score == doctest::Approx(0.9));
}

TEST_CASE("searches are reproducible run to run") {
  const Dataset d = generate_synthetic({.n_samples = 28, .n_informative = 2, .n_noise = 4,
                                        .class_separation = 1.5, .seed = 2});
  SearchConfig config;
  config.algorithm = SearchAlgorithm::SbgPlus;
  config.lambda = 2.0 / 3.0;

  SubsetScorer s1(d, {.kind = InducerKind::OneNn}, 5);
  const SelectionResult r1 = run_search(s1, config);
  SubsetScorer s2(d, {.kind = InducerKind::OneNn}, 5);
  const SelectionResult r2 = run_search(s2, config);
  CHECK(r1.best_mask == r2.best_mask);
  CHECK(r1.best_score == r2.best_score);
  CHECK(trace_string(r1.trace) == trace_string(r2.trace));
}

TEST_CASE("parallel scoring leaves results unchanged") {
  const Dataset d = generate_synthetic({.n_samples = 24, .n_informative = 2, .n_noise = 5,
                                        .class_separation = 1.0, .seed = 14});
  SubsetScorer serial(d, {.kind = InducerKind::OneNn}, 9);
  const SelectionResult r1 = run_sbg(serial, 1);
  SubsetScorer parallel(d, {.kind = InducerKind::OneNn}, 9);
  const SelectionResult r2 = run_sbg(parallel, 4);
  CHECK(trace_string(r1.trace) == trace_string(r2.trace));
  CHECK(r1.best_mask == r2.best_mask);
  CHECK(serial.calls() == parallel.calls());
}

namespace {

/// Independent per-subset replay: accumulate every evaluated subset into
/// every feature's matching side, then take the step argmax. Shares no code
/// with the library path.
std::vector<int> replay_per_subset(const std::vector<double>& table, int n, double lambda,
                                   bool backward) {
  std::vector<double> plus_sum(static_cast<std::size_t>(n), 0.0);
  std::vector<double> minus_sum(static_cast<std::size_t>(n), 0.0);
  std::vector<long> plus_n(static_cast<std::size_t>(n), 0);
  std::vector<long> minus_n(static_cast<std::size_t>(n), 0);
  std::uint32_t current = backward ? (std::uint32_t{1} << n) - 1 : 0;
  std::vector<int> chosen_order;

  for (int step = 0; step < n; ++step) {
    std::vector<int> candidates;
    std::vector<std::uint32_t> moves;
    for (int f = 0; f < n; ++f) {
      const bool in = (current & (1u << f)) != 0;
      if (backward == in) {
        candidates.push_back(f);
        moves.push_back(backward ? (current & ~(1u << f)) : (current | (1u << f)));
      }
    }
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const double score = table[moves[i]];
      for (int x = 0; x < n; ++x) {
        if (moves[i] & (1u << x)) {
          plus_sum[static_cast<std::size_t>(x)] += score;
          plus_n[static_cast<std::size_t>(x)] += 1;
        } else {
          minus_sum[static_cast<std::size_t>(x)] += score;
          minus_n[static_cast<std::size_t>(x)] += 1;
        }
      }
    }
    int best = -1;
    double best_merit = -1e300;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const std::size_t fi = static_cast<std::size_t>(candidates[i]);
      const double j = table[moves[i]];
      const double ap = plus_n[fi] > 0 ? plus_sum[fi] / static_cast<double>(plus_n[fi]) : j;
      const double am = minus_n[fi] > 0 ? minus_sum[fi] / static_cast<double>(minus_n[fi]) : j;
      const double evidence = backward ? am - ap : ap - am;
      const double merit = (lambda / 2.0) * (evidence + 1.0) + (1.0 - lambda) * j;
      if (merit > best_merit) {
        best_merit = merit;
        best = static_cast<int>(i);
      }
    }
    chosen_order.push_back(candidates[static_cast<std::size_t>(best)]);
    current = moves[static_cast<std::size_t>(best)];
  }
  return chosen_order;
}

}  // namespace

TEST_CASE("per-subset accumulated searches match an independent replay") {
  Rng rng(2718);
  for (int n : {2, 3, 4}) {
    for (double lambda : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> table(std::size_t{1} << n);
        for (double& v : table) v = rng.uniform01();
        const auto fn = [&table](const FeatureMask& m) { return table[m.to_uint()]; };

        for (bool backward : {true, false}) {
          FunctionScorer scorer(n, fn);
          SearchConfig config;
          config.algorithm = backward ? SearchAlgorithm::SbgPlus : SearchAlgorithm::SfgPlus;
          config.lambda = lambda;
          const SelectionResult r = run_search(scorer, config);
          CHECK(removal_order(r) == replay_per_subset(table, n, lambda, backward));
        }
      }
    }
  }
}

TEST_CASE("non-unit weightings run the full schedule and stay valid") {
  Rng rng(73);
  const int n = 6;
  std::vector<double> table(std::size_t{1} << n);
  for (double& v : table) v = rng.uniform01();
  const auto fn = [&table](const FeatureMask& m) { return table[m.to_uint()]; };

  for (WeightingKind w : {WeightingKind::SizeFraction, WeightingKind::ScoreWeighted}) {
    FunctionScorer scorer(n, fn);
    SearchConfig config;
    config.algorithm = SearchAlgorithm::SbgPlus;
    config.lambda = 2.0 / 3.0;
    config.weighting = w;
    const SelectionResult r = run_sbg_plus(scorer, config);
    CHECK(r.trace.call_count == 21);
    CHECK_FALSE(r.best_mask.none());
  }
}

TEST_CASE("lambda is validated for the accumulated variants") {
  FunctionScorer scorer(3, toy3);
  SearchConfig config;
  config.algorithm = SearchAlgorithm::SbgPlus;
  config.lambda = 1.5;
  CHECK_THROWS_AS(run_sbg_plus(scorer, config), ValidationError);
}

TEST_CASE("trace csv has one row per evaluation with the chosen flag set once") {
  FunctionScorer scorer(3, toy3);
  const SelectionResult r = run_sbg(scorer);
  const std::string csv = trace_string(r.trace);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,candidate_feature,mask_bitstring,score,chosen_flag");
  int rows = 0, chosen = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.ends_with(",1")) ++chosen;
  }
  CHECK(rows == 6);
  CHECK(chosen == 3);
}
