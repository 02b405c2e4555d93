#include "fsel/relevance.hpp"

#include <cmath>
#include <fstream>

#include "fsel/error.hpp"
#include "fsel/text.hpp"

namespace fsel {

WeightingKind parse_weighting(const std::string& name) {
  if (name == "unit") return WeightingKind::Unit;
  if (name == "size") return WeightingKind::SizeFraction;
  if (name == "score") return WeightingKind::ScoreWeighted;
  throw ValidationError("unknown weighting '" + name + "' (expected unit, size, or score)");
}

std::string weighting_name(WeightingKind kind) {
  switch (kind) {
    case WeightingKind::Unit: return "unit";
    case WeightingKind::SizeFraction: return "size";
    case WeightingKind::ScoreWeighted: return "score";
  }
  return "unit";
}

double weighting_value(WeightingKind kind, const FeatureMask& mask, double score) {
  switch (kind) {
    case WeightingKind::Unit: return 1.0;
    case WeightingKind::SizeFraction:
      return static_cast<double>(mask.count()) / static_cast<double>(mask.width());
    case WeightingKind::ScoreWeighted: return score;
  }
  return 1.0;
}

AccumulationMode parse_accumulation(const std::string& name) {
  if (name == "per_subset") return AccumulationMode::PerSubset;
  if (name == "literal_alg2") return AccumulationMode::LiteralAlg2;
  throw ValidationError("unknown accumulation mode '" + name +
                        "' (expected per_subset or literal_alg2)");
}

std::string accumulation_name(AccumulationMode mode) {
  return mode == AccumulationMode::PerSubset ? "per_subset" : "literal_alg2";
}

AccumulatorTable::AccumulatorTable(int width) : width_(width) {
  if (width < 1) throw ValidationError("accumulator width must be positive");
  cells_.resize(static_cast<std::size_t>(width));
}

std::size_t AccumulatorTable::idx(int x) const {
  if (x < 0 || x >= width_) throw ValidationError("feature index out of accumulator range");
  return static_cast<std::size_t>(x);
}

void AccumulatorTable::add_observation(const FeatureMask& mask, double score,
                                       WeightingKind weighting) {
  if (mask.width() != width_) throw ValidationError("mask width does not match the accumulator");
  if (!(score >= 0.0 && score <= 1.0))
    throw ValidationError("accumulated scores must lie in [0,1], got " + format_double(score));
  const double w = weighting_value(weighting, mask, score);
  for (int x = 0; x < width_; ++x) {
    Cell& cell = cells_[static_cast<std::size_t>(x)];
    if (mask.test(x)) {
      cell.plus_sum += score * w;
      cell.plus_weight += w;
      ++cell.n_plus;
    } else {
      cell.minus_sum += score * w;
      cell.minus_weight += w;
      ++cell.n_minus;
    }
  }
}

void AccumulatorTable::add_backward_step(const FeatureMask& current,
                                         const std::vector<double>& removal_scores,
                                         std::optional<double> current_score) {
  if (current.width() != width_) throw ValidationError("mask width does not match the accumulator");
  if (removal_scores.size() != static_cast<std::size_t>(width_))
    throw ValidationError("removal score array must be feature-indexed");
  double total = 0.0;
  for (int y = 0; y < width_; ++y)
    if (current.test(y)) total += removal_scores[static_cast<std::size_t>(y)];
  for (int x = 0; x < width_; ++x) {
    Cell& cell = cells_[static_cast<std::size_t>(x)];
    if (current.test(x)) {
      cell.plus_sum += total - removal_scores[static_cast<std::size_t>(x)];
      cell.plus_weight += 1.0;
      ++cell.n_plus;
    } else {
      if (!current_score)
        throw ValidationError("current-set score required when features are outside the set");
      cell.minus_sum += *current_score;
      cell.minus_weight += 1.0;
      ++cell.n_minus;
    }
  }
}

void AccumulatorTable::add_forward_step(const FeatureMask& current,
                                        const std::vector<double>& addition_scores,
                                        std::optional<double> current_score) {
  if (current.width() != width_) throw ValidationError("mask width does not match the accumulator");
  if (addition_scores.size() != static_cast<std::size_t>(width_))
    throw ValidationError("addition score array must be feature-indexed");
  double total = 0.0;
  for (int y = 0; y < width_; ++y)
    if (!current.test(y)) total += addition_scores[static_cast<std::size_t>(y)];
  for (int x = 0; x < width_; ++x) {
    Cell& cell = cells_[static_cast<std::size_t>(x)];
    if (!current.test(x)) {
      cell.minus_sum += total - addition_scores[static_cast<std::size_t>(x)];
      cell.minus_weight += 1.0;
      ++cell.n_minus;
    } else {
      if (!current_score)
        throw ValidationError("current-set score required when features are inside the set");
      cell.plus_sum += *current_score;
      cell.plus_weight += 1.0;
      ++cell.n_plus;
    }
  }
}

std::optional<double> AccumulatorTable::plus_average(int x) const {
  const Cell& cell = cells_[idx(x)];
  if (cell.plus_weight <= 0.0) return std::nullopt;
  return cell.plus_sum / cell.plus_weight;
}

std::optional<double> AccumulatorTable::minus_average(int x) const {
  const Cell& cell = cells_[idx(x)];
  if (cell.minus_weight <= 0.0) return std::nullopt;
  return cell.minus_sum / cell.minus_weight;
}

double estimated_relevance(const AccumulatorTable& table, int feature, double lambda,
                           double j_hat) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ValidationError("lambda must lie in [0,1], got " + format_double(lambda));
  const double plus = table.plus_average(feature).value_or(j_hat);
  const double minus = table.minus_average(feature).value_or(j_hat);
  return (lambda / 2.0) * (plus - minus + 1.0) + (1.0 - lambda) * j_hat;
}

double selection_merit(const AccumulatorTable& table, int feature, double lambda, double j_hat,
                       SearchDirection direction) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ValidationError("lambda must lie in [0,1], got " + format_double(lambda));
  const double plus = table.plus_average(feature).value_or(j_hat);
  const double minus = table.minus_average(feature).value_or(j_hat);
  const double evidence =
      direction == SearchDirection::Forward ? plus - minus : minus - plus;
  return (lambda / 2.0) * (evidence + 1.0) + (1.0 - lambda) * j_hat;
}

ExactOracleResult exact_relevance(const std::function<double(const FeatureMask&)>& score_fn,
                                  int n, WeightingKind weighting, int n_guard) {
  if (n < 1) throw ValidationError("oracle width must be positive");
  if (n > n_guard)
    throw ValidationError("refusing exhaustive enumeration: n = " + std::to_string(n) +
                          " exceeds the guard of " + std::to_string(n_guard));
  if (n > 30) throw ValidationError("oracle width above 30 is not supported");

  const std::uint32_t n_subsets = std::uint32_t{1} << n;
  std::vector<double> j(n_subsets);
  for (std::uint32_t u = 0; u < n_subsets; ++u) j[u] = score_fn(FeatureMask::from_uint(n, u));

  ExactOracleResult res;
  res.width = n;
  res.plus_mean.resize(static_cast<std::size_t>(n));
  res.minus_mean.resize(static_cast<std::size_t>(n));
  res.relevance.resize(static_cast<std::size_t>(n));
  res.relevance_compact.resize(static_cast<std::size_t>(n));
  res.relevance_weighted.resize(static_cast<std::size_t>(n));

  const double half_count = static_cast<double>(n_subsets / 2);
  for (int x = 0; x < n; ++x) {
    const std::uint32_t bit = std::uint32_t{1} << x;
    double sum_with = 0.0;
    double sum_without = 0.0;
    double diff_sum = 0.0;
    double wnum = 0.0;
    double wden = 0.0;
    for (std::uint32_t u = 0; u < n_subsets; ++u) {
      if (u & bit) continue;  // u ranges over subsets lacking x
      const double j_without = j[u];
      const double j_with = j[u | bit];
      sum_without += j_without;
      sum_with += j_with;
      diff_sum += j_with - j_without;
      const double w = weighting_value(weighting, FeatureMask::from_uint(n, u), j_without);
      wnum += (j_with - j_without) * w;
      wden += w;
    }
    const std::size_t xi = static_cast<std::size_t>(x);
    res.plus_mean[xi] = sum_with / half_count;
    res.minus_mean[xi] = sum_without / half_count;
    res.relevance[xi] = res.plus_mean[xi] - res.minus_mean[xi];
    res.relevance_compact[xi] = diff_sum / half_count;
    res.relevance_weighted[xi] = wden > 0.0 ? wnum / wden : 0.0;
  }
  return res;
}

ScoreTable load_score_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  ScoreTable table;
  std::vector<bool> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'bitstring,score'");
    const std::string bits = line.substr(0, comma);
    double score;
    if (!parse_double(line.substr(comma + 1), score))
      throw ParseError("line " + std::to_string(line_no) + ": score is not numeric");
    if (!std::isfinite(score))
      throw ParseError("line " + std::to_string(line_no) + ": score is not finite");

    FeatureMask mask = FeatureMask::from_bitstring(bits);
    if (table.width == 0) {
      table.width = mask.width();
      if (table.width < 1 || table.width > 24)
        throw ParseError("truth table width must be between 1 and 24");
      table.scores.assign(std::size_t{1} << table.width, 0.0);
      seen.assign(std::size_t{1} << table.width, false);
    }
    if (mask.width() != table.width)
      throw ParseError("line " + std::to_string(line_no) + ": bitstring width differs from " +
                       std::to_string(table.width));
    const std::uint32_t u = mask.to_uint();
    if (seen[u]) throw ParseError("duplicate subset '" + bits + "'");
    seen[u] = true;
    table.scores[u] = score;
  }
  if (table.width == 0) throw ParseError("'" + path + "' contains no subsets");
  for (std::uint32_t u = 0; u < (std::uint32_t{1} << table.width); ++u)
    if (!seen[u])
      throw ParseError("truth table is missing subset '" +
                       FeatureMask::from_uint(table.width, u).bitstring() + "'");
  return table;
}

}  // namespace fsel
