#include "fsel/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fsel/error.hpp"
#include "fsel/prefilter.hpp"
#include "fsel/rng.hpp"
#include "fsel/search.hpp"
#include "fsel/text.hpp"

namespace fsel {

namespace {

void begin_phase(RowAccessLog* log, const std::string& name) {
  if (log) log->begin_phase(name);
}

std::string join_members(const std::vector<std::string>& members) {
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += ';';
    out += members[i];
  }
  return out;
}

std::vector<std::string> split_members(const std::string& joined) {
  std::vector<std::string> out;
  if (joined.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = joined.find(';', start);
    if (pos == std::string::npos) {
      out.push_back(joined.substr(start));
      break;
    }
    out.push_back(joined.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string percent_one_decimal(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

}  // namespace

const FoldOutcome& ExperimentReport::row(int fold, bool plus) const {
  return rows[static_cast<std::size_t>(fold) * 2 + (plus ? 1 : 0)];
}

ExperimentReport run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0))
    throw ValidationError("lambda must lie in [0,1], got " + format_double(config.lambda));
  if (config.prefilter_k && (*config.prefilter_k < 1 || *config.prefilter_k > dataset.n_features()))
    throw ValidationError("prefilter k must lie in [1, feature count]");
  if (config.threads < 1) throw ValidationError("thread count must be positive");

  RowAccessLog* log = dataset.access_log();
  const bool backward = config.direction == SearchDirection::Backward;

  ExperimentReport report;
  report.plain_label = backward ? "sbg" : "sfg";
  report.plus_label = backward ? "sbg+" : "sfg+";

  std::optional<Dataset> reduced;
  if (config.global_prefilter && config.prefilter_k) {
    // Reproduces the one-shot preselection protocol; ranking sees every row,
    // including future test halves.
    begin_phase(log, "global_prefilter");
    reduced = select_top_k(dataset, bss_wss_rank(dataset), *config.prefilter_k).data;
  }
  const Dataset& base = reduced ? *reduced : dataset;

  const SplitPlan plan = make_5x2_plan(base, config.outer_seed);

  std::vector<int> identity_cols(static_cast<std::size_t>(base.n_features()));
  for (int c = 0; c < base.n_features(); ++c) identity_cols[static_cast<std::size_t>(c)] = c;

  for (int fold = 0; fold < 10; ++fold) {
    const int rep = fold / 2;
    const int train_half = fold % 2;
    const auto& repetition = plan.repetitions[static_cast<std::size_t>(rep)];
    const std::vector<int>& train_rows = train_half == 0 ? repetition.fold_a : repetition.fold_b;
    const std::vector<int>& test_rows = train_half == 0 ? repetition.fold_b : repetition.fold_a;
    const std::string tag = "fold" + std::to_string(fold);

    begin_phase(log, tag + ":prefilter");
    Dataset train = base.subset_rows(train_rows);
    std::vector<int> cols_map = identity_cols;
    if (config.prefilter_k && !config.global_prefilter) {
      TopKSelection sel = select_top_k(train, bss_wss_rank(train), *config.prefilter_k);
      cols_map = sel.index_map;
      train = std::move(sel.data);
    }

    begin_phase(log, tag + ":search");
    const std::uint64_t fold_inner_seed = mix_seed(config.inner_seed, static_cast<std::uint64_t>(fold));
    SearchConfig plain_cfg;
    plain_cfg.algorithm = backward ? SearchAlgorithm::Sbg : SearchAlgorithm::Sfg;
    plain_cfg.threads = config.threads;
    SearchConfig plus_cfg = plain_cfg;
    plus_cfg.algorithm = backward ? SearchAlgorithm::SbgPlus : SearchAlgorithm::SfgPlus;
    plus_cfg.lambda = config.lambda;
    plus_cfg.weighting = config.weighting;
    plus_cfg.accumulation = config.accumulation;

    // Both selections see the same training bytes and the same inner plan.
    SubsetScorer plain_scorer(train, config.inducer, fold_inner_seed);
    const SelectionResult plain_res = run_search(plain_scorer, plain_cfg);
    SubsetScorer plus_scorer(train, config.inducer, fold_inner_seed);
    const SelectionResult plus_res = run_search(plus_scorer, plus_cfg);

    begin_phase(log, tag + ":evaluate");
    const Dataset test = base.subset_rows(test_rows).select_columns(cols_map);

    const auto evaluate = [&](const std::string& label, const SelectionResult& res) {
      FoldOutcome out;
      out.fold = fold;
      out.repetition = rep;
      out.train_half = train_half;
      out.algorithm = label;
      out.subset_size = res.best_mask.count();
      for (int i : res.best_mask.indices())
        out.members.push_back(train.feature_names()[static_cast<std::size_t>(i)]);
      try {
        out.test_error = holdout_error(train, test, res.best_mask, config.inducer);
      } catch (const SingularityError&) {
        out.test_error = 1.0;
        out.refit_singular = true;
      }
      report.rows.push_back(std::move(out));
    };
    evaluate(report.plain_label, plain_res);
    evaluate(report.plus_label, plus_res);
  }
  begin_phase(log, "done");

  double err_plain = 0.0, err_plus = 0.0, size_plain = 0.0, size_plus = 0.0;
  for (int fold = 0; fold < 10; ++fold) {
    const FoldOutcome& a = report.row(fold, false);
    const FoldOutcome& b = report.row(fold, true);
    err_plain += a.test_error;
    err_plus += b.test_error;
    size_plain += a.subset_size;
    size_plus += b.subset_size;
    report.paired_error_diff.push_back(b.test_error - a.test_error);
    report.paired_size_diff.push_back(static_cast<double>(b.subset_size - a.subset_size));
  }
  report.mean_error_plain = err_plain / 10.0;
  report.mean_error_plus = err_plus / 10.0;
  report.mean_size_plain = size_plain / 10.0;
  report.mean_size_plus = size_plus / 10.0;
  return report;
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "fold,repetition,orientation,algorithm,test_error,subset_size,subset_members\n";
  for (const FoldOutcome& r : report.rows) {
    out << r.fold << ',' << r.repetition << ',' << (r.train_half == 0 ? "train_a" : "train_b")
        << ',' << r.algorithm << ',' << format_double(r.test_error) << ',' << r.subset_size << ','
        << csv_escape(join_members(r.members)) << '\n';
  }
  out << "mean,,," << report.plain_label << ',' << format_double(report.mean_error_plain) << ','
      << format_double(report.mean_size_plain) << ",\n";
  out << "mean,,," << report.plus_label << ',' << format_double(report.mean_error_plus) << ','
      << format_double(report.mean_size_plus) << ",\n";
  out << "paired_mean_diff,,," << report.plus_label << "-" << report.plain_label << ','
      << format_double(report.mean_error_plus - report.mean_error_plain) << ','
      << format_double(report.mean_size_plus - report.mean_size_plain) << ",\n";
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_report_csv(report, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

ExperimentReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  ExperimentReport report;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("report file is empty");
  int mean_rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 7) throw ParseError("report row must have 7 cells");
    if (cells[0] == "mean") {
      double err, size;
      if (!parse_double(cells[4], err) || !parse_double(cells[5], size))
        throw ParseError("malformed aggregate row");
      if (mean_rows == 0) {
        report.plain_label = cells[3];
        report.mean_error_plain = err;
        report.mean_size_plain = size;
      } else {
        report.plus_label = cells[3];
        report.mean_error_plus = err;
        report.mean_size_plus = size;
      }
      ++mean_rows;
      continue;
    }
    if (cells[0] == "paired_mean_diff") continue;  // derivable from the rows
    FoldOutcome r;
    long long fold, rep, size;
    if (!parse_int(cells[0], fold) || !parse_int(cells[1], rep) || !parse_int(cells[5], size))
      throw ParseError("malformed report row '" + line + "'");
    r.fold = static_cast<int>(fold);
    r.repetition = static_cast<int>(rep);
    r.train_half = cells[2] == "train_b" ? 1 : 0;
    r.algorithm = cells[3];
    if (!parse_double(cells[4], r.test_error)) throw ParseError("malformed test_error");
    r.subset_size = static_cast<int>(size);
    r.members = split_members(cells[6]);
    report.rows.push_back(std::move(r));
  }
  for (std::size_t f = 0; f + 1 < report.rows.size(); f += 2) {
    report.paired_error_diff.push_back(report.rows[f + 1].test_error - report.rows[f].test_error);
    report.paired_size_diff.push_back(
        static_cast<double>(report.rows[f + 1].subset_size - report.rows[f].subset_size));
  }
  return report;
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
  out << "algorithm  mean_test_error_pct  mean_subset_size\n";
  out << report.plain_label << "  " << percent_one_decimal(report.mean_error_plain) << "  "
      << format_double(report.mean_size_plain) << '\n';
  out << report.plus_label << "  " << percent_one_decimal(report.mean_error_plus) << "  "
      << format_double(report.mean_size_plus) << '\n';
  for (const FoldOutcome& r : report.rows) {
    if (r.refit_singular)
      out << "warning: fold " << r.fold << ' ' << r.algorithm
          << ": final refit was singular; test error recorded as 1.0\n";
  }
}

}  // namespace fsel
