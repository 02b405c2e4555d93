#include "fsel/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "fsel/dataset.hpp"
#include "fsel/error.hpp"
#include "fsel/harness.hpp"
#include "fsel/inducers.hpp"
#include "fsel/prefilter.hpp"
#include "fsel/relevance.hpp"
#include "fsel/search.hpp"
#include "fsel/text.hpp"

namespace fsel {

namespace {

struct SynthFlags {
  int samples = 100;
  int informative = 3;
  int noise = 17;
  double separation = 2.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct PrefilterFlags {
  std::string data;
  std::string label = "class";
  int k = 0;
  std::string out;
  std::string map;
};

struct SelectFlags {
  std::string data;
  std::string label = "class";
  std::string inducer = "1nn";
  double lda_gamma = 1e-6;
  std::string algo = "sbg";
  double lambda = 2.0 / 3.0;
  std::string weighting = "unit";
  std::string accumulation = "per_subset";
  std::uint64_t seed = 0;
  std::string trace;
  int threads = 1;
  bool verbose = false;
};

struct ExperimentFlags {
  std::string config;
  std::string data;
  std::string label = "class";
  int synth_samples = 0;
  int synth_informative = 3;
  int synth_noise = 9;
  double synth_separation = 3.0;
  std::uint64_t synth_seed = 0;
  std::string inducer = "1nn";
  double lda_gamma = 1e-6;
  int prefilter_k = 0;
  bool global_prefilter = false;
  std::string direction = "backward";
  double lambda = 2.0 / 3.0;
  std::string weighting = "unit";
  std::string accumulation = "per_subset";
  std::uint64_t outer_seed = 0;
  std::uint64_t inner_seed = 0;
  int threads = 1;
  std::string out;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

/// Applies "key = value" lines to any experiment field the command line left
/// untouched. `given` holds the keys that were set by flags.
void apply_config_file(ExperimentFlags& f, const std::set<std::string>& given) {
  std::ifstream in(f.config);
  if (!in) throw IoError("cannot open config file '" + f.config + "'");

  const auto want = [&](const std::string& key) { return given.count(key) == 0; };
  const auto as_int = [](const std::string& key, const std::string& v) {
    long long out;
    if (!parse_int(v, out)) throw ValidationError("config key '" + key + "': not an integer");
    return out;
  };
  const auto as_real = [](const std::string& key, const std::string& v) {
    double out;
    if (!parse_double(v, out)) throw ValidationError("config key '" + key + "': not a number");
    return out;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));

    if (key == "data") { if (want(key)) f.data = value; }
    else if (key == "label") { if (want(key)) f.label = value; }
    else if (key == "synth_samples") { if (want(key)) f.synth_samples = static_cast<int>(as_int(key, value)); }
    else if (key == "synth_informative") { if (want(key)) f.synth_informative = static_cast<int>(as_int(key, value)); }
    else if (key == "synth_noise") { if (want(key)) f.synth_noise = static_cast<int>(as_int(key, value)); }
    else if (key == "synth_separation") { if (want(key)) f.synth_separation = as_real(key, value); }
    else if (key == "synth_seed") { if (want(key)) f.synth_seed = static_cast<std::uint64_t>(as_int(key, value)); }
    else if (key == "inducer") { if (want(key)) f.inducer = value; }
    else if (key == "lda_gamma") { if (want(key)) f.lda_gamma = as_real(key, value); }
    else if (key == "prefilter_k") { if (want(key)) f.prefilter_k = static_cast<int>(as_int(key, value)); }
    else if (key == "global_prefilter") { if (want(key)) f.global_prefilter = value == "true" || value == "1"; }
    else if (key == "direction") { if (want(key)) f.direction = value; }
    else if (key == "lambda") { if (want(key)) f.lambda = as_real(key, value); }
    else if (key == "weighting") { if (want(key)) f.weighting = value; }
    else if (key == "accumulation_mode" || key == "accumulation") { if (want("accumulation")) f.accumulation = value; }
    else if (key == "outer_seed") { if (want(key)) f.outer_seed = static_cast<std::uint64_t>(as_int(key, value)); }
    else if (key == "inner_seed") { if (want(key)) f.inner_seed = static_cast<std::uint64_t>(as_int(key, value)); }
    else if (key == "threads") { if (want(key)) f.threads = static_cast<int>(as_int(key, value)); }
    else if (key == "out") { if (want(key)) f.out = value; }
    else throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

struct OracleFlags {
  std::string table;
  std::string data;
  std::string label = "class";
  std::string inducer = "1nn";
  double lda_gamma = 1e-6;
  std::uint64_t seed = 0;
  std::string weighting = "unit";
  int n_guard = 20;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SyntheticSpec spec;
  spec.n_samples = f.samples;
  spec.n_informative = f.informative;
  spec.n_noise = f.noise;
  spec.class_separation = f.separation;
  spec.seed = f.seed;
  const Dataset data = generate_synthetic(spec);
  write_csv(data, f.out);
  out << "wrote " << f.out << " (" << data.n_samples() << " samples, " << data.n_features()
      << " features)\n";
  return 0;
}

int cmd_prefilter(const PrefilterFlags& f, std::ostream& out) {
  const Dataset data = load_csv(f.data, f.label);
  const TopKSelection sel = select_top_k(data, bss_wss_rank(data), f.k);
  write_csv(sel.data, f.out);
  const std::string map_path = f.map.empty() ? f.out + ".map.csv" : f.map;
  std::ofstream map_out(map_path);
  if (!map_out) throw IoError("cannot open '" + map_path + "' for writing");
  map_out << "new_index,original_name\n";
  for (std::size_t i = 0; i < sel.index_map.size(); ++i)
    map_out << i << ','
            << csv_escape(data.feature_names()[static_cast<std::size_t>(sel.index_map[i])])
            << '\n';
  if (!map_out) throw IoError("failed writing '" + map_path + "'");
  out << "wrote " << f.out << " (top " << f.k << " of " << data.n_features() << " features)\n";
  return 0;
}

int cmd_select(const SelectFlags& f, std::ostream& out) {
  const Dataset data = load_csv(f.data, f.label);
  InducerConfig inducer;
  inducer.kind = parse_inducer(f.inducer);
  inducer.lda_gamma = f.lda_gamma;

  SearchConfig config;
  config.algorithm = parse_algorithm(f.algo);
  config.lambda = f.lambda;
  config.weighting = parse_weighting(f.weighting);
  config.accumulation = parse_accumulation(f.accumulation);
  config.threads = f.threads;

  SubsetScorer scorer(data, inducer, f.seed);
  const SelectionResult result = run_search(scorer, config);

  if (f.verbose) {
    for (std::size_t s = 0; s < result.trace.steps.size(); ++s) {
      const StepRecord& step = result.trace.steps[s];
      const char* verb =
          algorithm_direction(config.algorithm) == SearchDirection::Backward ? "removed" : "added";
      out << "step " << (s + 1) << ": " << verb << ' '
          << data.feature_names()[static_cast<std::size_t>(step.chosen_feature)] << " (score "
          << format_double(step.post_score) << ")\n";
    }
  }
  if (!f.trace.empty()) write_trace_csv(result.trace, f.trace);

  out << "algorithm: " << algorithm_name(config.algorithm) << '\n';
  out << "best_subset_size: " << result.best_mask.count() << '\n';
  out << "best_inner_score: " << format_double(result.best_score) << '\n';
  out << "best_subset:";
  for (int i : result.best_mask.indices())
    out << ' ' << data.feature_names()[static_cast<std::size_t>(i)];
  out << '\n';
  return 0;
}

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
  std::optional<Dataset> data;
  if (!f.data.empty()) {
    data = load_csv(f.data, f.label);
  } else if (f.synth_samples > 0) {
    SyntheticSpec spec;
    spec.n_samples = f.synth_samples;
    spec.n_informative = f.synth_informative;
    spec.n_noise = f.synth_noise;
    spec.class_separation = f.synth_separation;
    spec.seed = f.synth_seed;
    data = generate_synthetic(spec);
  } else {
    throw ValidationError("experiment needs --data or --synth-samples");
  }

  ExperimentConfig config;
  config.inducer.kind = parse_inducer(f.inducer);
  config.inducer.lda_gamma = f.lda_gamma;
  if (f.prefilter_k > 0) config.prefilter_k = f.prefilter_k;
  config.global_prefilter = f.global_prefilter;
  if (f.direction == "backward")
    config.direction = SearchDirection::Backward;
  else if (f.direction == "forward")
    config.direction = SearchDirection::Forward;
  else
    throw ValidationError("direction must be 'backward' or 'forward'");
  config.lambda = f.lambda;
  config.weighting = parse_weighting(f.weighting);
  config.accumulation = parse_accumulation(f.accumulation);
  config.outer_seed = f.outer_seed;
  config.inner_seed = f.inner_seed;
  config.threads = f.threads;

  const ExperimentReport report = run_experiment(*data, config);
  if (!f.out.empty()) write_report_csv(report, f.out);
  print_summary(report, out);
  return 0;
}

int cmd_oracle(const OracleFlags& f, std::ostream& out) {
  const WeightingKind weighting = parse_weighting(f.weighting);
  ExactOracleResult result;
  std::vector<std::string> names;

  if (!f.table.empty()) {
    const ScoreTable table = load_score_table(f.table);
    if (table.width > f.n_guard)
      throw ValidationError("truth table width " + std::to_string(table.width) +
                            " exceeds the guard of " + std::to_string(f.n_guard));
    result = exact_relevance([&](const FeatureMask& m) { return table.at(m); }, table.width,
                             weighting, f.n_guard);
    for (int i = 0; i < table.width; ++i) names.push_back("f" + std::to_string(i));
  } else if (!f.data.empty()) {
    const Dataset data = load_csv(f.data, f.label);
    InducerConfig inducer;
    inducer.kind = parse_inducer(f.inducer);
    inducer.lda_gamma = f.lda_gamma;
    SubsetScorer scorer(data, inducer, f.seed);
    result = exact_relevance([&](const FeatureMask& m) { return scorer.score(m); },
                             data.n_features(), weighting, f.n_guard);
    names = data.feature_names();
  } else {
    throw ValidationError("oracle needs --table or --data");
  }

  out << "feature,avg_with,avg_without,relevance,relevance_weighted\n";
  for (int i = 0; i < result.width; ++i) {
    const std::size_t xi = static_cast<std::size_t>(i);
    out << csv_escape(names[xi]) << ',' << format_display(result.plus_mean[xi]) << ','
        << format_display(result.minus_mean[xi]) << ',' << format_display(result.relevance[xi])
        << ',' << format_display(result.relevance_weighted[xi]) << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wrapper feature-subset selection with accumulated search evidence"};
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a two-class synthetic dataset CSV");
  synth_cmd->add_option("--samples", synth.samples, "Number of samples")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--informative", synth.informative, "Informative feature count")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--noise", synth.noise, "Noise feature count")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--separation", synth.separation, "Class-conditional mean shift")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();

  PrefilterFlags pre;
  CLI::App* pre_cmd = app.add_subcommand("prefilter", "Keep the top-k features by BSS/WSS ratio");
  pre_cmd->add_option("--data", pre.data, "Input CSV path")->required();
  pre_cmd->add_option("--label", pre.label, "Label column (name or 0-based index)");
  pre_cmd->add_option("--k", pre.k, "Number of features to keep")->required()->check(CLI::PositiveNumber);
  pre_cmd->add_option("--out", pre.out, "Reduced CSV path")->required();
  pre_cmd->add_option("--map", pre.map,
                      "Path for the new_index,original_name map (default: <out>.map.csv)");

  SelectFlags sel;
  CLI::App* sel_cmd = app.add_subcommand("select", "Run one feature-subset search");
  sel_cmd->add_option("--data", sel.data, "Input CSV path")->required();
  sel_cmd->add_option("--label", sel.label, "Label column (name or 0-based index)");
  sel_cmd->add_option("--inducer", sel.inducer, "1nn or lda");
  sel_cmd->add_option("--lda-gamma,--lda_gamma", sel.lda_gamma, "LDA shrinkage")
      ->check(CLI::NonNegativeNumber);
  sel_cmd->add_option("--algo", sel.algo, "sbg, sbg+, sfg, or sfg+");
  sel_cmd->add_option("--lambda", sel.lambda, "Evidence mixing weight")->check(CLI::Range(0.0, 1.0));
  sel_cmd->add_option("--weighting", sel.weighting, "unit, size, or score");
  sel_cmd->add_option("--accumulation", sel.accumulation, "per_subset or literal_alg2");
  sel_cmd->add_option("--seed", sel.seed, "Inner resampling seed");
  sel_cmd->add_option("--trace", sel.trace, "Write the evaluation trace CSV here");
  sel_cmd->add_option("--threads", sel.threads, "Worker cap for subset scoring")
      ->check(CLI::PositiveNumber);
  sel_cmd->add_flag("--verbose", sel.verbose, "Log one line per search step");

  ExperimentFlags exp;
  std::map<std::string, CLI::Option*> exp_opts;
  CLI::App* exp_cmd =
      app.add_subcommand("experiment", "Paired outer-5x2cv comparison of plain vs accumulated search");
  exp_cmd->add_option("--config", exp.config,
                      "Read key=value defaults from a file; flags override it");
  exp_opts["data"] = exp_cmd->add_option("--data", exp.data, "Input CSV path");
  exp_opts["label"] =
      exp_cmd->add_option("--label", exp.label, "Label column (name or 0-based index)");
  exp_opts["synth_samples"] = exp_cmd->add_option("--synth-samples,--synth_samples", exp.synth_samples,
                                                  "Generate a synthetic dataset with this many samples");
  exp_opts["synth_informative"] = exp_cmd->add_option(
      "--synth-informative,--synth_informative", exp.synth_informative, "Synthetic informative feature count");
  exp_opts["synth_noise"] =
      exp_cmd->add_option("--synth-noise,--synth_noise", exp.synth_noise, "Synthetic noise feature count");
  exp_opts["synth_separation"] = exp_cmd->add_option("--synth-separation,--synth_separation",
                                                     exp.synth_separation, "Synthetic class separation");
  exp_opts["synth_seed"] =
      exp_cmd->add_option("--synth-seed,--synth_seed", exp.synth_seed, "Synthetic generator seed");
  exp_opts["inducer"] = exp_cmd->add_option("--inducer", exp.inducer, "1nn or lda");
  exp_opts["lda_gamma"] = exp_cmd->add_option("--lda-gamma,--lda_gamma", exp.lda_gamma, "LDA shrinkage")
                              ->check(CLI::NonNegativeNumber);
  exp_opts["prefilter_k"] = exp_cmd->add_option("--prefilter-k,--prefilter_k", exp.prefilter_k,
                                                "BSS/WSS top-k applied per outer training fold");
  exp_opts["global_prefilter"] = exp_cmd->add_flag("--global-prefilter,--global_prefilter",
                                                   exp.global_prefilter,
                                                   "Rank once on the full dataset instead (leaks test rows)");
  exp_opts["direction"] = exp_cmd->add_option("--direction", exp.direction, "backward or forward");
  exp_opts["lambda"] =
      exp_cmd->add_option("--lambda", exp.lambda, "Evidence mixing weight")->check(CLI::Range(0.0, 1.0));
  exp_opts["weighting"] = exp_cmd->add_option("--weighting", exp.weighting, "unit, size, or score");
  exp_opts["accumulation"] = exp_cmd->add_option("--accumulation,--accumulation_mode",
                                                 exp.accumulation, "per_subset or literal_alg2");
  exp_opts["outer_seed"] =
      exp_cmd->add_option("--outer-seed,--outer_seed", exp.outer_seed, "Outer 5x2 plan seed");
  exp_opts["inner_seed"] = exp_cmd->add_option("--inner-seed,--inner_seed", exp.inner_seed,
                                               "Inner resampling seed stream");
  exp_opts["threads"] = exp_cmd->add_option("--threads", exp.threads, "Worker cap for subset scoring")
                            ->check(CLI::PositiveNumber);
  exp_opts["out"] = exp_cmd->add_option("--out", exp.out, "Write the report CSV here");

  OracleFlags ora;
  CLI::App* ora_cmd = app.add_subcommand("oracle", "Exact relevance over every feature subset");
  ora_cmd->add_option("--table", ora.table, "Truth-table file: one 'bitstring,score' line per subset");
  ora_cmd->add_option("--data", ora.data, "Score subsets of this CSV with an inducer instead");
  ora_cmd->add_option("--label", ora.label, "Label column (name or 0-based index)");
  ora_cmd->add_option("--inducer", ora.inducer, "1nn or lda");
  ora_cmd->add_option("--lda-gamma,--lda_gamma", ora.lda_gamma, "LDA shrinkage")
      ->check(CLI::NonNegativeNumber);
  ora_cmd->add_option("--seed", ora.seed, "Inner resampling seed");
  ora_cmd->add_option("--weighting", ora.weighting, "unit, size, or score");
  ora_cmd->add_option("--n-guard,--n_guard", ora.n_guard, "Refuse enumeration above this width")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (pre_cmd->parsed()) return cmd_prefilter(pre, out);
    if (sel_cmd->parsed()) return cmd_select(sel, out);
    if (exp_cmd->parsed()) {
      if (!exp.config.empty()) {
        std::set<std::string> given;
        for (const auto& [key, opt] : exp_opts)
          if (opt->count() > 0) given.insert(key);
        apply_config_file(exp, given);
      }
      return cmd_experiment(exp, out);
    }
    if (ora_cmd->parsed()) return cmd_oracle(ora, out);
    err << "error: no command given\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fsel
