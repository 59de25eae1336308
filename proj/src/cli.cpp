#include "hmaca/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "hmaca/bio_encode.hpp"
#include "hmaca/ca_engine.hpp"
#include "hmaca/eval_harness.hpp"
#include "hmaca/format.hpp"
#include "hmaca/ga_search.hpp"
#include "hmaca/maca_tree.hpp"

namespace hmaca::cli {

namespace {

constexpr std::size_t kMinWindow = 3;
const std::vector<std::string> kBaselineMethods = {"ANN", "HMM", "NES"};

struct RunConfig {
  std::optional<std::string> task;
  std::size_t window = 12;
  std::size_t stride = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<std::string> out;
  std::optional<std::string> sequences;
  std::optional<std::string> labels;
  std::optional<std::string> history;
  std::optional<std::string> table;

  std::size_t population = 500;
  std::size_t generations = 50;
  std::size_t elite = 2;
  double crossover_rate = 0.9;
  std::optional<double> mutation_rate;
  std::uint64_t max_steps = kDefaultMaxSteps;
  std::size_t threads = 1;

  std::size_t max_depth = 10;
  std::size_t min_node_size = 2;
  double purity = 1.0;

  std::optional<double> train_fraction;
  bool impute_n = false;

  std::string rule_hex;
};

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw Failure{code, message}; }

Task require_task(const RunConfig& cfg) {
  if (!cfg.task) fail(kConfigError, "--task is required (coding, promoter or structure)");
  const auto task = parse_task(*cfg.task);
  if (!task) fail(kConfigError, "unknown task '" + *cfg.task + "'");
  return *task;
}

WindowSpec window_spec(const RunConfig& cfg, Task task) {
  WindowSpec spec{cfg.window, cfg.stride, task};
  if (cfg.window < kMinWindow) {
    fail(kConfigError, "--window must be at least " + std::to_string(kMinWindow));
  }
  if (cfg.stride == 0) fail(kConfigError, "--stride must be positive");
  if (spec.width() > kMaxWidth) {
    fail(kConfigError, "window of " + std::to_string(cfg.window) + " symbols needs " +
                           std::to_string(spec.width()) + " cells; the limit is " +
                           std::to_string(kMaxWidth));
  }
  return spec;
}

const std::string& require_path(const std::optional<std::string>& path, const char* flag) {
  if (!path) fail(kConfigError, std::string(flag) + " is required");
  return *path;
}

std::ifstream open_input(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) fail(kInputError, path + ": no such file");
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kInputError, path + ": cannot open for reading");
  return in;
}

void write_output(const std::optional<std::string>& path, const std::string& text,
                  std::ostream& fallback) {
  if (!path) {
    fallback << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) fail(kInputError, *path + ": cannot open for writing");
  out << text;
  if (!out) fail(kInputError, *path + ": write failed");
}

int code_for(const Error& e, bool label_stage) {
  switch (e.code()) {
    case Errc::InvalidConfig:
    case Errc::WidthOutOfRange:
    case Errc::InvalidHex:
    case Errc::WidthTooLargeForEnumeration:
      return kConfigError;
    case Errc::BadInterval:
    case Errc::AnnotationLengthMismatch:
    case Errc::UnknownStructureSymbol:
      return label_stage ? kLabelFormatError : kInputError;
    case Errc::ModelFormat:
    case Errc::UnknownModelVersion:
    case Errc::WidthMismatch:
      return kModelMismatch;
    case Errc::EmptyTrainingSet:
    case Errc::EmptyPatternSet:
      return kTrainingFailure;
    default:
      return kInputError;
  }
}

/// Runs `fn`, turning library errors into failures tagged with `path`.
template <class Fn>
auto guarded(const std::string& path, bool label_stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(code_for(e, label_stage), path + ": " + e.what());
  }
}

struct DatasetInput {
  std::vector<NucleotideSeq> dna;
  std::vector<ProteinSeq> protein;
};

DatasetInput read_sequences(const std::string& path, Task task) {
  DatasetInput data;
  if (task_sequence_kind(task) == SequenceKind::Protein) {
    auto in = open_input(path);
    data.protein = guarded(path, false, [&] { return parse_protein_fasta(in); });
    return data;
  }
  auto in = open_input(path);
  try {
    data.dna = parse_nucleotide_fasta(in);
  } catch (const Error& e) {
    if (e.code() == Errc::IllegalSymbol) {
      auto again = open_input(path);
      try {
        parse_protein_fasta(again);
        fail(kModelMismatch, path + ": protein sequences given for the " +
                                 std::string(task_name(task)) + " task");
      } catch (const Error&) {
      }
    }
    fail(code_for(e, false), path + ": " + e.what());
  }
  return data;
}

/// Windows for every sequence, labelled from the annotation file.
WindowBatch read_labeled_windows(const RunConfig& cfg, Task task, const WindowSpec& spec,
                                 bool label_stage) {
  const std::string& seq_path = require_path(cfg.sequences, "--sequences");
  const std::string& label_path = require_path(cfg.labels, "--labels");
  const DatasetInput data = read_sequences(seq_path, task);
  WindowBatch all;
  auto append = [&](WindowBatch batch) {
    all.skipped_ambiguous += batch.skipped_ambiguous;
    for (auto& w : batch.windows) all.windows.push_back(std::move(w));
  };

  auto labels_in = open_input(label_path);
  if (task_sequence_kind(task) == SequenceKind::Nucleotide) {
    const auto intervals = guarded(label_path, label_stage, [&] { return parse_intervals(labels_in); });
    for (const auto& seq : data.dna) {
      append(guarded(label_path, label_stage,
                     [&] { return label_windows(seq, intervals, spec, cfg.impute_n); }));
    }
  } else {
    const auto structures =
        guarded(label_path, label_stage, [&] { return parse_structure_fasta(labels_in); });
    std::map<std::string, const ProteinSeq*> by_id;
    for (const auto& s : structures) by_id[s.id] = &s;
    for (const auto& seq : data.protein) {
      const auto it = by_id.find(seq.id);
      if (it == by_id.end()) {
        fail(label_stage ? kLabelFormatError : kInputError,
             label_path + ": no structure record for " + seq.id);
      }
      append(guarded(label_path, label_stage,
                     [&] { return label_windows(seq, it->second->residues, spec); }));
    }
  }
  return all;
}

std::vector<std::string> class_symbols(Task task) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < task_class_count(task); ++c) {
    out.push_back(class_symbol(task, static_cast<ClassLabel>(c)));
  }
  return out;
}

TrainedTree load_model(const RunConfig& cfg, Task task, const WindowSpec& spec) {
  const std::string& path = require_path(cfg.model, "--model");
  auto in = open_input(path);
  TrainedTree tree = guarded(path, false, [&] { return load_tree(in, cfg.max_steps); });
  if (tree.width() != spec.width() || tree.class_count() != task_class_count(task)) {
    fail(kModelMismatch, path + ": model has width " + std::to_string(tree.width()) + " and " +
                             std::to_string(tree.class_count()) + " classes; the " +
                             std::string(task_name(task)) + " task with window " +
                             std::to_string(spec.window_length) + " needs width " +
                             std::to_string(spec.width()) + " and " +
                             std::to_string(task_class_count(task)) + " classes");
  }
  return tree;
}

double training_accuracy(const TrainedTree& tree, const std::vector<LabeledWindow>& windows) {
  return evaluate(tree, windows).accuracy;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const Task task = require_task(cfg);
  const WindowSpec spec = window_spec(cfg, task);
  if (!cfg.seed) fail(kConfigError, "--seed is required for train");
  const std::string& model_path = require_path(cfg.model, "--model");

  TreeConfig tree_cfg;
  tree_cfg.ga.population_size = cfg.population;
  tree_cfg.ga.max_generations = cfg.generations;
  tree_cfg.ga.elite_count = cfg.elite;
  tree_cfg.ga.crossover_rate = cfg.crossover_rate;
  tree_cfg.ga.mutation_rate_per_bit = cfg.mutation_rate;
  tree_cfg.ga.rng_seed = *cfg.seed;
  tree_cfg.ga.max_steps = cfg.max_steps;
  tree_cfg.ga.threads = cfg.threads;
  tree_cfg.max_depth = cfg.max_depth;
  tree_cfg.min_node_size = cfg.min_node_size;
  tree_cfg.purity_threshold = cfg.purity;
  try {
    tree_cfg.validate();
  } catch (const Error& e) {
    fail(kConfigError, e.what());
  }

  const WindowBatch batch = read_labeled_windows(cfg, task, spec, false);
  const std::size_t class_count = task_class_count(task);
  std::vector<LabeledWindow> train_windows = batch.windows;
  std::vector<LabeledWindow> holdout;
  if (cfg.train_fraction) {
    try {
      SplitResult parts = split(batch.windows, class_count, *cfg.train_fraction, *cfg.seed);
      train_windows = std::move(parts.train);
      holdout = std::move(parts.test);
    } catch (const Error& e) {
      fail(e.code() == Errc::ClassWithZeroItems ? kTrainingFailure : kConfigError, e.what());
    }
  }
  if (train_windows.empty()) fail(kTrainingFailure, "no training windows");
  const PatternSet patterns = to_pattern_set(train_windows, class_count);
  if (patterns.distinct_labels() < 2) {
    fail(kTrainingFailure, "training windows cover a single class; the " +
                               std::string(task_name(task)) + " task declares " +
                               std::to_string(class_count));
  }

  std::vector<NodeTrainingLog> log;
  TrainedTree tree = [&] {
    try {
      return train_tree(patterns, tree_cfg, &log);
    } catch (const Error& e) {
      fail(kTrainingFailure, std::string("training failed: ") + e.what());
    }
  }();
  write_output(model_path, save_tree(tree), out);

  const TreeStats stats = tree_stats(tree);
  std::ostringstream report;
  report << "windows\t" << batch.windows.size() << '\n';
  report << "skipped_ambiguous\t" << batch.skipped_ambiguous << '\n';
  report << "train_windows\t" << train_windows.size() << '\n';
  report << "width\t" << tree.width() << '\n';
  report << "nodes\t" << stats.node_count << '\n';
  report << "leaves\t" << stats.leaf_count << '\n';
  report << "max_depth\t" << stats.max_depth << '\n';
  report << "mean_leaf_purity\t" << format_fixed(stats.mean_leaf_purity, 6) << '\n';
  const auto symbols = class_symbols(task);
  for (std::size_t c = 0; c < class_count; ++c) {
    report << "leaves_" << symbols[c] << '\t' << stats.leaves_per_class[c] << '\n';
  }
  report << "training_accuracy\t" << format_fixed(training_accuracy(tree, train_windows), 6) << '\n';
  if (!holdout.empty()) {
    report << "holdout_windows\t" << holdout.size() << '\n';
    report << "holdout_accuracy\t" << format_fixed(evaluate(tree, holdout).accuracy, 6) << '\n';
  }
  for (const auto& node : log) {
    report << "node\t" << node.path << "\tsubset=" << node.subset_size << "\tk=" << node.target_basins
           << "\tgenerations=" << node.generations_run
           << "\tbest_fitness=" << format_fixed(node.best_fitness, 6) << '\n';
  }
  report << "# root fitness history\n" << fitness_history_tsv(log.front().fitness_history);
  out << report.str();
  if (cfg.history) write_output(cfg.history, fitness_history_tsv(log.front().fitness_history), out);
  return kOk;
}

template <class Seq, class Encode>
void predict_sequence(const TrainedTree& tree, Task task, const WindowSpec& spec, const Seq& seq,
                      Encode&& encode, std::vector<PredictionRecord>& records) {
  const std::size_t w = spec.window_length;
  const std::size_t half = window_center(w);
  for (std::size_t p = 0; p < seq.residues.size(); ++p) {
    PredictionRecord rec;
    rec.sequence_id = seq.id;
    rec.position = p + 1;
    rec.residue = seq.residues[p];
    double score = 0.0;
    std::string call = "-";
    if (p >= half && p - half + w <= seq.residues.size()) {
      try {
        const Prediction pred = predict(tree, encode(seq, p - half));
        score = pred.score;
        if (pred.score > 0.5) call = class_symbol(task, pred.label);
      } catch (const Error& e) {
        if (e.code() != Errc::AmbiguousBase) throw;
      }
    }
    rec.method_scores.emplace_back("HMACA", score);
    for (const auto& m : kBaselineMethods) rec.method_scores.emplace_back(m, 0.0);
    rec.predicted = call;
    records.push_back(std::move(rec));
  }
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const Task task = require_task(cfg);
  const WindowSpec spec = window_spec(cfg, task);
  const std::string& seq_path = require_path(cfg.sequences, "--sequences");
  const TrainedTree tree = load_model(cfg, task, spec);
  const DatasetInput data = read_sequences(seq_path, task);

  std::vector<PredictionRecord> records;
  guarded(seq_path, false, [&] {
    for (const auto& seq : data.dna) {
      predict_sequence(tree, task, spec, seq,
                       [&](const NucleotideSeq& s, std::size_t start) {
                         if (!cfg.impute_n) return encode_dna_window(s, start, spec);
                         NucleotideSeq copy{s.id, s.residues.substr(start, spec.window_length)};
                         for (auto& b : copy.residues) {
                           if (b == 'N') b = 'A';
                         }
                         return encode_dna_window(copy, 0, spec);
                       },
                       records);
    }
    for (const auto& seq : data.protein) {
      predict_sequence(tree, task, spec, seq,
                       [&](const ProteinSeq& s, std::size_t start) {
                         return encode_protein_window(s, start, spec);
                       },
                       records);
    }
    return 0;
  });
  write_output(cfg.out, render_prediction_tsv(records), out);
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const Task task = require_task(cfg);
  const WindowSpec spec = window_spec(cfg, task);
  const TrainedTree tree = load_model(cfg, task, spec);
  const WindowBatch batch = read_labeled_windows(cfg, task, spec, true);
  if (batch.windows.empty()) fail(kInputError, "no labelled windows to evaluate");

  const Metrics metrics = evaluate(tree, batch.windows);
  AccuracyRow row{"HMACA", {}, {}, {}};
  switch (task) {
    case Task::Coding: row.coding = metrics.accuracy; break;
    case Task::Promoter: row.promoter = metrics.accuracy; break;
    case Task::SecondaryStructure: row.structure = metrics.accuracy; break;
  }
  write_output(cfg.out, render_metrics(metrics, class_symbols(task)), out);
  write_output(cfg.table, render_accuracy_table({row}), out);
  return kOk;
}

int cmd_inspect_ca(const RunConfig& cfg, std::ostream& out) {
  DependencyString rule;
  try {
    rule = DependencyString::from_hex(cfg.rule_hex);
  } catch (const Error& e) {
    fail(kConfigError, e.what());
  }
  if (rule.width() > kMaxEnumerationWidth) {
    fail(kConfigError, "rule has " + std::to_string(rule.width()) +
                           " cells; inspection enumerates at most " +
                           std::to_string(kMaxEnumerationWidth));
  }
  const TransitionSpec spec = build_transition(rule);
  const BasinMap basins = enumerate_basins(spec);
  const DynamicsSummary summary = dynamics_summary(basins);
  const FixedPointCount fixed = affine_fixed_point_count(spec);

  std::ostringstream report;
  report << "rule\t" << rule.to_hex() << '\n';
  report << "width\t" << rule.width() << '\n';
  report << "linear\t" << (spec.is_linear() ? "yes" : "no") << '\n';
  report << "# transition matrix\n";
  for (std::size_t r = 0; r < spec.matrix().rows(); ++r) report << spec.matrix().row(r).to_bits() << '\n';
  report << "inversion\t" << spec.inversion().to_bits() << '\n';
  report << "rank_T_plus_I\t" << rule.width() - fixed.nullity << '\n';
  report << "fixed_points\t" << fixed.value() << '\n';
  report << "attractors\t" << basins.attractors.size() << '\n';
  report << "# attractor\tcycle_length\tbasin_size\tmax_transient\n";
  for (std::size_t a = 0; a < basins.attractors.size(); ++a) {
    report << basins.attractors[a].attractor_id.to_bits() << '\t' << basins.attractors[a].cycle_length
           << '\t' << basins.basin_sizes[a] << '\t' << basins.max_transient[a] << '\n';
  }
  report << "max_transient\t" << summary.max_transient << '\n';
  report << "tag\t" << dynamics_tag_name(summary.tag) << '\n';
  out << report.str();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Cellular-automata sequence classifier", "hmaca"};
  app.set_config("--config", "", "Flat key=value file; command line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--task", cfg.task, "coding | promoter | structure");
  app.add_option("--window", cfg.window, "Window length in symbols");
  app.add_option("--stride", cfg.stride, "Window stride in symbols");
  app.add_option("--seed", cfg.seed, "Master random seed");
  app.add_option("--model", cfg.model, "Model file (written by train, read otherwise)");
  app.add_option("--out", cfg.out, "Output file for predictions or metrics");
  app.add_option("--sequences", cfg.sequences, "FASTA input");
  app.add_option("--labels", cfg.labels, "Interval TSV or structure FASTA");
  app.add_option("--history", cfg.history, "Write the root fitness history TSV here");
  app.add_option("--table", cfg.table, "Write the accuracy table here");
  app.add_option("--population", cfg.population, "Chromosomes per generation");
  app.add_option("--generations", cfg.generations, "Generation budget per node");
  app.add_option("--elite", cfg.elite, "Chromosomes copied unchanged each generation");
  app.add_option("--crossover-rate", cfg.crossover_rate, "Probability of crossover per pair");
  app.add_option("--mutation-rate", cfg.mutation_rate, "Per-bit flip probability (default 1/(4n))");
  app.add_option("--max-steps", cfg.max_steps, "Step budget for reaching an attractor");
  app.add_option("--threads", cfg.threads, "Fitness evaluation threads");
  app.add_option("--max-depth", cfg.max_depth, "Tree depth limit");
  app.add_option("--min-node-size", cfg.min_node_size, "Smallest basin that may be split");
  app.add_option("--purity", cfg.purity, "Basin purity that stops splitting");
  app.add_option("--train-fraction", cfg.train_fraction, "Hold out the rest for a held-out score");
  app.add_flag("--impute-n", cfg.impute_n, "Read N as A instead of skipping the window");

  auto* train = app.add_subcommand("train", "Train a model from labelled sequences");
  auto* predict_cmd = app.add_subcommand("predict", "Per-position predictions for sequences");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model on labelled sequences");
  auto* inspect = app.add_subcommand("inspect-ca", "Describe the dynamics of one rule");
  inspect->add_option("rule", cfg.rule_hex, "Hex dependency string, one digit per cell")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hmaca: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (train->parsed()) return cmd_train(cfg, out);
    if (predict_cmd->parsed()) return cmd_predict(cfg, out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(cfg, out);
    if (inspect->parsed()) return cmd_inspect_ca(cfg, out);
  } catch (const Failure& f) {
    err << "hmaca: " << f.message << '\n';
    return f.code;
  } catch (const Error& e) {
    err << "hmaca: " << e.what() << '\n';
    return code_for(e, false);
  }
  return kConfigError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace hmaca::cli
