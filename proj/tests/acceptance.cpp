// Acceptance suite: one PASS/FAIL line per criterion, each under a fixed
// wall-clock limit. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "hmaca/bio_encode.hpp"
#include "hmaca/cli.hpp"
#include "hmaca/eval_harness.hpp"
#include "hmaca/maca_tree.hpp"
#include "test_support.hpp"

using namespace hmaca;
using hmaca::testing::random_genome;
using hmaca::testing::random_state;
using hmaca::testing::read_file;

namespace {

// Tolerances and limits, pinned.
constexpr double kLimitEquivalence = 5.0;
constexpr double kLimitBasins = 30.0;
constexpr double kLimitRank = 10.0;
constexpr double kLimitHandCase = 1.0;
constexpr double kLimitGa = 120.0;
constexpr double kLimitTree = 300.0;
constexpr double kLimitFormat = 1.0;
constexpr double kLimitRoundTrip = 60.0;
constexpr double kLimitGolden = 120.0;
constexpr double kMinHeldOutAccuracy = 0.90;

const std::string kPromoter = HMACA_SOURCE_DIR "/data/synthetic_promoter/";

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && secs > limit_s) {
    o.ok = false;
    o.detail = "over time limit";
  }
  if (!o.ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs/%.0fs", secs, limit_s);
  std::cout << (o.ok ? "PASS" : "FAIL") << "  [" << id << "] " << name << "  (" << timing << ")";
  if (!o.detail.empty()) std::cout << "  " << o.detail;
  std::cout << std::endl;
}

std::vector<LabeledWindow> promoter_windows(const std::string& stem) {
  std::ifstream fa(kPromoter + stem + ".fa");
  std::ifstream tsv(kPromoter + stem + ".tsv");
  const auto seqs = parse_nucleotide_fasta(fa);
  const auto intervals = parse_intervals(tsv);
  const WindowSpec spec{12, 12, Task::Promoter};
  std::vector<LabeledWindow> out;
  for (const auto& s : seqs) {
    for (auto& w : label_windows(s, intervals, spec).windows) out.push_back(std::move(w));
  }
  return out;
}

PatternSet random_set(Rng& rng, std::size_t width, std::size_t count, std::size_t classes) {
  std::vector<Pattern> ps;
  for (std::size_t i = 0; i < count; ++i) {
    ps.push_back({random_state(rng, width), static_cast<ClassLabel>(rng() % classes)});
  }
  return PatternSet(std::move(ps), classes);
}

void matrix_rule_equivalence(Outcome& o) {
  Rng rng(1001);
  const std::size_t widths[] = {3, 8, 17, 64};
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = widths[i % 4];
    const TransitionSpec spec = build_transition(random_genome(rng, n));
    const CaState s = random_state(rng, n);
    const CaState local = step_local_rule(spec, s);
    o.require(step_matrix(spec, s) == local, "matrix path differs at width " + std::to_string(n));
    o.require(step(spec, s) == local, "packed path differs at width " + std::to_string(n));
  }
}

void basin_partition(Outcome& o) {
  Rng rng(1002);
  std::size_t calls = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const TransitionSpec spec = build_transition(random_genome(rng, n));
    const BasinMap map = enumerate_basins(spec);
    const std::uint64_t states = std::uint64_t{1} << n;
    o.require(map.assignment.size() == states, "assignment is not total");
    std::uint64_t total = 0;
    for (auto b : map.basin_sizes) total += b;
    o.require(total == states, "basin sizes do not sum to 2^n");
    std::vector<std::uint64_t> counted(map.attractors.size(), 0);
    for (std::uint64_t v = 0; v < states; ++v) {
      o.require(map.assignment[v] < map.attractors.size(), "state outside every basin");
      ++counted[map.assignment[v]];
      // One step never leaves a basin.
      const CaState next = step(spec, CaState::from_index(n, v));
      o.require(map.assignment[next.to_index()] == map.assignment[v], "successor in another basin");
    }
    o.require(counted == map.basin_sizes, "assignment disagrees with basin sizes");
    for (int c = 0; c < 10; ++c, ++calls) {
      const std::uint64_t v = rng() % states;
      const AttractorResult r = evolve_to_attractor(spec, CaState::from_index(n, v), states + 1);
      const auto& expected = map.attractors[map.assignment[v]];
      o.require(r.attractor_id == expected.attractor_id, "evolve_to_attractor lands elsewhere");
      o.require(r.cycle_length == expected.cycle_length, "cycle length differs");
      o.require(r.transient_depth == map.depth[v], "transient depth differs");
    }
  }
  o.require(calls == 1000, "wrong call count");
}

void rank_oracle(Outcome& o) {
  Rng rng(1003);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const TransitionSpec spec = build_transition(random_genome(rng, n, false));
    o.require(spec.is_linear(), "generated spec is not linear");
    const BasinMap map = enumerate_basins(spec);
    const auto ones = std::count_if(map.attractors.begin(), map.attractors.end(),
                                    [](const AttractorResult& a) { return a.cycle_length == 1; });
    o.require(fixed_point_count(spec).value() == std::uint64_t(ones),
              "rank count " + std::to_string(fixed_point_count(spec).value()) + " vs enumerated " +
                  std::to_string(ones));
  }
}

void rule90_hand_case(Outcome& o) {
  const TransitionSpec spec = build_transition(DependencyString::from_hex("AAA"));
  const CaState s1 = step(spec, CaState::from_bits("111"));
  o.require(s1.to_bits() == "101", "111 does not step to 101");
  o.require(step(spec, s1).to_bits() == "000", "101 does not step to 000");
  const BasinMap map = enumerate_basins(spec);
  o.require(map.attractors.size() == 1, "expected one attractor");
  o.require(map.basin_sizes.size() == 1 && map.basin_sizes[0] == 8, "basin size is not 8");
  o.require(map.attractors[0].attractor_id.to_bits() == "000", "attractor is not 000");
  o.require(fixed_point_count(spec).value() == 1, "fixed point count is not 1");
}

void ga_contract(Outcome& o) {
  Rng rng(1005);
  for (int run = 0; run < 20; ++run) {
    const PatternSet set = random_set(rng, 16, 40, 2);
    GaConfig cfg;
    cfg.population_size = 50;
    cfg.max_generations = 30;
    cfg.rng_seed = 5000 + run;
    const EvolveResult r = evolve(set, cfg);
    o.require(std::is_sorted(r.fitness_history.begin(), r.fitness_history.end()),
              "best fitness decreased in run " + std::to_string(run));
    o.require(r.generations_run <= cfg.max_generations, "generation budget exceeded");
    if (run < 3) {
      const EvolveResult again = evolve(set, cfg);
      o.require(again.best.genome == r.best.genome && again.fitness_history == r.fitness_history,
                "rerun differs in run " + std::to_string(run));
    }
  }
  {
    const PatternSet set = random_set(rng, 16, 40, 2);
    GaConfig cfg;
    cfg.rng_seed = 42;
    const EvolveResult r = evolve(set, cfg);
    o.require(cfg.population_size == 500, "default population is not 500");
    o.require(std::is_sorted(r.fitness_history.begin(), r.fitness_history.end()), "pop-500 history decreased");
  }
  std::vector<Pattern> same;
  for (int i = 0; i < 20; ++i) same.push_back({random_state(rng, 16), 1});
  GaConfig cfg;
  cfg.population_size = 50;
  cfg.max_generations = 30;
  cfg.rng_seed = 9;
  const EvolveResult single = evolve(PatternSet(std::move(same), 2), cfg);
  o.require(single.generations_run == 0 && single.best_fitness == 1.0, "no early exit on a single class");
}

void tree_consistency(Outcome& o) {
  const auto train = promoter_windows("train");
  const auto test = promoter_windows("test");
  o.require(train.size() == 64, "expected 64 training windows");
  TreeConfig cfg;
  cfg.ga.population_size = 200;
  cfg.ga.max_generations = 30;
  cfg.ga.rng_seed = 42;
  cfg.purity_threshold = 1.0;
  const TrainedTree tree = train_tree(to_pattern_set(train, 2), cfg);
  const double train_acc = evaluate(tree, train).accuracy;
  const double test_acc = evaluate(tree, test).accuracy;
  std::ostringstream msg;
  msg << "training " << train_acc << ", held-out " << test_acc;
  o.require(train_acc == 1.0, "training accuracy below 100%: " + msg.str());
  o.require(test_acc >= kMinHeldOutAccuracy, "held-out accuracy below threshold: " + msg.str());
  o.detail = msg.str();
}

void format_fidelity(Outcome& o) {
  const PredictionRecord row{"Sequence", 1, 'A', {{"ANN", 0.098}, {"HMM", 0.0}, {"NES", 0.0}}, "-"};
  const std::string tsv = render_prediction_tsv({row});
  o.require(tsv.substr(tsv.find('\n') + 1) == "Sequence-1-A\t0.098\t0.000\t0.000\t-\n", "prediction row differs");
  const auto rows = published_accuracy_rows();
  const std::string table = render_accuracy_table({rows.back()});
  o.require(table.substr(table.find('\n') + 1) == "HMACA\t75%\t85%\t97%\n", "accuracy row differs");
}

void model_round_trip(Outcome& o) {
  Rng rng(1008);
  for (int run = 0; run < 10; ++run) {
    const PatternSet set = random_set(rng, 8 + run, 30, 2 + run % 2);
    TreeConfig cfg;
    cfg.ga.population_size = 20;
    cfg.ga.max_generations = 5;
    cfg.ga.rng_seed = 800 + run;
    const TrainedTree tree = train_tree(set, cfg);
    const std::string text = save_tree(tree);
    const TrainedTree loaded = load_tree_string(text);
    o.require(save_tree(loaded) == text, "save/load/save differs in run " + std::to_string(run));
    for (int i = 0; i < 100; ++i) {
      const CaState probe = random_state(rng, tree.width());
      o.require(predict(tree, probe) == predict(loaded, probe), "prediction changed after reload");
    }
  }
}

void golden_run(Outcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("hmaca_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cfg = kPromoter + "hmaca.cfg";
  const std::string model = (dir / "m.model").string();
  const std::string tsv = (dir / "p.tsv").string();
  const std::string metrics = (dir / "metrics.txt").string();
  const std::string table = (dir / "table.tsv").string();
  std::ostringstream train_out, sink, err;
  auto run = [&](const std::vector<std::string>& args, std::ostream& out) {
    const int code = cli::run(args, out, err);
    o.require(code == 0, args.front() + " exited " + std::to_string(code) + ": " + err.str());
  };
  run({"train", "--config", cfg, "--seed", "42", "--sequences", kPromoter + "train.fa", "--labels",
       kPromoter + "train.tsv", "--model", model},
      train_out);
  run({"predict", "--config", cfg, "--model", model, "--sequences", kPromoter + "test.fa", "--out", tsv}, sink);
  run({"evaluate", "--config", cfg, "--model", model, "--sequences", kPromoter + "test.fa", "--labels",
       kPromoter + "test.tsv", "--out", metrics, "--table", table},
      sink);
  auto same = [&](const std::string& actual, const std::string& name) {
    o.require(actual == read_file(hmaca::testing::golden_path(name)), name + " differs");
  };
  same(train_out.str(), "cli_promoter_train.txt");
  same(read_file(model), "cli_promoter.model");
  same(read_file(tsv), "cli_promoter_predictions.tsv");
  same(read_file(metrics), "cli_promoter_metrics.txt");
  same(read_file(table), "cli_promoter_table.tsv");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  criterion(1, "matrix and local-rule steps agree", kLimitEquivalence, matrix_rule_equivalence);
  criterion(2, "basin enumeration is a partition and matches trajectories", kLimitBasins, basin_partition);
  criterion(3, "rank-based fixed point count matches enumeration", kLimitRank, rank_oracle);
  criterion(4, "rule-90 width-3 hand case", kLimitHandCase, rule90_hand_case);
  criterion(5, "genetic search contract", kLimitGa, ga_contract);
  criterion(6, "tree consistency on the motif corpus", kLimitTree, tree_consistency);
  criterion(7, "report format fidelity", kLimitFormat, format_fidelity);
  criterion(8, "model save/load round trip", kLimitRoundTrip, model_round_trip);
  criterion(9, "end-to-end golden run", kLimitGolden, golden_run);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
