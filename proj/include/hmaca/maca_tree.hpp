#pragma once

// Classification tree whose internal nodes are evolved cellular automata.
// Each node routes a pattern by the attractor basin it falls into; a basin
// either carries a class label or hands the pattern to a child node.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hmaca/ca_engine.hpp"
#include "hmaca/ga_search.hpp"

namespace hmaca {

inline constexpr int kModelFormatVersion = 1;

struct MacaTreeNode;

struct LeafOutcome {
  ClassLabel label = 0;
  double purity = 1.0;
  std::size_t support = 0;
};

struct ChildOutcome {
  std::unique_ptr<MacaTreeNode> node;
};

using BasinOutcome = std::variant<LeafOutcome, ChildOutcome>;

struct MacaTreeNode {
  DependencyString ca;
  /// Attractor id -> outcome, in attractor order.
  std::map<CaState, BasinOutcome> basin_table;
  std::size_t depth = 0;
  ClassLabel fallback_label = 0;
  /// Dotted position in the tree: "0" for the root, "0.2" for the child
  /// under its third basin, and so on.
  std::string path = "0";
};

struct TreeConfig {
  GaConfig ga;
  std::size_t max_depth = 10;
  std::size_t min_node_size = 2;
  double purity_threshold = 1.0;

  void validate() const;
};

class TrainedTree {
 public:
  TrainedTree(std::unique_ptr<MacaTreeNode> root, std::size_t class_count, std::size_t width,
              std::uint64_t max_steps = kDefaultMaxSteps);

  TrainedTree(TrainedTree&&) noexcept = default;
  TrainedTree& operator=(TrainedTree&&) noexcept = default;

  const MacaTreeNode& root() const noexcept { return *root_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t width() const noexcept { return width_; }
  int format_version() const noexcept { return kModelFormatVersion; }
  std::uint64_t max_steps() const noexcept { return max_steps_; }

 private:
  std::unique_ptr<MacaTreeNode> root_;
  std::size_t class_count_;
  std::size_t width_;
  std::uint64_t max_steps_;
};

/// Per-node record of the genetic search, in pre-order.
struct NodeTrainingLog {
  std::string path;
  std::size_t subset_size = 0;
  std::size_t target_basins = 0;
  std::size_t generations_run = 0;
  double best_fitness = 0.0;
  std::vector<double> fitness_history;
};

/// Recursive basin partition of `patterns` starting at `depth`. The genetic
/// search of each node is seeded from config.ga.rng_seed and the node path.
std::unique_ptr<MacaTreeNode> partition(const PatternSet& patterns, std::size_t k,
                                        const TreeConfig& config, std::size_t depth = 0,
                                        const std::string& path = "0",
                                        std::vector<NodeTrainingLog>* log = nullptr);

/// Trains a full tree with k = class count at the root.
TrainedTree train_tree(const PatternSet& patterns, const TreeConfig& config,
                       std::vector<NodeTrainingLog>* log = nullptr);

struct Prediction {
  ClassLabel label = 0;
  double score = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Score 0.5 with the node's fallback label when a basin was never seen in
/// training or the step budget runs out.
Prediction predict(const TrainedTree& tree, const CaState& bits);
Prediction predict(const TrainedTree& tree, const CaState& bits, std::uint64_t max_steps);

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t leaf_count = 0;
  std::size_t max_depth = 0;
  double mean_leaf_purity = 0.0;
  std::vector<std::size_t> leaves_per_class;
};

TreeStats tree_stats(const TrainedTree& tree);

/// Line-oriented model text.
std::string save_tree(const TrainedTree& tree);
void save_tree(const TrainedTree& tree, std::ostream& out);
/// Rejects unknown format versions and structurally invalid trees.
TrainedTree load_tree(std::istream& in, std::uint64_t max_steps = kDefaultMaxSteps);
TrainedTree load_tree_string(const std::string& text, std::uint64_t max_steps = kDefaultMaxSteps);

}  // namespace hmaca
