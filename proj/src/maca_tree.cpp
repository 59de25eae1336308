#include "hmaca/maca_tree.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hmaca/format.hpp"
#include "hmaca/random.hpp"

namespace hmaca {

namespace {

// FNV-1a; std::hash is not stable across implementations.
std::uint64_t path_key(const std::string& path) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : path) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

bool all_identical(const std::vector<Pattern>& patterns) {
  return std::all_of(patterns.begin(), patterns.end(),
                     [&](const Pattern& p) { return p.bits == patterns.front().bits; });
}

ClassLabel subset_majority(const PatternSet& patterns) {
  std::vector<std::size_t> counts(patterns.class_count(), 0);
  for (const auto& p : patterns.patterns()) ++counts[p.label];
  return majority_label(counts);
}

}  // namespace

void TreeConfig::validate() const {
  ga.validate();
  if (max_depth == 0) throw Error(Errc::InvalidConfig, "max_depth must be positive");
  if (min_node_size == 0) throw Error(Errc::InvalidConfig, "min_node_size must be positive");
  if (!(purity_threshold > 0.5 && purity_threshold <= 1.0)) {
    throw Error(Errc::InvalidConfig, "purity_threshold must lie in (0.5, 1]");
  }
}

TrainedTree::TrainedTree(std::unique_ptr<MacaTreeNode> root, std::size_t class_count,
                         std::size_t width, std::uint64_t max_steps)
    : root_(std::move(root)), class_count_(class_count), width_(width), max_steps_(max_steps) {
  if (!root_) throw Error(Errc::ModelFormat, "tree has no root");
}

std::unique_ptr<MacaTreeNode> partition(const PatternSet& patterns, std::size_t k,
                                        const TreeConfig& config, std::size_t depth,
                                        const std::string& path,
                                        std::vector<NodeTrainingLog>* log) {
  if (patterns.size() == 0) throw Error(Errc::EmptyTrainingSet, "empty training subset");
  if (k == 0) throw Error(Errc::InvalidConfig, "basin target k must be positive");

  GaConfig ga = config.ga;
  ga.target_basin_count = k;
  ga.rng_seed = derive_seed(config.ga.rng_seed, path_key(path));
  const EvolveResult evolved = evolve(patterns, ga);

  auto node = std::make_unique<MacaTreeNode>();
  node->ca = evolved.best.genome;
  node->depth = depth;
  node->path = path;
  node->fallback_label = subset_majority(patterns);
  if (log) {
    log->push_back({path, patterns.size(), k, evolved.generations_run, evolved.best_fitness,
                    evolved.fitness_history});
  }

  const BasinAssessment a =
      assess_basins(build_transition(node->ca), patterns, config.ga.max_steps);
  if (!a.complete) return node;  // every pattern routes to fallback_label

  for (std::size_t b = 0; b < a.attractors.size(); ++b) {
    std::vector<Pattern> subset;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (a.basin_of[i] == b) subset.push_back(patterns.patterns()[i]);
    }
    const auto& counts = a.label_counts[b];
    const ClassLabel majority = a.majority[b];
    const double purity =
        static_cast<double>(counts[majority]) / static_cast<double>(subset.size());
    const auto classes = static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));

    const bool stop = purity >= config.purity_threshold || subset.size() < config.min_node_size ||
                      depth >= config.max_depth || classes <= 1 || all_identical(subset);
    if (stop) {
      node->basin_table.emplace(a.attractors[b], LeafOutcome{majority, purity, subset.size()});
    } else {
      const PatternSet child_set(std::move(subset), patterns.class_count());
      auto child = partition(child_set, classes, config, depth + 1,
                             path + "." + std::to_string(b), log);
      node->basin_table.emplace(a.attractors[b], ChildOutcome{std::move(child)});
    }
  }
  return node;
}

TrainedTree train_tree(const PatternSet& patterns, const TreeConfig& config,
                       std::vector<NodeTrainingLog>* log) {
  config.validate();
  auto root = partition(patterns, std::max<std::size_t>(1, patterns.class_count()), config, 0,
                        "0", log);
  return TrainedTree(std::move(root), patterns.class_count(), patterns.width(),
                     config.ga.max_steps);
}

Prediction predict(const TrainedTree& tree, const CaState& bits) {
  return predict(tree, bits, tree.max_steps());
}

Prediction predict(const TrainedTree& tree, const CaState& bits, std::uint64_t max_steps) {
  if (bits.width() != tree.width()) {
    throw Error(Errc::WidthMismatch, "pattern width " + std::to_string(bits.width()) +
                                         " does not match model width " +
                                         std::to_string(tree.width()));
  }
  const MacaTreeNode* node = &tree.root();
  for (;;) {
    const Prediction fallback{node->fallback_label, 0.5};
    AttractorResult reached;
    try {
      reached = evolve_to_attractor(build_transition(node->ca), bits, max_steps);
    } catch (const Error& e) {
      if (e.code() != Errc::StepBudgetExceeded) throw;
      return fallback;
    }
    const auto it = node->basin_table.find(reached.attractor_id);
    if (it == node->basin_table.end()) return fallback;
    if (const auto* leaf = std::get_if<LeafOutcome>(&it->second)) {
      return {leaf->label, leaf->purity};
    }
    node = std::get<ChildOutcome>(it->second).node.get();
  }
}

TreeStats tree_stats(const TrainedTree& tree) {
  TreeStats stats;
  stats.leaves_per_class.assign(tree.class_count(), 0);
  double purity_sum = 0.0;
  std::vector<const MacaTreeNode*> stack{&tree.root()};
  while (!stack.empty()) {
    const MacaTreeNode* node = stack.back();
    stack.pop_back();
    ++stats.node_count;
    stats.max_depth = std::max(stats.max_depth, node->depth);
    for (const auto& [id, outcome] : node->basin_table) {
      if (const auto* leaf = std::get_if<LeafOutcome>(&outcome)) {
        ++stats.leaf_count;
        purity_sum += leaf->purity;
        if (leaf->label < stats.leaves_per_class.size()) ++stats.leaves_per_class[leaf->label];
      } else {
        stack.push_back(std::get<ChildOutcome>(outcome).node.get());
      }
    }
  }
  if (stats.leaf_count > 0) stats.mean_leaf_purity = purity_sum / static_cast<double>(stats.leaf_count);
  return stats;
}

// ---------------------------------------------------------------------------
// Model text
//
//   HMACA-TREE v1 width=<n> classes=<K>
//   node <path> ca=<hex> fallback=<label>
//   basin <attractor-hex> -> leaf <label> purity=<f> support=<c>
//   basin <attractor-hex> -> child <path>
//
// Nodes appear in pre-order; a node's basins are listed before its children.

namespace {

void write_node(const MacaTreeNode& node, std::ostream& out) {
  out << "node " << node.path << " ca=" << node.ca.to_hex() << " fallback=" << node.fallback_label
      << '\n';
  for (const auto& [id, outcome] : node.basin_table) {
    out << "basin " << id.to_hex() << " -> ";
    if (const auto* leaf = std::get_if<LeafOutcome>(&outcome)) {
      out << "leaf " << leaf->label << " purity=" << format_shortest(leaf->purity)
          << " support=" << leaf->support << '\n';
    } else {
      out << "child " << std::get<ChildOutcome>(outcome).node->path << '\n';
    }
  }
  for (const auto& [id, outcome] : node.basin_table) {
    if (const auto* child = std::get_if<ChildOutcome>(&outcome)) write_node(*child->node, out);
  }
}

[[noreturn]] void format_error(std::size_t line, const std::string& what) {
  throw Error(Errc::ModelFormat, "model line " + std::to_string(line) + ": " + what);
}

std::string expect_field(std::istringstream& in, const std::string& key, std::size_t line) {
  std::string token;
  if (!(in >> token) || token.rfind(key + "=", 0) != 0) {
    format_error(line, "expected " + key + "=...");
  }
  return token.substr(key.size() + 1);
}

std::uint64_t parse_unsigned(const std::string& text, std::size_t line) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      text.size() > 19) {
    format_error(line, "expected an unsigned integer, got '" + text + "'");
  }
  return std::stoull(text);
}

struct ParsedBasin {
  std::string attractor_hex;
  bool is_leaf = true;
  LeafOutcome leaf;
  std::string child_path;
  std::size_t line = 0;
};

struct ParsedNode {
  std::string ca_hex;
  ClassLabel fallback = 0;
  std::vector<ParsedBasin> basins;
  std::size_t line = 0;
};

}  // namespace

void save_tree(const TrainedTree& tree, std::ostream& out) {
  out << "HMACA-TREE v" << tree.format_version() << " width=" << tree.width()
      << " classes=" << tree.class_count() << '\n';
  write_node(tree.root(), out);
}

std::string save_tree(const TrainedTree& tree) {
  std::ostringstream out;
  save_tree(tree, out);
  return out.str();
}

TrainedTree load_tree(std::istream& in, std::uint64_t max_steps) {
  std::string text;
  std::size_t line_no = 1;
  if (!std::getline(in, text)) throw Error(Errc::ModelFormat, "model file is empty");

  std::size_t width = 0;
  std::size_t classes = 0;
  {
    std::istringstream header(text);
    std::string magic, version;
    if (!(header >> magic) || magic != "HMACA-TREE") format_error(1, "missing HMACA-TREE header");
    if (!(header >> version)) format_error(1, "missing format version");
    if (version != "v" + std::to_string(kModelFormatVersion)) {
      throw Error(Errc::UnknownModelVersion, "unsupported model version '" + version + "'");
    }
    width = parse_unsigned(expect_field(header, "width", 1), 1);
    classes = parse_unsigned(expect_field(header, "classes", 1), 1);
    std::string extra;
    if (header >> extra) format_error(1, "unexpected token '" + extra + "'");
    if (width == 0 || width > kMaxWidth) format_error(1, "width out of range");
    if (classes == 0) format_error(1, "class count must be positive");
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, ParsedNode> nodes;
  ParsedNode* current = nullptr;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    std::istringstream line(text);
    std::string kind;
    line >> kind;
    if (kind == "node") {
      std::string path;
      if (!(line >> path)) format_error(line_no, "node without path");
      ParsedNode node;
      node.line = line_no;
      node.ca_hex = expect_field(line, "ca", line_no);
      node.fallback = static_cast<ClassLabel>(parse_unsigned(expect_field(line, "fallback", line_no), line_no));
      if (node.fallback >= classes) format_error(line_no, "fallback label out of range");
      if (!nodes.emplace(path, std::move(node)).second) format_error(line_no, "duplicate node " + path);
      order.push_back(path);
      current = &nodes.at(path);
    } else if (kind == "basin") {
      if (!current) format_error(line_no, "basin before any node");
      ParsedBasin basin;
      basin.line = line_no;
      std::string arrow, outcome;
      if (!(line >> basin.attractor_hex >> arrow >> outcome) || arrow != "->") {
        format_error(line_no, "malformed basin line");
      }
      if (outcome == "leaf") {
        std::string label;
        if (!(line >> label)) format_error(line_no, "leaf without label");
        basin.leaf.label = static_cast<ClassLabel>(parse_unsigned(label, line_no));
        try {
          basin.leaf.purity = parse_double(expect_field(line, "purity", line_no));
        } catch (const Error&) {
          format_error(line_no, "bad purity");
        }
        basin.leaf.support = parse_unsigned(expect_field(line, "support", line_no), line_no);
        if (basin.leaf.label >= classes) format_error(line_no, "leaf label out of range");
        if (!(basin.leaf.purity > 0.0 && basin.leaf.purity <= 1.0)) format_error(line_no, "purity outside (0,1]");
        if (basin.leaf.support == 0) format_error(line_no, "leaf support must be positive");
      } else if (outcome == "child") {
        basin.is_leaf = false;
        if (!(line >> basin.child_path)) format_error(line_no, "child without path");
      } else {
        format_error(line_no, "unknown basin outcome '" + outcome + "'");
      }
      std::string extra;
      if (line >> extra) format_error(line_no, "unexpected token '" + extra + "'");
      current->basins.push_back(std::move(basin));
    } else {
      format_error(line_no, "unknown record '" + kind + "'");
    }
  }
  if (order.empty()) throw Error(Errc::ModelFormat, "model has no nodes");

  std::unordered_set<std::string> used;
  auto build = [&](auto&& self, const std::string& path, std::size_t depth) -> std::unique_ptr<MacaTreeNode> {
    const auto it = nodes.find(path);
    if (it == nodes.end()) throw Error(Errc::ModelFormat, "missing node " + path);
    if (!used.insert(path).second) throw Error(Errc::ModelFormat, "node " + path + " referenced twice");
    const ParsedNode& parsed = it->second;
    auto node = std::make_unique<MacaTreeNode>();
    node->path = path;
    node->depth = depth;
    node->fallback_label = parsed.fallback;
    try {
      node->ca = DependencyString::from_hex(parsed.ca_hex);
    } catch (const Error& e) {
      format_error(parsed.line, e.what());
    }
    if (node->ca.width() != width) format_error(parsed.line, "rule width does not match header");
    for (const auto& b : parsed.basins) {
      CaState id;
      try {
        id = CaState::from_hex(width, b.attractor_hex);
      } catch (const Error& e) {
        format_error(b.line, e.what());
      }
      BasinOutcome outcome = b.is_leaf ? BasinOutcome{b.leaf}
                                       : BasinOutcome{ChildOutcome{self(self, b.child_path, depth + 1)}};
      if (!node->basin_table.emplace(id, std::move(outcome)).second) {
        format_error(b.line, "duplicate basin");
      }
    }
    return node;
  };
  auto root = build(build, order.front(), 0);
  if (used.size() != nodes.size()) throw Error(Errc::ModelFormat, "model has unreachable nodes");
  return TrainedTree(std::move(root), classes, width, max_steps);
}

TrainedTree load_tree_string(const std::string& text, std::uint64_t max_steps) {
  std::istringstream in(text);
  return load_tree(in, max_steps);
}

}  // namespace hmaca
