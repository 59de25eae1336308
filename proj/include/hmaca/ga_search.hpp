#pragma once

// Genetic search over dependency strings. A chromosome is scored by how well
// its attractor basins separate a labelled pattern set.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmaca/ca_engine.hpp"
#include "hmaca/random.hpp"

namespace hmaca {

using ClassLabel = std::uint32_t;

struct Pattern {
  CaState bits;
  ClassLabel label = 0;
};

class PatternSet {
 public:
  /// class_count 0 means "1 + largest label".
  explicit PatternSet(std::vector<Pattern> patterns, std::size_t class_count = 0);

  const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }
  std::size_t width() const noexcept { return width_; }
  std::size_t class_count() const noexcept { return class_count_; }
  /// Number of labels that occur at least once.
  std::size_t distinct_labels() const;

 private:
  std::vector<Pattern> patterns_;
  std::size_t width_ = 0;
  std::size_t class_count_ = 0;
};

struct Chromosome {
  DependencyString genome;
  std::optional<double> fitness;
};

struct GaConfig {
  std::size_t population_size = 500;
  std::size_t max_generations = 50;
  std::size_t elite_count = 2;
  double crossover_rate = 0.9;
  /// Unset means 1/(4n): one expected flip per genome.
  std::optional<double> mutation_rate_per_bit;
  std::uint64_t rng_seed = 0;
  std::size_t target_basin_count = 2;
  std::uint64_t max_steps = kDefaultMaxSteps;
  /// Worker threads for fitness evaluation; results do not depend on it.
  std::size_t threads = 1;

  double mutation_rate(std::size_t width) const {
    return mutation_rate_per_bit ? *mutation_rate_per_bit : 1.0 / (4.0 * static_cast<double>(width));
  }
  /// Throws InvalidConfig when an invariant does not hold.
  void validate() const;
};

/// How a rule distributes a pattern set over its basins.
struct BasinAssessment {
  /// False when some pattern did not reach an attractor within max_steps.
  bool complete = true;
  /// Per pattern, index into `attractors` (meaningful only when complete).
  std::vector<std::size_t> basin_of;
  /// Distinct attractor ids reached, sorted.
  std::vector<CaState> attractors;
  /// Per attractor: label counts.
  std::vector<std::vector<std::size_t>> label_counts;
  std::vector<ClassLabel> majority;
  std::size_t majority_hits = 0;
};

BasinAssessment assess_basins(const TransitionSpec& spec, const PatternSet& patterns,
                              std::uint64_t max_steps);

/// Majority label of a count vector; ties go to the smaller label.
ClassLabel majority_label(const std::vector<std::size_t>& counts);

std::vector<Chromosome> init_population(const GaConfig& config, std::size_t width);

/// Fraction of patterns whose basin majority matches their label, scaled by
/// k/used when more than k basins are used. A rule that leaves any pattern
/// short of an attractor scores 0. A set with a single label scores 1 for
/// every rule, since there is nothing to separate.
double fitness(const Chromosome& c, const PatternSet& patterns, const GaConfig& config);

/// Fills in every missing cached fitness.
void evaluate_population(std::vector<Chromosome>& population, const PatternSet& patterns,
                         const GaConfig& config);

/// Best first; ties broken by ascending genome hex.
void rank_population(std::vector<Chromosome>& population);

/// Elitism, rank-weighted parent selection, single-point crossover at cell
/// boundaries, per-bit mutation. `generation` keys the random sub-streams.
std::vector<Chromosome> next_generation(const std::vector<Chromosome>& population,
                                        const GaConfig& config, std::uint64_t generation);

struct EvolveResult {
  Chromosome best;
  double best_fitness = 0.0;
  std::size_t generations_run = 0;
  /// Best fitness of each evaluated generation, generation 0 first.
  std::vector<double> fitness_history;
  std::map<CaState, ClassLabel> basin_label_map;
};

EvolveResult evolve(const PatternSet& patterns, const GaConfig& config);

/// Two-column TSV: generation, best_fitness.
std::string fitness_history_tsv(const std::vector<double>& history);

}  // namespace hmaca
