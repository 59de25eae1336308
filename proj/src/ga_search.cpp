#include "hmaca/ga_search.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "hmaca/format.hpp"

namespace hmaca {

namespace {

// Stream tag for the initial population; breeding generation g uses tag g.
constexpr std::uint64_t kInitStream = 0;

CellGene random_gene(Rng& rng) {
  return CellGene::from_nibble(static_cast<std::uint8_t>(rng() & 0xF));
}

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

PatternSet::PatternSet(std::vector<Pattern> patterns, std::size_t class_count)
    : patterns_(std::move(patterns)) {
  if (patterns_.empty()) {
    throw Error(Errc::EmptyPatternSet, "pattern set is empty");
  }
  width_ = patterns_.front().bits.width();
  ClassLabel largest = 0;
  for (const auto& p : patterns_) {
    if (p.bits.width() != width_) {
      throw Error(Errc::WidthMismatch, "patterns must share one width");
    }
    largest = std::max(largest, p.label);
  }
  if (class_count != 0 && class_count <= largest) {
    throw Error(Errc::InvalidConfig, "label " + std::to_string(largest) +
                                         " outside declared class count " +
                                         std::to_string(class_count));
  }
  class_count_ = std::max<std::size_t>(class_count, std::size_t{largest} + 1);
}

std::size_t PatternSet::distinct_labels() const {
  std::vector<bool> seen(class_count_, false);
  for (const auto& p : patterns_) seen[p.label] = true;
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

void GaConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (population_size == 0) fail("population_size must be positive");
  if (max_generations == 0) fail("max_generations must be positive");
  if (elite_count >= population_size) fail("elite_count must be below population_size");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover_rate outside [0,1]");
  if (mutation_rate_per_bit &&
      !(*mutation_rate_per_bit >= 0.0 && *mutation_rate_per_bit <= 1.0)) {
    fail("mutation_rate_per_bit outside [0,1]");
  }
  if (target_basin_count == 0) fail("target_basin_count must be positive");
  if (max_steps == 0) fail("max_steps must be positive");
}

ClassLabel majority_label(const std::vector<std::size_t>& counts) {
  ClassLabel best = 0;
  for (ClassLabel c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

BasinAssessment assess_basins(const TransitionSpec& spec, const PatternSet& patterns,
                              std::uint64_t max_steps) {
  if (spec.width() != patterns.width()) {
    throw Error(Errc::WidthMismatch, "rule width " + std::to_string(spec.width()) +
                                         " does not match pattern width " +
                                         std::to_string(patterns.width()));
  }
  BasinAssessment out;
  std::vector<CaState> reached;
  reached.reserve(patterns.size());
  for (const auto& p : patterns.patterns()) {
    try {
      reached.push_back(evolve_to_attractor(spec, p.bits, max_steps).attractor_id);
    } catch (const Error& e) {
      if (e.code() != Errc::StepBudgetExceeded) throw;
      out.complete = false;
      return out;
    }
  }
  out.attractors = reached;
  std::sort(out.attractors.begin(), out.attractors.end());
  out.attractors.erase(std::unique(out.attractors.begin(), out.attractors.end()),
                       out.attractors.end());
  out.label_counts.assign(out.attractors.size(),
                          std::vector<std::size_t>(patterns.class_count(), 0));
  out.basin_of.reserve(reached.size());
  for (std::size_t i = 0; i < reached.size(); ++i) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(out.attractors.begin(), out.attractors.end(), reached[i]) -
        out.attractors.begin());
    out.basin_of.push_back(idx);
    ++out.label_counts[idx][patterns.patterns()[i].label];
  }
  for (const auto& counts : out.label_counts) {
    const ClassLabel m = majority_label(counts);
    out.majority.push_back(m);
    out.majority_hits += counts[m];
  }
  return out;
}

std::vector<Chromosome> init_population(const GaConfig& config, std::size_t width) {
  if (width == 0 || width > kMaxWidth) {
    throw Error(Errc::WidthOutOfRange, "width " + std::to_string(width) + " outside [1, " +
                                           std::to_string(kMaxWidth) + "]");
  }
  std::vector<Chromosome> population;
  population.reserve(config.population_size);
  for (std::size_t slot = 0; slot < config.population_size; ++slot) {
    Rng rng = make_stream(config.rng_seed, kInitStream, slot);
    std::vector<CellGene> cells(width);
    for (auto& g : cells) g = random_gene(rng);
    population.push_back({DependencyString(std::move(cells)), std::nullopt});
  }
  return population;
}

double fitness(const Chromosome& c, const PatternSet& patterns, const GaConfig& config) {
  if (c.genome.width() != patterns.width()) {
    throw Error(Errc::WidthMismatch, "chromosome and pattern widths differ");
  }
  if (patterns.distinct_labels() < 2) return 1.0;
  const BasinAssessment a = assess_basins(build_transition(c.genome), patterns, config.max_steps);
  if (!a.complete) return 0.0;
  double f = static_cast<double>(a.majority_hits) / static_cast<double>(patterns.size());
  const std::size_t used = std::max<std::size_t>(1, a.attractors.size());
  if (used > config.target_basin_count) {
    f *= static_cast<double>(config.target_basin_count) / static_cast<double>(used);
  }
  return f;
}

void evaluate_population(std::vector<Chromosome>& population, const PatternSet& patterns,
                         const GaConfig& config) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].fitness) pending.push_back(i);
  }
  parallel_for(pending.size(), config.threads, [&](std::size_t j) {
    Chromosome& c = population[pending[j]];
    c.fitness = fitness(c, patterns, config);
  });
}

void rank_population(std::vector<Chromosome>& population) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  keys.reserve(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!population[i].fitness) {
      throw Error(Errc::UnevaluatedPopulation, "chromosome " + std::to_string(i) +
                                                   " has no fitness");
    }
    keys.emplace_back(population[i].genome.to_hex(), i);
  }
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    const double fa = *population[a.second].fitness;
    const double fb = *population[b.second].fitness;
    if (fa != fb) return fa > fb;
    return a < b;
  });
  std::vector<Chromosome> sorted;
  sorted.reserve(population.size());
  for (const auto& k : keys) sorted.push_back(std::move(population[k.second]));
  population = std::move(sorted);
}

std::vector<Chromosome> next_generation(const std::vector<Chromosome>& population,
                                        const GaConfig& config, std::uint64_t generation) {
  config.validate();
  std::vector<Chromosome> ranked = population;
  rank_population(ranked);

  const std::size_t n = ranked.size();
  const std::size_t width = ranked.front().genome.width();
  const double mutation = config.mutation_rate(width);

  std::vector<Chromosome> next;
  next.reserve(config.population_size);
  for (std::size_t i = 0; i < std::min(config.elite_count, n); ++i) next.push_back(ranked[i]);

  // Linear rank weights: rank r (0 = best) weighs n - r.
  const std::uint64_t total_weight = std::uint64_t{n} * (n + 1) / 2;
  auto select = [&](Rng& rng) -> const Chromosome& {
    std::uint64_t u = uniform_below(rng, total_weight);
    for (std::size_t r = 0; r < n; ++r) {
      const std::uint64_t w = n - r;
      if (u < w) return ranked[r];
      u -= w;
    }
    return ranked.back();
  };

  for (std::uint64_t pair = 0; next.size() < config.population_size; ++pair) {
    Rng rng = make_stream(config.rng_seed, generation, pair);
    const Chromosome& a = select(rng);
    const Chromosome& b = select(rng);
    std::vector<CellGene> ca = a.genome.cells();
    std::vector<CellGene> cb = b.genome.cells();
    bool crossed = false;
    if (width > 1 && bernoulli(rng, config.crossover_rate)) {
      const auto cut = static_cast<std::size_t>(1 + uniform_below(rng, width - 1));
      for (std::size_t i = cut; i < width; ++i) std::swap(ca[i], cb[i]);
      crossed = true;
    }
    for (auto* child : {&ca, &cb}) {
      DependencyString genome(std::move(*child));
      bool mutated = false;
      for (std::size_t bit = 0; bit < genome.bit_count(); ++bit) {
        if (bernoulli(rng, mutation)) {
          genome.flip_bit(bit);
          mutated = true;
        }
      }
      if (next.size() == config.population_size) break;
      Chromosome offspring{std::move(genome), std::nullopt};
      if (!crossed && !mutated) {
        // Unchanged clone keeps the parent's cached fitness.
        offspring.fitness = (child == &ca ? a : b).fitness;
      } else if (offspring.genome == a.genome) {
        offspring.fitness = a.fitness;
      } else if (offspring.genome == b.genome) {
        offspring.fitness = b.fitness;
      }
      next.push_back(std::move(offspring));
    }
  }
  return next;
}

EvolveResult evolve(const PatternSet& patterns, const GaConfig& config) {
  config.validate();
  std::vector<Chromosome> population = init_population(config, patterns.width());

  EvolveResult result;
  bool have_best = false;
  for (std::size_t generation = 0;; ++generation) {
    evaluate_population(population, patterns, config);
    rank_population(population);
    const Chromosome& leader = population.front();
    result.fitness_history.push_back(*leader.fitness);
    if (!have_best || *leader.fitness > result.best_fitness) {
      result.best = leader;
      result.best_fitness = *leader.fitness;
      have_best = true;
    }
    if (*leader.fitness == 1.0 || generation == config.max_generations) {
      result.generations_run = generation;
      break;
    }
    population = next_generation(population, config, generation + 1);
  }

  const BasinAssessment a =
      assess_basins(build_transition(result.best.genome), patterns, config.max_steps);
  if (a.complete) {
    for (std::size_t i = 0; i < a.attractors.size(); ++i) {
      result.basin_label_map.emplace(a.attractors[i], a.majority[i]);
    }
  }
  return result;
}

std::string fitness_history_tsv(const std::vector<double>& history) {
  std::ostringstream out;
  out << "generation\tbest_fitness\n";
  for (std::size_t g = 0; g < history.size(); ++g) {
    out << g << '\t' << format_fixed(history[g], 6) << '\n';
  }
  return out.str();
}

}  // namespace hmaca
