#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hmaca/ca_engine.hpp"
#include "hmaca/ga_search.hpp"
#include "hmaca/random.hpp"

namespace hmaca::testing {

inline DependencyString random_genome(Rng& rng, std::size_t width, bool allow_invert = true) {
  std::vector<CellGene> cells(width);
  for (auto& g : cells) {
    g = CellGene::from_nibble(static_cast<std::uint8_t>(rng() & 0xF));
    if (!allow_invert) g.invert = false;
  }
  return DependencyString(std::move(cells));
}

inline CaState random_state(Rng& rng, std::size_t width) {
  CaState s(width);
  for (std::size_t i = 0; i < width; ++i) s.set(i, rng() & 1u);
  return s;
}

/// Visited-set trajectory walk using only the local rule.
inline AttractorResult oracle_attractor(const TransitionSpec& spec, CaState s) {
  std::unordered_map<CaState, std::uint64_t, CaStateHash> seen;
  std::vector<CaState> trail;
  for (std::uint64_t t = 0;; ++t) {
    if (auto it = seen.find(s); it != seen.end()) {
      AttractorResult r{trail[it->second], t - it->second, it->second};
      for (std::size_t i = it->second; i < trail.size(); ++i) {
        if (trail[i].to_bits() < r.attractor_id.to_bits()) r.attractor_id = trail[i];
      }
      return r;
    }
    seen.emplace(s, t);
    trail.push_back(s);
    s = step_local_rule(spec, s);
  }
}

/// Number of states with step(s) == s, by exhaustive search.
inline std::uint64_t oracle_fixed_points(const TransitionSpec& spec) {
  std::uint64_t count = 0;
  const std::size_t n = spec.width();
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    const CaState s = CaState::from_index(n, v);
    if (step_local_rule(spec, s) == s) ++count;
  }
  return count;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string golden_path(const std::string& name) {
  return std::string(HMACA_GOLDEN_DIR) + "/" + name;
}

/// Contents of a frozen file. With HMACA_UPDATE_GOLDEN set, `actual` is
/// written first so the comparison refreezes the file.
inline std::string golden(const std::string& name, const std::string& actual) {
  if (std::getenv("HMACA_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden_path(name), std::ios::binary) << actual;
  }
  return read_file(golden_path(name));
}

/// Two classes at width 8 separated by cell 0; `held_out` selects the
/// disjoint evaluation half.
inline PatternSet golden_tree_patterns(bool held_out) {
  static const char* const train[] = {"00010110", "00111001", "01001101", "01110010",
                                      "10001011", "10110100", "11000111", "11101000"};
  static const char* const test[] = {"00000011", "00101110", "01011000", "01100101",
                                     "10010001", "10100110", "11011010", "11110011"};
  std::vector<Pattern> ps;
  for (const char* bits : held_out ? test : train) {
    ps.push_back({CaState::from_bits(bits), static_cast<ClassLabel>(bits[0] - '0')});
  }
  return PatternSet(std::move(ps), 2);
}

}  // namespace hmaca::testing
