#pragma once

// Additive one-dimensional cellular automata over GF(2).
//
// A cell reads its left neighbour, itself and its right neighbour (null
// boundary) and XORs the selected bits with an optional inversion bit, so the
// global map is s' = T.s + F with T tridiagonal.
//
// States are packed bit vectors of up to kMaxWidth cells. Cell 0 is the most
// significant bit: the textual form "010" is cell 0, cell 1, cell 2, and the
// numeric order of packed states is the lexicographic order of those strings.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hmaca/error.hpp"

namespace hmaca {

inline constexpr std::size_t kMaxWidth = 256;
inline constexpr std::size_t kMaxEnumerationWidth = 20;
inline constexpr std::uint64_t kDefaultMaxSteps = 10000;

class CaState {
 public:
  static constexpr std::size_t kWords = kMaxWidth / 64;

  CaState() = default;
  explicit CaState(std::size_t width);

  /// Parses a string of '0'/'1' characters, cell 0 first.
  static CaState from_bits(std::string_view bits);
  /// Packs the low `width` bits of `value`; bit (width-1) becomes cell 0.
  static CaState from_index(std::size_t width, std::uint64_t value);
  /// Parses the hex rendering produced by to_hex().
  static CaState from_hex(std::size_t width, std::string_view hex);

  std::size_t width() const noexcept { return width_; }

  bool get(std::size_t cell) const noexcept {
    const std::size_t pos = width_ - 1 - cell;
    return (words_[pos / 64] >> (pos % 64)) & 1u;
  }
  void set(std::size_t cell, bool value) noexcept {
    const std::size_t pos = width_ - 1 - cell;
    const std::uint64_t bit = std::uint64_t{1} << (pos % 64);
    if (value) {
      words_[pos / 64] |= bit;
    } else {
      words_[pos / 64] &= ~bit;
    }
  }
  void flip(std::size_t cell) noexcept { set(cell, !get(cell)); }

  /// Integer value for widths up to 64.
  std::uint64_t to_index() const noexcept { return words_[0]; }

  std::string to_bits() const;
  /// ceil(width/4) hex digits of the packed value, zero padded.
  std::string to_hex() const;

  bool none() const noexcept;
  bool all() const noexcept;
  std::size_t popcount() const noexcept;
  /// XOR-sum of the cells selected by `mask`.
  bool parity_with(const CaState& mask) const noexcept;

  CaState& operator^=(const CaState& other) noexcept;
  CaState& operator&=(const CaState& other) noexcept;
  friend CaState operator^(CaState a, const CaState& b) noexcept { return a ^= b; }
  friend CaState operator&(CaState a, const CaState& b) noexcept { return a &= b; }

  /// Packed view: cell i moves to cell i+1 (cell 0 reads 0).
  CaState shifted_towards_end() const noexcept;
  /// Packed view: cell i moves to cell i-1 (last cell reads 0).
  CaState shifted_towards_start() const noexcept;

  friend bool operator==(const CaState& a, const CaState& b) noexcept = default;
  /// Orders by width, then lexicographically by cell string.
  friend std::strong_ordering operator<=>(const CaState& a, const CaState& b) noexcept;

  std::size_t hash() const noexcept;

  const std::array<std::uint64_t, kWords>& words() const noexcept { return words_; }

 private:
  void mask_tail() noexcept;

  std::array<std::uint64_t, kWords> words_{};
  std::size_t width_ = 0;
};

struct CaStateHash {
  std::size_t operator()(const CaState& s) const noexcept { return s.hash(); }
};

struct CellGene {
  bool dep_left = false;
  bool dep_self = false;
  bool dep_right = false;
  bool invert = false;

  /// dep_left<<3 | dep_self<<2 | dep_right<<1 | invert
  std::uint8_t nibble() const noexcept {
    return static_cast<std::uint8_t>(dep_left << 3 | dep_self << 2 | dep_right << 1 | invert);
  }
  static CellGene from_nibble(std::uint8_t v) noexcept {
    return {bool(v & 8u), bool(v & 4u), bool(v & 2u), bool(v & 1u)};
  }

  friend bool operator==(const CellGene&, const CellGene&) = default;
};

/// Per-cell rule genome. One hex digit per cell, cell 0 first.
class DependencyString {
 public:
  DependencyString() = default;
  explicit DependencyString(std::vector<CellGene> cells);

  static DependencyString uniform(std::size_t width, CellGene gene);
  static DependencyString from_hex(std::string_view hex);

  std::size_t width() const noexcept { return cells_.size(); }
  const std::vector<CellGene>& cells() const noexcept { return cells_; }
  const CellGene& operator[](std::size_t i) const noexcept { return cells_[i]; }

  /// Genome bit b: cell b/4, field b%4 in (left, self, right, invert) order.
  bool bit(std::size_t b) const noexcept;
  void flip_bit(std::size_t b);
  std::size_t bit_count() const noexcept { return 4 * cells_.size(); }

  std::string to_hex() const;

  friend bool operator==(const DependencyString&, const DependencyString&) = default;

 private:
  std::vector<CellGene> cells_;
};

/// Dense GF(2) matrix; row i is packed like a CaState whose cells are columns.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols);

  static BitMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  bool operator()(std::size_t r, std::size_t c) const noexcept { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v) noexcept { rows_[r].set(c, v); }
  const CaState& row(std::size_t r) const noexcept { return rows_[r]; }

  /// Matrix-vector product over GF(2).
  CaState operator*(const CaState& v) const;
  BitMatrix operator^(const BitMatrix& other) const;

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::vector<CaState> rows_;
  std::size_t cols_ = 0;
};

/// Rank over GF(2) by Gaussian elimination.
std::size_t gf2_rank(const BitMatrix& m);

/// Solution-space summary of A.x = b over GF(2).
struct Gf2SolveResult {
  std::size_t rank = 0;
  bool consistent = true;
};
Gf2SolveResult gf2_solve_summary(const BitMatrix& a, const CaState& b);

/// Matrix-plus-inversion-vector realization of a DependencyString.
class TransitionSpec {
 public:
  const BitMatrix& matrix() const noexcept { return matrix_; }
  const CaState& inversion() const noexcept { return inversion_; }
  const DependencyString& genome() const noexcept { return genome_; }
  std::size_t width() const noexcept { return genome_.width(); }
  bool is_linear() const noexcept { return inversion_.none(); }

  // Diagonals of T packed as cell masks. step() uses these.
  const CaState& left_mask() const noexcept { return left_; }
  const CaState& self_mask() const noexcept { return self_; }
  const CaState& right_mask() const noexcept { return right_; }

 private:
  friend TransitionSpec build_transition(const DependencyString& dep);

  DependencyString genome_;
  BitMatrix matrix_;
  CaState inversion_;
  CaState left_, self_, right_;
};

TransitionSpec build_transition(const DependencyString& dep);

/// Bit-parallel (T.s) ^ F using the packed diagonals.
CaState step(const TransitionSpec& spec, const CaState& s);
/// (T.s) ^ F through the dense matrix product.
CaState step_matrix(const TransitionSpec& spec, const CaState& s);
/// Cell-by-cell evaluation of the local rule.
CaState step_local_rule(const TransitionSpec& spec, const CaState& s);

struct AttractorResult {
  /// Smallest state on the cycle.
  CaState attractor_id;
  std::uint64_t cycle_length = 1;
  std::uint64_t transient_depth = 0;

  friend bool operator==(const AttractorResult&, const AttractorResult&) = default;
};

/// Brent cycle detection. Throws StepBudgetExceeded when the first repeated
/// state lies beyond `max_steps` steps from `s`.
AttractorResult evolve_to_attractor(const TransitionSpec& spec, const CaState& s,
                                    std::uint64_t max_steps = kDefaultMaxSteps);

struct BasinMap {
  std::size_t width = 0;
  /// Sorted by attractor id; transient_depth is 0 for every entry.
  std::vector<AttractorResult> attractors;
  std::vector<std::uint64_t> basin_sizes;
  std::vector<std::uint32_t> max_transient;
  /// Indexed by CaState::to_index(); value is the position in `attractors`.
  std::vector<std::uint32_t> assignment;
  /// Steps from each state to its attractor cycle.
  std::vector<std::uint32_t> depth;
};

BasinMap enumerate_basins(const TransitionSpec& spec);

/// Fixed points form an affine subspace of dimension `nullity` when `exists`.
struct FixedPointCount {
  bool exists = true;
  std::size_t nullity = 0;

  /// 2^nullity, or 0 when no fixed point exists. Throws when it overflows 64 bits.
  std::uint64_t value() const;
};

/// Linear case only (F = 0); throws NotLinear otherwise.
FixedPointCount fixed_point_count(const TransitionSpec& spec);
/// Solves (T + I).s = F; also valid for linear specs.
FixedPointCount affine_fixed_point_count(const TransitionSpec& spec);

enum class DynamicsTag { Homogeneous, Periodic, LongCycle };
std::string_view dynamics_tag_name(DynamicsTag tag) noexcept;

struct DynamicsSummary {
  std::size_t attractor_count = 0;
  /// cycle length -> number of attractors with that length
  std::map<std::uint64_t, std::size_t> cycle_length_histogram;
  std::uint32_t max_transient = 0;
  DynamicsTag tag = DynamicsTag::LongCycle;
};

/// Heuristic diagnostic; cycles count as short when no longer than the width.
DynamicsSummary dynamics_summary(const TransitionSpec& spec);
DynamicsSummary dynamics_summary(const BasinMap& basins);

}  // namespace hmaca
