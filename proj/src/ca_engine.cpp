#include "hmaca/ca_engine.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace hmaca {

namespace {

std::size_t word_count(std::size_t width) { return (width + 63) / 64; }

void check_width(std::size_t width) {
  if (width == 0 || width > kMaxWidth) {
    throw Error(Errc::WidthOutOfRange,
                "width " + std::to_string(width) + " outside [1, " + std::to_string(kMaxWidth) + "]");
  }
}

void check_same_width(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(Errc::WidthMismatch,
                "width mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr char kHexDigits[] = "0123456789ABCDEF";

}  // namespace

// ---------------------------------------------------------------------------
// CaState

CaState::CaState(std::size_t width) : width_(width) { check_width(width); }

CaState CaState::from_bits(std::string_view bits) {
  CaState s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      s.set(i, true);
    } else if (bits[i] != '0') {
      throw Error(Errc::InvalidHex, "state string may only contain 0 and 1");
    }
  }
  return s;
}

CaState CaState::from_index(std::size_t width, std::uint64_t value) {
  CaState s(width);
  s.words_[0] = value;
  s.mask_tail();
  return s;
}

CaState CaState::from_hex(std::size_t width, std::string_view hex) {
  CaState s(width);
  const std::size_t digits = (width + 3) / 4;
  if (hex.size() != digits) {
    throw Error(Errc::InvalidHex, "state hex '" + std::string(hex) + "' must have " +
                                      std::to_string(digits) + " digits");
  }
  for (std::size_t d = 0; d < digits; ++d) {
    const int v = hex_value(hex[d]);
    if (v < 0) {
      throw Error(Errc::InvalidHex, "invalid hex digit in '" + std::string(hex) + "'");
    }
    const std::size_t pos = 4 * (digits - 1 - d);
    s.words_[pos / 64] |= std::uint64_t(v) << (pos % 64);
  }
  const CaState unmasked = s;
  s.mask_tail();
  if (!(s == unmasked)) {
    throw Error(Errc::InvalidHex, "state hex '" + std::string(hex) + "' exceeds width " +
                                      std::to_string(width));
  }
  return s;
}

void CaState::mask_tail() noexcept {
  const std::size_t used = word_count(width_);
  for (std::size_t w = used; w < kWords; ++w) words_[w] = 0;
  if (used > 0 && width_ % 64 != 0) {
    words_[used - 1] &= (std::uint64_t{1} << (width_ % 64)) - 1;
  }
}

std::string CaState::to_bits() const {
  std::string out(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (get(i)) out[i] = '1';
  }
  return out;
}

std::string CaState::to_hex() const {
  const std::size_t digits = (width_ + 3) / 4;
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    const std::size_t pos = 4 * (digits - 1 - d);
    out[d] = kHexDigits[(words_[pos / 64] >> (pos % 64)) & 0xF];
  }
  return out;
}

bool CaState::none() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

bool CaState::all() const noexcept { return popcount() == width_; }

std::size_t CaState::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool CaState::parity_with(const CaState& mask) const noexcept {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < kWords; ++w) acc ^= words_[w] & mask.words_[w];
  return std::popcount(acc) & 1;
}

CaState& CaState::operator^=(const CaState& other) noexcept {
  for (std::size_t w = 0; w < kWords; ++w) words_[w] ^= other.words_[w];
  return *this;
}

CaState& CaState::operator&=(const CaState& other) noexcept {
  for (std::size_t w = 0; w < kWords; ++w) words_[w] &= other.words_[w];
  return *this;
}

CaState CaState::shifted_towards_end() const noexcept {
  // Cell i sits at packed position width-1-i, so moving to cell i+1 is a
  // logical right shift of the packed value.
  CaState out = *this;
  const std::size_t used = word_count(width_);
  for (std::size_t w = 0; w < used; ++w) {
    const std::uint64_t carry = (w + 1 < used) ? (words_[w + 1] << 63) : 0;
    out.words_[w] = (words_[w] >> 1) | carry;
  }
  return out;
}

CaState CaState::shifted_towards_start() const noexcept {
  CaState out = *this;
  const std::size_t used = word_count(width_);
  for (std::size_t w = used; w-- > 0;) {
    const std::uint64_t carry = (w > 0) ? (words_[w - 1] >> 63) : 0;
    out.words_[w] = (words_[w] << 1) | carry;
  }
  out.mask_tail();
  return out;
}

std::strong_ordering operator<=>(const CaState& a, const CaState& b) noexcept {
  if (auto c = a.width_ <=> b.width_; c != 0) return c;
  for (std::size_t w = CaState::kWords; w-- > 0;) {
    if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t CaState::hash() const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ width_;
  for (auto w : words_) {
    h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// DependencyString

DependencyString::DependencyString(std::vector<CellGene> cells) : cells_(std::move(cells)) {
  check_width(cells_.size());
}

DependencyString DependencyString::uniform(std::size_t width, CellGene gene) {
  check_width(width);
  return DependencyString(std::vector<CellGene>(width, gene));
}

DependencyString DependencyString::from_hex(std::string_view hex) {
  if (hex.empty() || hex.size() > kMaxWidth) {
    throw Error(Errc::WidthOutOfRange, "dependency string has " + std::to_string(hex.size()) +
                                           " cells; expected 1.." + std::to_string(kMaxWidth));
  }
  std::vector<CellGene> cells;
  cells.reserve(hex.size());
  for (char c : hex) {
    const int v = hex_value(c);
    if (v < 0) {
      throw Error(Errc::InvalidHex, "invalid hex digit '" + std::string(1, c) +
                                        "' in dependency string");
    }
    cells.push_back(CellGene::from_nibble(static_cast<std::uint8_t>(v)));
  }
  return DependencyString(std::move(cells));
}

bool DependencyString::bit(std::size_t b) const noexcept {
  const CellGene& g = cells_[b / 4];
  switch (b % 4) {
    case 0: return g.dep_left;
    case 1: return g.dep_self;
    case 2: return g.dep_right;
    default: return g.invert;
  }
}

void DependencyString::flip_bit(std::size_t b) {
  CellGene& g = cells_.at(b / 4);
  switch (b % 4) {
    case 0: g.dep_left = !g.dep_left; break;
    case 1: g.dep_self = !g.dep_self; break;
    case 2: g.dep_right = !g.dep_right; break;
    default: g.invert = !g.invert; break;
  }
}

std::string DependencyString::to_hex() const {
  std::string out;
  out.reserve(cells_.size());
  for (const auto& g : cells_) out.push_back(kHexDigits[g.nibble()]);
  return out;
}

// ---------------------------------------------------------------------------
// BitMatrix and GF(2) elimination

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows, CaState(cols)), cols_(cols) {}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

CaState BitMatrix::operator*(const CaState& v) const {
  check_same_width(cols_, v.width());
  CaState out(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (v.parity_with(rows_[r])) out.set(r, true);
  }
  return out;
}

BitMatrix BitMatrix::operator^(const BitMatrix& other) const {
  check_same_width(rows(), other.rows());
  check_same_width(cols_, other.cols_);
  BitMatrix out = *this;
  for (std::size_t r = 0; r < rows_.size(); ++r) out.rows_[r] ^= other.rows_[r];
  return out;
}

Gf2SolveResult gf2_solve_summary(const BitMatrix& a, const CaState& b) {
  check_same_width(a.rows(), b.width());
  std::vector<CaState> rows;
  std::vector<bool> rhs;
  rows.reserve(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    rows.push_back(a.row(r));
    rhs.push_back(b.get(r));
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < a.cols() && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot].get(c)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    std::vector<bool>::swap(rhs[pivot], rhs[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r].get(c)) {
        rows[r] ^= rows[rank];
        rhs[r] = rhs[r] != rhs[rank];
      }
    }
    ++rank;
  }
  Gf2SolveResult result{rank, true};
  for (std::size_t r = rank; r < rows.size(); ++r) {
    if (rhs[r]) result.consistent = false;
  }
  return result;
}

std::size_t gf2_rank(const BitMatrix& m) {
  if (m.rows() == 0) return 0;
  return gf2_solve_summary(m, CaState(m.rows())).rank;
}

// ---------------------------------------------------------------------------
// Transition

TransitionSpec build_transition(const DependencyString& dep) {
  const std::size_t n = dep.width();
  check_width(n);
  TransitionSpec spec;
  spec.genome_ = dep;
  spec.matrix_ = BitMatrix(n, n);
  spec.inversion_ = CaState(n);
  spec.left_ = spec.self_ = spec.right_ = CaState(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellGene& g = dep[i];
    if (g.dep_left && i > 0) {
      spec.matrix_.set(i, i - 1, true);
      spec.left_.set(i, true);
    }
    if (g.dep_self) {
      spec.matrix_.set(i, i, true);
      spec.self_.set(i, true);
    }
    if (g.dep_right && i + 1 < n) {
      spec.matrix_.set(i, i + 1, true);
      spec.right_.set(i, true);
    }
    spec.inversion_.set(i, g.invert);
  }
  return spec;
}

CaState step(const TransitionSpec& spec, const CaState& s) {
  check_same_width(spec.width(), s.width());
  CaState next = spec.left_mask() & s.shifted_towards_end();
  next ^= spec.self_mask() & s;
  next ^= spec.right_mask() & s.shifted_towards_start();
  next ^= spec.inversion();
  return next;
}

CaState step_matrix(const TransitionSpec& spec, const CaState& s) {
  check_same_width(spec.width(), s.width());
  return (spec.matrix() * s) ^ spec.inversion();
}

CaState step_local_rule(const TransitionSpec& spec, const CaState& s) {
  check_same_width(spec.width(), s.width());
  const std::size_t n = s.width();
  CaState next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CellGene& g = spec.genome()[i];
    const bool left = i > 0 && s.get(i - 1);
    const bool right = i + 1 < n && s.get(i + 1);
    bool v = g.invert;
    v ^= g.dep_left && left;
    v ^= g.dep_self && s.get(i);
    v ^= g.dep_right && right;
    next.set(i, v);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Attractors

AttractorResult evolve_to_attractor(const TransitionSpec& spec, const CaState& s,
                                    std::uint64_t max_steps) {
  check_same_width(spec.width(), s.width());
  if (max_steps == 0) {
    throw Error(Errc::InvalidConfig, "max_steps must be at least 1");
  }
  auto budget_error = [&] {
    return Error(Errc::StepBudgetExceeded,
                 "no attractor reached within " + std::to_string(max_steps) + " steps");
  };

  // Brent's loop finds the cycle after at most ~3(mu + lambda) hare steps.
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t hare_cap = max_steps > (kMax - 8) / 4 ? kMax : 4 * max_steps + 8;

  std::uint64_t power = 1;
  std::uint64_t lambda = 1;
  std::uint64_t hare_steps = 1;
  CaState tortoise = s;
  CaState hare = step(spec, s);
  while (!(tortoise == hare)) {
    if (power == lambda) {
      tortoise = hare;
      power *= 2;
      lambda = 0;
    }
    hare = step(spec, hare);
    ++lambda;
    if (++hare_steps > hare_cap) throw budget_error();
  }
  if (lambda > max_steps) throw budget_error();

  tortoise = s;
  hare = s;
  for (std::uint64_t i = 0; i < lambda; ++i) hare = step(spec, hare);
  std::uint64_t mu = 0;
  while (!(tortoise == hare)) {
    tortoise = step(spec, tortoise);
    hare = step(spec, hare);
    ++mu;
    if (mu + lambda > max_steps) throw budget_error();
  }

  AttractorResult result{tortoise, lambda, mu};
  CaState walker = tortoise;
  for (std::uint64_t i = 1; i < lambda; ++i) {
    walker = step(spec, walker);
    if (walker < result.attractor_id) result.attractor_id = walker;
  }
  return result;
}

BasinMap enumerate_basins(const TransitionSpec& spec) {
  const std::size_t n = spec.width();
  if (n > kMaxEnumerationWidth) {
    throw Error(Errc::WidthTooLargeForEnumeration,
                "width " + std::to_string(n) + " exceeds enumeration cap " +
                    std::to_string(kMaxEnumerationWidth));
  }
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<std::uint32_t> next(count);
  for (std::uint32_t v = 0; v < count; ++v) {
    next[v] = static_cast<std::uint32_t>(step(spec, CaState::from_index(n, v)).to_index());
  }

  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  constexpr std::uint32_t kOnPath = kUnseen - 1;
  std::vector<std::uint32_t> raw(count, kUnseen);
  std::vector<std::uint32_t> depth(count, 0);
  std::vector<std::uint32_t> cycle_min;
  std::vector<std::uint64_t> cycle_len;
  std::vector<std::uint32_t> path;

  for (std::uint32_t start = 0; start < count; ++start) {
    if (raw[start] != kUnseen) continue;
    path.clear();
    std::uint32_t v = start;
    while (raw[v] == kUnseen) {
      raw[v] = kOnPath;
      path.push_back(v);
      v = next[v];
    }
    std::size_t tail = path.size();
    if (raw[v] == kOnPath) {
      // New cycle: it starts where v first appears on the path.
      const std::size_t first = static_cast<std::size_t>(
          std::find(path.begin(), path.end(), v) - path.begin());
      const auto id = static_cast<std::uint32_t>(cycle_min.size());
      std::uint32_t smallest = v;
      for (std::size_t i = first; i < path.size(); ++i) {
        raw[path[i]] = id;
        depth[path[i]] = 0;
        smallest = std::min(smallest, path[i]);
      }
      cycle_min.push_back(smallest);
      cycle_len.push_back(path.size() - first);
      tail = first;
    }
    for (std::size_t i = tail; i-- > 0;) {
      const std::uint32_t u = path[i];
      raw[u] = raw[next[u]];
      depth[u] = depth[next[u]] + 1;
    }
  }

  std::vector<std::uint32_t> order(cycle_min.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return cycle_min[a] < cycle_min[b]; });
  std::vector<std::uint32_t> rank(order.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  BasinMap map;
  map.width = n;
  map.attractors.reserve(order.size());
  for (auto raw_id : order) {
    map.attractors.push_back({CaState::from_index(n, cycle_min[raw_id]), cycle_len[raw_id], 0});
  }
  map.basin_sizes.assign(order.size(), 0);
  map.max_transient.assign(order.size(), 0);
  map.assignment.resize(count);
  for (std::uint32_t v = 0; v < count; ++v) {
    const std::uint32_t a = rank[raw[v]];
    map.assignment[v] = a;
    ++map.basin_sizes[a];
    map.max_transient[a] = std::max(map.max_transient[a], depth[v]);
  }
  map.depth = std::move(depth);
  return map;
}

// ---------------------------------------------------------------------------
// Fixed points

std::uint64_t FixedPointCount::value() const {
  if (!exists) return 0;
  if (nullity >= 64) {
    throw Error(Errc::WidthOutOfRange,
                "fixed point count 2^" + std::to_string(nullity) + " does not fit in 64 bits");
  }
  return std::uint64_t{1} << nullity;
}

FixedPointCount affine_fixed_point_count(const TransitionSpec& spec) {
  const std::size_t n = spec.width();
  const BitMatrix shifted = spec.matrix() ^ BitMatrix::identity(n);
  const Gf2SolveResult solved = gf2_solve_summary(shifted, spec.inversion());
  return {solved.consistent, n - solved.rank};
}

FixedPointCount fixed_point_count(const TransitionSpec& spec) {
  if (!spec.is_linear()) {
    throw Error(Errc::NotLinear, "fixed_point_count requires an inversion-free rule");
  }
  return affine_fixed_point_count(spec);
}

// ---------------------------------------------------------------------------
// Dynamics

std::string_view dynamics_tag_name(DynamicsTag tag) noexcept {
  switch (tag) {
    case DynamicsTag::Homogeneous: return "HOMOGENEOUS";
    case DynamicsTag::Periodic: return "PERIODIC";
    case DynamicsTag::LongCycle: return "LONG_CYCLE";
  }
  return "LONG_CYCLE";
}

DynamicsSummary dynamics_summary(const BasinMap& basins) {
  DynamicsSummary out;
  out.attractor_count = basins.attractors.size();
  std::uint64_t longest = 0;
  for (const auto& a : basins.attractors) {
    ++out.cycle_length_histogram[a.cycle_length];
    longest = std::max(longest, a.cycle_length);
  }
  for (auto t : basins.max_transient) out.max_transient = std::max(out.max_transient, t);

  if (out.attractor_count == 1 && basins.attractors[0].cycle_length == 1 &&
      (basins.attractors[0].attractor_id.none() || basins.attractors[0].attractor_id.all())) {
    out.tag = DynamicsTag::Homogeneous;
  } else if (out.attractor_count > 1 && longest <= basins.width) {
    out.tag = DynamicsTag::Periodic;
  } else {
    out.tag = DynamicsTag::LongCycle;
  }
  return out;
}

DynamicsSummary dynamics_summary(const TransitionSpec& spec) {
  return dynamics_summary(enumerate_basins(spec));
}

}  // namespace hmaca
