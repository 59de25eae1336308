#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "hmaca/ca_engine.hpp"
#include "test_support.hpp"

using namespace hmaca;
using hmaca::testing::oracle_attractor;
using hmaca::testing::oracle_fixed_points;
using hmaca::testing::random_genome;
using hmaca::testing::random_state;

namespace {

const CellGene kRule90{true, false, true, false};
const CellGene kIdentity{false, true, false, false};
const CellGene kInvertOnly{false, false, false, true};

TransitionSpec rule90(std::size_t n) { return build_transition(DependencyString::uniform(n, kRule90)); }
TransitionSpec identity(std::size_t n) { return build_transition(DependencyString::uniform(n, kIdentity)); }
TransitionSpec invert_only(std::size_t n) { return build_transition(DependencyString::uniform(n, kInvertOnly)); }

std::vector<std::string> matrix_rows(const TransitionSpec& spec) {
  std::vector<std::string> rows;
  for (std::size_t r = 0; r < spec.matrix().rows(); ++r) rows.push_back(spec.matrix().row(r).to_bits());
  return rows;
}

CaState bits(const char* s) { return CaState::from_bits(s); }

}  // namespace

TEST_CASE("CaState packing and hex") {
  const CaState s = bits("00011011");
  CHECK(s.width() == 8);
  CHECK(s.to_index() == 0x1B);
  CHECK(s.to_hex() == "1B");
  CHECK(CaState::from_hex(8, "1B") == s);
  CHECK(CaState::from_index(3, 5).to_bits() == "101");
  CHECK(CaState::from_hex(3, "5").to_bits() == "101");
  CHECK_THROWS_AS(CaState::from_hex(3, "8"), Error);
  CHECK_THROWS_AS(CaState::from_hex(8, "1"), Error);
  CHECK_THROWS_AS(CaState(0), Error);
  CHECK_THROWS_AS(CaState(257), Error);

  Rng rng(11);
  for (std::size_t width : {1u, 5u, 63u, 64u, 65u, 130u, 256u}) {
    for (int i = 0; i < 50; ++i) {
      const CaState a = random_state(rng, width);
      const CaState b = random_state(rng, width);
      CHECK(CaState::from_hex(width, a.to_hex()) == a);
      CHECK(CaState::from_bits(a.to_bits()) == a);
      CHECK(((a < b) == (a.to_bits() < b.to_bits())));
    }
  }
}

TEST_CASE("DependencyString hex form") {
  const DependencyString d = DependencyString::from_hex("A4e1");
  CHECK(d.width() == 4);
  CHECK(d[0] == kRule90);
  CHECK(d[1] == kIdentity);
  CHECK(d[2] == CellGene{true, true, true, false});
  CHECK(d[3] == kInvertOnly);
  CHECK(d.to_hex() == "A4E1");
  CHECK_THROWS_AS(DependencyString::from_hex(""), Error);
  CHECK_THROWS_AS(DependencyString::from_hex("AG"), Error);
  CHECK_THROWS_AS(DependencyString::from_hex(std::string(257, '0')), Error);
  CHECK_NOTHROW(DependencyString::from_hex(std::string(256, '0')));
}

TEST_CASE("build_transition") {
  SUBCASE("rule 90, n=3") {
    const auto spec = rule90(3);
    CHECK(matrix_rows(spec) == std::vector<std::string>{"010", "101", "010"});
    CHECK(spec.inversion().to_bits() == "000");
  }
  SUBCASE("identity") {
    const auto spec = identity(3);
    CHECK(spec.matrix() == BitMatrix::identity(3));
    CHECK(spec.inversion().none());
  }
  SUBCASE("invert only") {
    const auto spec = invert_only(2);
    CHECK(matrix_rows(spec) == std::vector<std::string>{"00", "00"});
    CHECK(spec.inversion().to_bits() == "11");
  }
  SUBCASE("width limits") {
    CHECK_THROWS_AS(DependencyString(std::vector<CellGene>{}), Error);
    try {
      DependencyString(std::vector<CellGene>(257));
      FAIL("expected WidthOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::WidthOutOfRange);
    }
  }
  SUBCASE("tridiagonal with null boundary") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
      const std::size_t n = 1 + rng() % 40;
      const auto dep = random_genome(rng, n);
      const auto spec = build_transition(dep);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          bool expected = false;
          if (c + 1 == r) expected = dep[r].dep_left;
          if (c == r) expected = dep[r].dep_self;
          if (c == r + 1) expected = dep[r].dep_right;
          CHECK(spec.matrix()(r, c) == expected);
        }
        CHECK(spec.inversion().get(r) == dep[r].invert);
      }
    }
  }
}

TEST_CASE("step examples") {
  CHECK(step(rule90(3), bits("010")).to_bits() == "101");
  CHECK(step(rule90(3), bits("111")).to_bits() == "101");
  CHECK(step(rule90(3), bits("000")).none());
  CHECK(step(identity(5), bits("10110")) == bits("10110"));
  CHECK(step(invert_only(2), bits("00")).to_bits() == "11");
  try {
    step(rule90(3), bits("0101"));
    FAIL("expected WidthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WidthMismatch);
  }
}

TEST_CASE("three step paths agree") {
  Rng rng(2024);
  for (std::size_t width : {1u, 2u, 3u, 8u, 17u, 63u, 64u, 65u, 127u, 128u, 200u, 256u}) {
    for (int i = 0; i < 100; ++i) {
      const auto spec = build_transition(random_genome(rng, width));
      const CaState s = random_state(rng, width);
      const CaState expected = step_local_rule(spec, s);
      REQUIRE(step_matrix(spec, s) == expected);
      REQUIRE(step(spec, s) == expected);
    }
  }
}

TEST_CASE("linear rules are additive") {
  Rng rng(77);
  for (std::size_t width : {3u, 16u, 64u, 100u}) {
    for (int i = 0; i < 50; ++i) {
      const auto spec = build_transition(random_genome(rng, width, false));
      const CaState a = random_state(rng, width);
      const CaState b = random_state(rng, width);
      CHECK(step(spec, a ^ b) == (step(spec, a) ^ step(spec, b)));
    }
  }
}

TEST_CASE("evolve_to_attractor examples") {
  const AttractorResult id = evolve_to_attractor(identity(4), bits("1001"));
  CHECK(id.attractor_id == bits("1001"));
  CHECK(id.cycle_length == 1);
  CHECK(id.transient_depth == 0);

  const AttractorResult r90 = evolve_to_attractor(rule90(3), bits("111"));
  CHECK(r90.attractor_id.to_bits() == "000");
  CHECK(r90.cycle_length == 1);
  CHECK(r90.transient_depth == 2);

  const AttractorResult inv = evolve_to_attractor(invert_only(2), bits("00"));
  CHECK(inv.attractor_id.to_bits() == "11");
  CHECK(inv.cycle_length == 1);
  CHECK(inv.transient_depth == 1);

  // Self-dependent inverting cell flips every step: a 2-cycle.
  const auto toggler = build_transition(DependencyString::from_hex("5"));
  const AttractorResult two = evolve_to_attractor(toggler, bits("1"));
  CHECK(two.attractor_id.to_bits() == "0");
  CHECK(two.cycle_length == 2);
  CHECK(two.transient_depth == 0);
}

TEST_CASE("step budget") {
  // 001 -> 010 -> 101 -> 000 -> 000: first repeat at step 4.
  CHECK_NOTHROW(evolve_to_attractor(rule90(3), bits("001"), 4));
  try {
    evolve_to_attractor(rule90(3), bits("001"), 3);
    FAIL("expected StepBudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StepBudgetExceeded);
  }
  // A budget of 2^n always suffices.
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng() % 10;
    const auto spec = build_transition(random_genome(rng, n));
    CHECK_NOTHROW(evolve_to_attractor(spec, random_state(rng, n), std::uint64_t{1} << n));
  }
}

TEST_CASE("Brent detection matches the visited-set oracle") {
  Rng rng(99);
  for (int i = 0; i < 400; ++i) {
    const std::size_t n = 1 + rng() % 24;
    const auto spec = build_transition(random_genome(rng, n));
    const CaState s = random_state(rng, n);
    const AttractorResult expected = oracle_attractor(spec, s);
    const AttractorResult got = evolve_to_attractor(spec, s, std::uint64_t{1} << n);
    REQUIRE(got == expected);
    // Exactly transient + cycle steps are needed to observe the repeat.
    const std::uint64_t needed = expected.transient_depth + expected.cycle_length;
    CHECK_NOTHROW(evolve_to_attractor(spec, s, needed));
    if (needed > 1) CHECK_THROWS_AS(evolve_to_attractor(spec, s, needed - 1), Error);
  }
}

TEST_CASE("enumerate_basins examples") {
  const BasinMap id = enumerate_basins(identity(3));
  CHECK(id.attractors.size() == 8);
  CHECK(std::all_of(id.basin_sizes.begin(), id.basin_sizes.end(), [](auto s) { return s == 1; }));
  for (std::uint32_t v = 0; v < 8; ++v) CHECK(id.attractors[v].attractor_id.to_index() == v);

  const BasinMap r90 = enumerate_basins(rule90(3));
  REQUIRE(r90.attractors.size() == 1);
  CHECK(r90.attractors[0].attractor_id.to_bits() == "000");
  CHECK(r90.basin_sizes[0] == 8);

  const BasinMap inv = enumerate_basins(invert_only(2));
  REQUIRE(inv.attractors.size() == 1);
  CHECK(inv.attractors[0].attractor_id.to_bits() == "11");
  CHECK(inv.basin_sizes[0] == 4);

  try {
    enumerate_basins(identity(21));
    FAIL("expected WidthTooLargeForEnumeration");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::WidthTooLargeForEnumeration);
  }
}

TEST_CASE("basin enumeration is a partition consistent with trajectories") {
  Rng rng(123);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const auto spec = build_transition(random_genome(rng, n));
    const BasinMap map = enumerate_basins(spec);
    const std::uint64_t states = std::uint64_t{1} << n;
    REQUIRE(map.assignment.size() == states);
    std::uint64_t total = 0;
    for (auto s : map.basin_sizes) total += s;
    CHECK(total == states);
    CHECK(std::is_sorted(map.attractors.begin(), map.attractors.end(),
                         [](const auto& a, const auto& b) { return a.attractor_id < b.attractor_id; }));
    for (std::uint64_t v = 0; v < states; ++v) {
      const CaState s = CaState::from_index(n, v);
      const AttractorResult r = oracle_attractor(spec, s);
      const AttractorResult& a = map.attractors[map.assignment[v]];
      REQUIRE(a.attractor_id == r.attractor_id);
      CHECK(a.cycle_length == r.cycle_length);
      CHECK(map.depth[v] == r.transient_depth);
    }
  }
}

TEST_CASE("fixed_point_count") {
  CHECK(fixed_point_count(identity(5)).value() == 32);
  CHECK(fixed_point_count(rule90(3)).value() == 1);
  CHECK(fixed_point_count(rule90(3)).nullity == 0);
  CHECK(fixed_point_count(build_transition(DependencyString::uniform(4, CellGene{}))).value() == 1);
  try {
    fixed_point_count(invert_only(2));
    FAIL("expected NotLinear");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotLinear);
  }
  // Affine extension: constant map to 11 has exactly one fixed point.
  CHECK(affine_fixed_point_count(invert_only(2)).value() == 1);
  // Identity plus inversion toggles every cell: no fixed point.
  const auto toggle = build_transition(DependencyString::uniform(3, CellGene{false, true, false, true}));
  CHECK_FALSE(affine_fixed_point_count(toggle).exists);
  CHECK(affine_fixed_point_count(toggle).value() == 0);
  CHECK(fixed_point_count(identity(200)).nullity == 200);
  CHECK_THROWS_AS(fixed_point_count(identity(200)).value(), Error);
}

TEST_CASE("rank and affine fixed-point counts agree with brute force") {
  Rng rng(8);
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 1 + rng() % 12;
    const bool linear = i % 2 == 0;
    const auto spec = build_transition(random_genome(rng, n, !linear));
    const std::uint64_t brute = oracle_fixed_points(spec);
    CHECK(affine_fixed_point_count(spec).value() == brute);
    if (spec.is_linear()) CHECK(fixed_point_count(spec).value() == brute);
  }
}

TEST_CASE("gf2_rank") {
  BitMatrix m(3, 3);
  m.set(0, 0, true); m.set(0, 1, true);
  m.set(1, 0, true); m.set(1, 1, true); m.set(1, 2, true);
  m.set(2, 1, true); m.set(2, 2, true);
  CHECK(gf2_rank(m) == 3);  // rows 110, 111, 011
  m.set(1, 2, false);       // rows 110, 110, 011
  CHECK(gf2_rank(m) == 2);
  CHECK(gf2_rank(BitMatrix(4, 4)) == 0);
  CHECK(gf2_rank(BitMatrix::identity(70)) == 70);
}

TEST_CASE("dynamics_summary") {
  const auto r90 = dynamics_summary(rule90(3));
  CHECK(r90.tag == DynamicsTag::Homogeneous);
  CHECK(r90.attractor_count == 1);
  CHECK(r90.max_transient == 3);

  const auto id = dynamics_summary(identity(3));
  CHECK(id.tag == DynamicsTag::Periodic);
  CHECK(id.cycle_length_histogram.at(1) == 8);
  CHECK(id.max_transient == 0);

  CHECK(dynamics_summary(invert_only(2)).tag == DynamicsTag::Homogeneous);
  CHECK(dynamics_tag_name(DynamicsTag::LongCycle) == "LONG_CYCLE");

  // A single non-uniform fixed point is neither homogeneous nor multi-basin.
  const auto mixed = build_transition(DependencyString::from_hex("10"));
  CHECK(dynamics_summary(mixed).attractor_count == 1);
  CHECK(dynamics_summary(mixed).tag == DynamicsTag::LongCycle);
}

TEST_CASE("results are deterministic") {
  Rng rng(31);
  const auto spec = build_transition(random_genome(rng, 14));
  const BasinMap a = enumerate_basins(spec);
  const BasinMap b = enumerate_basins(spec);
  CHECK(a.assignment == b.assignment);
  CHECK(a.attractors == b.attractors);
}
