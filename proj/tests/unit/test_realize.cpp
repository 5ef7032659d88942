// Vector-field realization and structure constants: pinned low-step fields
// and bracket tables, nilpotency of deep bracket words, exact Jacobi and
// grading checks, the series-coefficient recurrence, and the round trip from
// structure constants back through left-invariant fields.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <vector>

#include "carnot/realize.hpp"

using namespace carnot;

namespace {

StructureConstants heisenberg1() {
  StructureConstants sc;
  sc.dim = 3;
  sc.stratum_of = {1, 1, 2};
  sc.table[{1, 2}] = {{3, Rat(1)}};
  return sc;
}

std::vector<Rat> unit_vec(int n, int k) {
  std::vector<Rat> v(static_cast<std::size_t>(n), Rat(0));
  v[static_cast<std::size_t>(k) - 1] = Rat(1);
  return v;
}

bool jacobi_triple(const StructureConstants& sc, int i, int j, int k) {
  auto lhs = sc.bracket_vectors(sc.bracket_vectors(unit_vec(sc.dim, i), unit_vec(sc.dim, j)),
                                unit_vec(sc.dim, k));
  auto mid = sc.bracket_vectors(sc.bracket_vectors(unit_vec(sc.dim, j), unit_vec(sc.dim, k)),
                                unit_vec(sc.dim, i));
  auto rhs = sc.bracket_vectors(sc.bracket_vectors(unit_vec(sc.dim, k), unit_vec(sc.dim, i)),
                                unit_vec(sc.dim, j));
  for (int t = 0; t < sc.dim; ++t) {
    if (lhs[static_cast<std::size_t>(t)] + mid[static_cast<std::size_t>(t)] +
            rhs[static_cast<std::size_t>(t)] !=
        0)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("step-1 realization is abelian coordinates", "[realize]") {
  FreeRealization real = realize(1);
  REQUIRE(real.fields.size() == 2);
  REQUIRE(real.field(1) == VField::partial_op(real.basis.ring, 1));
  REQUIRE(real.field(2) == VField::partial_op(real.basis.ring, 2));
}

TEST_CASE("step-2 realization and bracket table", "[realize]") {
  FreeRealization real = realize(2);
  const PolyRingPtr& R = real.basis.ring;

  VField x2 = VField::partial_op(R, 2);
  x2.set_coeff(3, make_rat(-1) * Poly::variable(R, 1));
  REQUIRE(real.field(2) == x2);
  REQUIRE(real.field(3) == VField::partial_op(R, 3));

  StructureConstants sc = structure_constants(real);
  REQUIRE(sc.dim == 3);
  REQUIRE(sc.stratum_of == std::vector<int>{1, 1, 2});
  REQUIRE(sc.strata_dims() == std::vector<int>{2, 1});
  REQUIRE(sc.step() == 2);
  REQUIRE(sc.table.size() == 1);
  REQUIRE(sc.table.at({1, 2}) == std::vector<std::pair<int, Rat>>{{3, make_rat(-1)}});

  // antisymmetry through the accessor, diagonal trivially zero
  REQUIRE(sc.bracket(2, 1) == std::vector<std::pair<int, Rat>>{{3, Rat(1)}});
  for (int i = 1; i <= 3; ++i) REQUIRE(sc.bracket(i, i).empty());
}

TEST_CASE("step-3 realization and bracket table", "[realize]") {
  FreeRealization real = realize(3);
  const PolyRingPtr& R = real.basis.ring;
  Poly x1 = Poly::variable(R, 1);
  Poly x2v = Poly::variable(R, 2);

  VField expect2 = VField::partial_op(R, 2);
  expect2.set_coeff(3, make_rat(-1) * x1);
  expect2.set_coeff(4, make_rat(1, 2) * x1 * x1);
  expect2.set_coeff(5, x1 * x2v);
  REQUIRE(real.field(2) == expect2);

  VField expect3 = VField::partial_op(R, 3);
  expect3.set_coeff(4, make_rat(-1) * x1);
  expect3.set_coeff(5, make_rat(-1) * x2v);
  REQUIRE(real.field(3) == expect3);

  REQUIRE(real.field(4) == VField::partial_op(R, 4));
  REQUIRE(real.field(5) == VField::partial_op(R, 5));

  StructureConstants sc = structure_constants(real);
  std::map<std::pair<int, int>, std::vector<std::pair<int, Rat>>> expect_table{
      {{1, 2}, {{3, make_rat(-1)}}},
      {{1, 3}, {{4, make_rat(-1)}}},
      {{2, 3}, {{5, make_rat(-1)}}},
  };
  REQUIRE(sc.table == expect_table);
}

TEST_CASE("series coefficients", "[realize]") {
  SeriesCoeffs series = bch_coefficients(8);
  REQUIRE(series.values.size() == 9);
  REQUIRE(series.values[0] == Rat(1));
  REQUIRE(series.values[1] == make_rat(1, 2));
  REQUIRE(series.values[2] == make_rat(1, 12));
  REQUIRE(series.values[3] == Rat(0));
  REQUIRE(series.values[4] == make_rat(-1, 720));

  // defining identity: sum_{i+j=k} ((-1)^i/(i+1)!) c_j = [k = 0]
  for (int k = 0; k <= 8; ++k) {
    Rat acc(0);
    for (int i = 0; i <= k; ++i)
      acc += make_rat(Int(i % 2 == 0 ? 1 : -1), factorial(i + 1)) *
             series.values[static_cast<std::size_t>(k - i)];
    REQUIRE(acc == (k == 0 ? Rat(1) : Rat(0)));
  }

  REQUIRE_THROWS_AS(bch_coefficients(-1), std::invalid_argument);
}

TEST_CASE("nilpotency of bracket words", "[realize]") {
  for (int step = 1; step <= 4; ++step) {
    FreeRealization real = realize(step);
    std::vector<VField> gens = {real.field(1), real.field(2)};
    // exhaustive over all words of length step + 1
    int len = step + 1;
    for (int bits = 0; bits < (1 << len); ++bits) {
      std::vector<int> word;
      for (int t = 0; t < len; ++t) word.push_back(((bits >> t) & 1) + 1);
      REQUIRE(bracket_word(gens, word).is_zero());
    }
    // and words of length step need not vanish: the left-normed chain
    // [[X_2, X_1], X_1, ...] is a Hall basis element
    if (step >= 2) {
      std::vector<int> chain = {2, 1};
      for (int t = 2; t < step; ++t) chain.push_back(1);
      REQUIRE_FALSE(bracket_word(gens, chain).is_zero());
    }
  }
}

TEST_CASE("deeper nilpotency from generator fields alone", "[realize]") {
  HallBasis basis = generate_hall_basis(7);
  auto [x1, x2] = generator_fields(basis);
  std::vector<VField> gens = {x1, x2};
  std::mt19937_64 rng(20240816);
  std::uniform_int_distribution<int> coin(1, 2);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<int> word;
    for (int t = 0; t < 8; ++t) word.push_back(coin(rng));
    REQUIRE(bracket_word(gens, word).is_zero());
  }
}

TEST_CASE("structure constants are integral, graded, and Jacobi", "[realize]") {
  for (int step : {4, 5}) {
    StructureConstants sc = structure_constants(realize(step));
    for (const auto& [key, terms] : sc.table) {
      auto [i, j] = key;
      for (const auto& [k, c] : terms) {
        REQUIRE(rat_den(c) == 1);
        REQUIRE(sc.stratum_of[static_cast<std::size_t>(k) - 1] ==
                sc.stratum_of[static_cast<std::size_t>(i) - 1] +
                    sc.stratum_of[static_cast<std::size_t>(j) - 1]);
      }
    }
    for (int i = 1; i <= sc.dim; ++i)
      for (int j = i + 1; j <= sc.dim; ++j)
        for (int k = j + 1; k <= sc.dim; ++k) REQUIRE(jacobi_triple(sc, i, j, k));
  }
}

TEST_CASE("first stratum generates each deeper stratum", "[realize]") {
  StructureConstants sc = structure_constants(realize(4));
  // [g_{-h}, g_{-1}] spans g_{-h-1}: every basis vector of height h+1 shows
  // up in some bracket of a height-h vector with a generator
  for (int h = 1; h < 4; ++h) {
    std::vector<bool> hit(static_cast<std::size_t>(sc.dim) + 1, false);
    for (int i = 1; i <= sc.dim; ++i) {
      if (sc.stratum_of[static_cast<std::size_t>(i) - 1] != h) continue;
      for (int g = 1; g <= 2; ++g)
        for (const auto& [k, c] : sc.bracket(i, g))
          if (c != 0) hit[static_cast<std::size_t>(k)] = true;
    }
    for (int k = 1; k <= sc.dim; ++k)
      if (sc.stratum_of[static_cast<std::size_t>(k) - 1] == h + 1)
        REQUIRE(hit[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("left-invariant fields of the first Heisenberg algebra", "[realize]") {
  StructureConstants sc = heisenberg1();
  std::vector<VField> fields = left_invariant_fields(sc);
  REQUIRE(fields.size() == 3);
  const PolyRingPtr& R = fields[0].ring();

  VField xf = VField::partial_op(R, 1);
  xf.set_coeff(3, make_rat(-1, 2) * Poly::variable(R, 2));
  VField yf = VField::partial_op(R, 2);
  yf.set_coeff(3, make_rat(1, 2) * Poly::variable(R, 1));
  REQUIRE(fields[0] == xf);
  REQUIRE(fields[1] == yf);
  REQUIRE(fields[2] == VField::partial_op(R, 3));

  REQUIRE(vf_bracket(fields[0], fields[1]) == fields[2]);
}

TEST_CASE("left-invariant fields of an abelian algebra", "[realize]") {
  StructureConstants sc;
  sc.dim = 3;
  sc.stratum_of = {1, 1, 1};
  std::vector<VField> fields = left_invariant_fields(sc);
  for (int j = 1; j <= 3; ++j)
    REQUIRE(fields[static_cast<std::size_t>(j) - 1] ==
            VField::partial_op(fields[0].ring(), j));
}

TEST_CASE("left-invariant fields reproduce their structure constants", "[realize]") {
  for (int step = 1; step <= 3; ++step) {
    StructureConstants sc = structure_constants(realize(step));
    std::vector<VField> fields = left_invariant_fields(sc);
    std::vector<int> all;
    for (int k = 1; k <= sc.dim; ++k) all.push_back(k);
    for (int i = 1; i <= sc.dim; ++i) {
      for (int j = i + 1; j <= sc.dim; ++j) {
        VField w = vf_bracket(fields[static_cast<std::size_t>(i) - 1],
                              fields[static_cast<std::size_t>(j) - 1]);
        auto coords = expand_in_fields(fields, all, w);
        REQUIRE(coords.has_value());
        std::vector<Rat> expect(static_cast<std::size_t>(sc.dim), Rat(0));
        for (const auto& [k, c] : sc.bracket(i, j)) expect[static_cast<std::size_t>(k) - 1] = c;
        REQUIRE(*coords == expect);
      }
    }
  }
}

TEST_CASE("expansion failure surfaces as an exception", "[realize]") {
  // a field outside the span of the candidates must not expand
  FreeRealization real = realize(2);
  VField stray(real.basis.ring);
  stray.set_coeff(1, Poly::variable(real.basis.ring, 2));
  auto coords = expand_in_fields(real.fields, {3}, stray);
  REQUIRE_FALSE(coords.has_value());

  // dependent candidate family is rejected loudly
  std::vector<VField> twice = {real.field(3), real.field(3)};
  REQUIRE_THROWS_AS(expand_in_fields(twice, {1, 2}, real.field(3)), ExpansionFailure);
}
