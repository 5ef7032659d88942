#pragma once

// A quick, seeded end-to-end property suite runnable from the command line:
// dimensions, golden monomials, structure-constant soundness, nilpotency,
// series coefficients, invariant-field consistency, low-step embedding
// solves, span tables, the step-9 certificate, and randomized predicate
// agreement. Each check reports one named pass/fail line; the deeper and
// exhaustive variants live in the test suites.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "carnot/embed.hpp"
#include "carnot/random.hpp"
#include "carnot/realize.hpp"
#include "carnot/stratified.hpp"

namespace carnot {

struct SelfTestReport {
  unsigned long long seed = 0;
  std::vector<std::pair<std::string, bool>> checks;

  bool ok() const {
    for (const auto& [name, passed] : checks)
      if (!passed) return false;
    return true;
  }
};

namespace detail {

inline bool jacobi_holds(const StructureConstants& sc) {
  auto unit = [&](int k) {
    std::vector<Rat> v(static_cast<std::size_t>(sc.dim), Rat(0));
    v[static_cast<std::size_t>(k) - 1] = Rat(1);
    return v;
  };
  for (int a = 1; a <= sc.dim; ++a)
    for (int b = a + 1; b <= sc.dim; ++b)
      for (int c = b + 1; c <= sc.dim; ++c) {
        std::vector<Rat> total(static_cast<std::size_t>(sc.dim), Rat(0));
        auto acc = [&](int i, int j, int k) {
          auto inner = sc.bracket_vectors(unit(j), unit(k));
          auto outer = sc.bracket_vectors(unit(i), inner);
          for (std::size_t t = 0; t < total.size(); ++t) total[t] += outer[t];
        };
        acc(a, b, c);
        acc(b, c, a);
        acc(c, a, b);
        for (const Rat& v : total)
          if (v != 0) return false;
      }
  return true;
}

}  // namespace detail

inline SelfTestReport run_selftest(unsigned long long seed = 20240816ULL) {
  SelfTestReport report;
  report.seed = seed;
  auto check = [&](const std::string& name, const std::function<bool()>& body) {
    bool passed = false;
    try {
      passed = body();
    } catch (const std::exception&) {
      passed = false;
    }
    report.checks.emplace_back(name, passed);
  };

  check("hall dimensions", [] {
    HallBasis b = generate_hall_basis(6);
    const int expected[] = {2, 1, 2, 3, 6, 9};
    for (int h = 1; h <= 6; ++h) {
      auto [lo, hi] = b.height_range(h);
      if (hi - lo + 1 != expected[h - 1]) return false;
    }
    return b.dimension() == 23;
  });

  check("golden monomials", [] {
    HallBasis b = generate_hall_basis(6);
    auto is = [&](std::vector<int> vec, std::vector<std::pair<int, int>> exps, Rat c) {
      int j = b.index_of_vector(vec);
      if (j == 0) return false;
      Monomial m;
      for (auto [v, e] : exps) m = m.times(Monomial::var(v, e));
      return *b.at(j).monomial == Poly::monomial(b.ring, m, c);
    };
    return is({2, 1}, {{1, 1}}, make_rat(-1)) && is({2, 1, 1}, {{1, 2}}, make_rat(1, 2)) &&
           is({2, 1, 2}, {{1, 1}, {2, 1}}, make_rat(1)) &&
           is({2, 1, 2, 2}, {{1, 1}, {2, 2}}, make_rat(-1, 2)) &&
           is({2, 1, 2, 4}, {{1, 1}, {2, 1}, {4, 1}}, make_rat(-1));
  });

  check("structure constants", [] {
    StructureConstants sc = structure_constants(realize(4));
    for (const auto& [ij, terms] : sc.table)
      for (const auto& [k, c] : terms) {
        if (rat_den(c) != 1) return false;
        if (sc.stratum_of[static_cast<std::size_t>(k) - 1] !=
            sc.stratum_of[static_cast<std::size_t>(ij.first) - 1] +
                sc.stratum_of[static_cast<std::size_t>(ij.second) - 1])
          return false;
      }
    return detail::jacobi_holds(sc);
  });

  check("nilpotency", [] {
    FreeRealization real = realize(3);
    std::vector<VField> gens{real.field(1), real.field(2)};
    for (int mask = 0; mask < (1 << 4); ++mask) {
      std::vector<int> word;
      for (int t = 0; t < 4; ++t) word.push_back((mask >> t & 1) + 1);
      if (!bracket_word(gens, word).is_zero()) return false;
    }
    return true;
  });

  check("series coefficients", [] {
    SeriesCoeffs c = bch_coefficients(7);
    if (c.values[0] != 1 || c.values[1] != make_rat(1, 2) || c.values[2] != make_rat(1, 12) ||
        c.values[3] != 0 || c.values[4] != make_rat(-1, 720))
      return false;
    for (int k = 0; k <= 7; ++k) {
      Rat sum(0);
      Rat sign(1);
      Int fact = 1;
      for (int i = 0; i <= k; ++i) {
        sum += sign / Rat(fact) * c.values[static_cast<std::size_t>(k - i)];
        sign = -sign;
        fact *= i + 2;
      }
      if (sum != (k == 0 ? Rat(1) : Rat(0))) return false;
    }
    return true;
  });

  check("invariant field consistency", [] {
    for (const StratifiedAlgebra& alg : {heisenberg(1), free_nilpotent(3)}) {
      std::vector<VField> fields = left_invariant_fields(alg);
      std::vector<int> all(static_cast<std::size_t>(alg.dim()));
      for (int k = 1; k <= alg.dim(); ++k) all[static_cast<std::size_t>(k) - 1] = k;
      for (int i = 1; i <= alg.dim(); ++i)
        for (int j = i + 1; j <= alg.dim(); ++j) {
          VField br = vf_bracket(fields[static_cast<std::size_t>(i) - 1],
                                 fields[static_cast<std::size_t>(j) - 1]);
          auto coords = expand_in_fields(fields, all, br);
          if (!coords) return false;
          std::vector<Rat> expected(static_cast<std::size_t>(alg.dim()), Rat(0));
          for (const auto& [k, c] : alg.constants.bracket(i, j))
            expected[static_cast<std::size_t>(k) - 1] = c;
          if (*coords != expected) return false;
        }
    }
    return true;
  });

  check("embedding at low steps", [] {
    for (int s = 2; s <= 4; ++s) {
      EmbeddingSolution sol = solve_embedding(s, Ansatz::Restricted);
      if (!sol.all_feasible() || !verify_solution(sol).ok()) return false;
      for (const EmbedEntry& e : sol.entries)
        for (const auto& [m, c] : e.r.terms())
          if (m.total_degree() != 1) return false;
    }
    return true;
  });

  check("span tables", [] {
    HallBasis b = generate_hall_basis(6);
    lemma42_table(b);  // throws on any span violation
    auto t43 = lemma43_table(b);
    int specials = 0;
    int special_index = 0;
    for (const auto& [j, e] : t43)
      if (e.special) {
        ++specials;
        special_index = j;
      }
    return specials == 1 && b.at(special_index).vec == std::vector<int>{2, 1, 2, 4};
  });

  check("step nine certificate", [] {
    Step9Certificate cert = step9_certificate();
    return cert.ok() && cert.square_coefficient == make_rat(1, 2);
  });

  check("conformal iff cr or anti-cr", [seed] {
    Rng rng(seed);
    struct Case {
      int d1;       // first-stratum dimension
      bool heis;    // Heisenberg similitude blocks vs free two-generator blocks
    };
    for (Case cs : {Case{2, false}, Case{2, true}, Case{4, true}, Case{6, true}}) {
      int m = cs.d1 / 2;
      RatMatrix J = standard_J(m);
      RatMatrix gram = RatMatrix::identity(cs.d1);
      for (int t = 0; t < 25; ++t) {
        RatMatrix T1 = cs.heis ? random_similitude(rng, m) : random_invertible(rng, cs.d1);
        if (t % 3 == 1) T1 = random_conformal_block(rng, m, false);
        if (t % 3 == 2) T1 = random_conformal_block(rng, m, true);
        bool conf = is_conformal(T1, gram).conformal;
        bool crish = is_cr(T1, J) || is_anti_cr(T1, J);
        if (conf != crish) return false;
      }
    }
    return true;
  });

  check("ac-structure agreement", [seed] {
    Rng rng(seed + 1);
    for (const StratifiedAlgebra& alg : {free_nilpotent(3), heisenberg(1), heisenberg(2)}) {
      int d1 = alg.strata_dims[0];
      int m = d1 / 2;
      int valid_seen = 0;
      int invalid_seen = 0;
      for (int t = 0; t < 15; ++t) {
        RatMatrix J = t == 0 ? RatMatrix::identity(d1)  // never squares to -Id
                     : t % 2 == 0
                         ? (d1 == 2 ? random_valid_J_two_generator(rng)
                                    : random_valid_J_heisenberg(rng, m))
                         : random_matrix(rng, d1, d1);
        bool direct = check_ac_structure(alg, J);
        if (direct != check_ac_structure_complexified(alg, J)) return false;
        (direct ? valid_seen : invalid_seen) += 1;
      }
      if (valid_seen == 0 || invalid_seen == 0) return false;
    }
    return true;
  });

  check("product permutation algebra", [seed] {
    Rng rng(seed + 2);
    DirectSum ds = direct_sum({heisenberg(1), heisenberg(1)});
    std::vector<int> classes{0, 0};
    std::vector<RatMatrix> isos{RatMatrix::identity(3), RatMatrix::identity(3)};
    RatMatrix swap = perm_automorphism(ds, {1, 0}, classes, isos);
    if (!is_strata_automorphism(ds.sum, swap)) return false;
    for (int t = 0; t < 5; ++t) {
      ProductDecomposition dec;
      dec.sigma = {1, 0};
      dec.blocks.clear();
      for (int f = 0; f < 2; ++f)
        dec.blocks.push_back(extend_heisenberg_similitude(random_invertible(rng, 2)));
      RatMatrix T = assemble_product_automorphism(ds, dec);
      auto rec = decompose_product_automorphism(ds, T);
      if (!rec || rec->sigma != dec.sigma) return false;
      for (int f = 0; f < 2; ++f)
        if (rec->blocks[static_cast<std::size_t>(f)] != dec.blocks[static_cast<std::size_t>(f)])
          return false;
      if (assemble_product_automorphism(ds, *rec) != T) return false;
    }
    return true;
  });

  return report;
}

}  // namespace carnot
