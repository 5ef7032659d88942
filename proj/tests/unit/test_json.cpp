// Wire-format round trips: every serializer reproduces its object through
// the matching parser, emission is byte-deterministic, and malformed input
// is rejected with std::invalid_argument rather than accepted or crashing.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "carnot/json.hpp"

using namespace carnot;

TEST_CASE("rational strings", "[json]") {
  REQUIRE(rat_to_json(make_rat(3)) == Json("3"));
  REQUIRE(rat_to_json(make_rat(-7, 2)) == Json("-7/2"));
  REQUIRE(rat_from_json(Json("3")) == make_rat(3));
  REQUIRE(rat_from_json(Json("-7/2")) == make_rat(-7, 2));
  REQUIRE(rat_from_json(Json("6/4")) == make_rat(3, 2));

  REQUIRE_THROWS_AS(rat_from_json(Json("1/0")), std::invalid_argument);
  REQUIRE_THROWS_AS(rat_from_json(Json("seven")), std::invalid_argument);
  REQUIRE_THROWS_AS(rat_from_json(Json("1/2/3")), std::invalid_argument);
  REQUIRE_THROWS_AS(rat_from_json(Json(7)), std::invalid_argument);
}

TEST_CASE("matrix round trip", "[json]") {
  RatMatrix M(2, 3);
  M(0, 0) = make_rat(1, 2);
  M(0, 2) = make_rat(-4);
  M(1, 1) = make_rat(7, 3);
  Json j = matrix_to_json(M);
  REQUIRE(matrix_from_json(j) == M);
  REQUIRE(matrix_to_json(matrix_from_json(j)).dump(2) == j.dump(2));

  REQUIRE_THROWS_AS(matrix_from_json(Json::array()), std::invalid_argument);
  REQUIRE_THROWS_AS(matrix_from_json(Json::parse("[[\"1\"],[\"1\",\"2\"]]")),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(matrix_from_json(Json::parse("[[1]]")), std::invalid_argument);
}

TEST_CASE("polynomial round trip", "[json]") {
  HallBasis basis = generate_hall_basis(4);
  Poly p = *basis.at(6).monomial + make_rat(5, 3) * Poly::variable(basis.ring, 7);
  Json j = poly_to_json(p);
  REQUIRE(poly_from_json(j) == p);
  REQUIRE(poly_from_json(j, basis.ring) == p);

  // Terms are emitted in the canonical order used by the polynomial itself.
  std::vector<Json> dumped;
  for (const Json& t : j.at("terms")) dumped.push_back(t.at("exps"));
  std::vector<Json> expected;
  for (const auto& [m, c] : p.terms()) expected.push_back(Json(m.to_dense(p.nvars())));
  REQUIRE(dumped == expected);

  // Malformed inputs.
  Json bad = j;
  bad["terms"][0]["exps"] = std::vector<int>{1, 2};
  REQUIRE_THROWS_AS(poly_from_json(bad), std::invalid_argument);
  bad = j;
  bad["terms"][0]["coeff"] = "0";
  REQUIRE_THROWS_AS(poly_from_json(bad), std::invalid_argument);
  bad = j;
  bad["terms"].push_back(bad["terms"][0]);
  REQUIRE_THROWS_AS(poly_from_json(bad), std::invalid_argument);
  bad = j;
  bad["terms"][0]["exps"][0] = -1;
  REQUIRE_THROWS_AS(poly_from_json(bad), std::invalid_argument);
  PolyRingPtr other = make_ring(3);
  REQUIRE_THROWS_AS(poly_from_json(j, other), std::invalid_argument);
  REQUIRE_THROWS_AS(poly_from_json(Json::parse("{\"nvars\": 2}")), std::invalid_argument);
}

TEST_CASE("hall basis serialization", "[json]") {
  HallBasis basis = generate_hall_basis(3);
  Json j = hall_to_json(basis);
  REQUIRE(j.at("step") == 3);
  REQUIRE(j.at("elements").size() == 5);
  REQUIRE_FALSE(j.at("elements").at(0).contains("monomial"));
  REQUIRE_FALSE(j.at("elements").at(1).contains("monomial"));
  REQUIRE(j.at("elements").at(4).at("vector") == Json(std::vector<int>{2, 1, 2}));
  REQUIRE(j.at("elements").at(4).at("d") == 2);
  REQUIRE(poly_from_json(j.at("elements").at(4).at("monomial")) == *basis.at(5).monomial);

  // Byte determinism.
  REQUIRE(hall_to_json(generate_hall_basis(3)).dump(2) == j.dump(2));
}

TEST_CASE("structure constants round trip", "[json]") {
  StructureConstants sc = structure_constants(realize(4));
  Json j = sc_to_json(sc);
  StructureConstants back = sc_from_json(j);
  REQUIRE(back.dim == sc.dim);
  REQUIRE(back.stratum_of == sc.stratum_of);
  REQUIRE(back.table == sc.table);
  REQUIRE(sc_to_json(back).dump(2) == j.dump(2));

  Json bad = j;
  bad["brackets"][0]["i"] = bad["brackets"][0]["j"];
  REQUIRE_THROWS_AS(sc_from_json(bad), std::invalid_argument);
  bad = j;
  bad["brackets"].push_back(bad["brackets"][0]);
  REQUIRE_THROWS_AS(sc_from_json(bad), std::invalid_argument);
  bad = j;
  bad["brackets"][0]["terms"][0][1] = "0";
  REQUIRE_THROWS_AS(sc_from_json(bad), std::invalid_argument);
  bad = j;
  bad["strata"] = std::vector<int>{2, 1};
  REQUIRE_THROWS_AS(sc_from_json(bad), std::invalid_argument);
  bad = j;
  bad["brackets"][0]["terms"][0][0] = 99;
  REQUIRE_THROWS_AS(sc_from_json(bad), std::invalid_argument);
}

TEST_CASE("algebra input with J and gram", "[json]") {
  StratifiedAlgebra h1 = heisenberg(1);
  RatMatrix J = standard_J(1);
  RatMatrix gram = RatMatrix::identity(2);
  Json j = algebra_to_json(h1, J, gram);

  AlgebraInput in = algebra_from_json(j);
  REQUIRE(in.algebra.strata_dims == std::vector<int>{2, 1});
  REQUIRE(in.algebra.constants.table == h1.constants.table);
  REQUIRE(in.J.has_value());
  REQUIRE(*in.J == J);
  REQUIRE(in.gram.has_value());
  REQUIRE(*in.gram == gram);

  AlgebraInput plain = algebra_from_json(algebra_to_json(h1));
  REQUIRE_FALSE(plain.J.has_value());
  REQUIRE_FALSE(plain.gram.has_value());

  Json bad = j;
  bad["J"] = matrix_to_json(RatMatrix::identity(3));
  REQUIRE_THROWS_AS(algebra_from_json(bad), std::invalid_argument);
}

TEST_CASE("solution round trip", "[json]") {
  EmbeddingSolution sol = solve_embedding(3, Ansatz::Restricted);
  Json j = solution_to_json(sol);
  REQUIRE(j.at("ansatz") == "restricted");
  EmbeddingSolution back = solution_from_json(j);
  REQUIRE(back.step == sol.step);
  REQUIRE(back.ansatz == sol.ansatz);
  REQUIRE(back.entries.size() == sol.entries.size());
  for (std::size_t t = 0; t < sol.entries.size(); ++t) {
    REQUIRE(back.entries[t].j == sol.entries[t].j);
    REQUIRE(back.entries[t].vec == sol.entries[t].vec);
    REQUIRE(back.entries[t].c == sol.entries[t].c);
    REQUIRE(back.entries[t].feasible);
    REQUIRE(back.entries[t].r == sol.entries[t].r);
    REQUIRE(back.entries[t].q == sol.entries[t].q);
    REQUIRE(back.entries[t].nullity == sol.entries[t].nullity);
  }
  REQUIRE(verify_solution(back).ok());

  // Independent solves serialize to identical bytes.
  REQUIRE(solution_to_json(solve_embedding(3, Ansatz::Restricted)).dump(2) == j.dump(2));

  // Infeasible entries drop their polynomials and survive the round trip.
  sol.entries[1].feasible = false;
  Json mixed = solution_to_json(sol);
  REQUIRE(mixed.at("entries").at(1).at("feasible") == Json(false));
  REQUIRE_FALSE(mixed.at("entries").at(1).contains("r"));
  EmbeddingSolution mixed_back = solution_from_json(mixed);
  REQUIRE_FALSE(mixed_back.entries[1].feasible);
  REQUIRE(mixed_back.entries[1].r.is_zero());
  REQUIRE(mixed_back.entries[1].q.is_zero());
  REQUIRE(verify_solution(mixed_back).skipped == 1);

  REQUIRE_THROWS_AS(solution_from_json(Json::parse("{\"step\": 3}")), std::invalid_argument);
  Json bad = j;
  bad["ansatz"] = "cubic";
  REQUIRE_THROWS_AS(solution_from_json(bad), std::invalid_argument);
  bad = j;
  bad["entries"][0]["nullity"] = -1;
  REQUIRE_THROWS_AS(solution_from_json(bad), std::invalid_argument);
}

TEST_CASE("surface serialization", "[json]") {
  SurfaceDescription surf = emit_surface(solve_embedding(3, Ansatz::Restricted));
  Json j = surface_to_json(surf);
  REQUIRE(j.at("n") == 3);
  REQUIRE(j.at("variables") ==
          Json(std::vector<std::string>{"x", "y", "u1", "u2", "u3"}));
  REQUIRE(j.at("polynomials").size() == 3);
  REQUIRE(poly_from_json(j.at("polynomials").at(2)) == surf.polynomials[2]);

  std::string latex = surface_to_latex(surf);
  REQUIRE(latex.find("v_{1} &= \\frac{1}{2}x^2") != std::string::npos);
  REQUIRE(latex.find("v_{3} &= -\\frac{1}{2}x^2y+u_2") != std::string::npos);
}
