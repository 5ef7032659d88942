#pragma once

// JSON wire formats for every artifact the command-line driver reads or
// writes: rationals as "p/q" strings, polynomials with dense exponent rows,
// Hall bases, structure-constant tables (doubling as the algebra input
// format, with optional first-stratum J and gram matrices), embedding
// solutions, and surface descriptions. Emission is canonical — fixed key
// order, canonical term order — so equal objects serialize to equal bytes.
// All parsers validate shape and reject malformed input with
// std::invalid_argument.

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carnot/embed.hpp"
#include "carnot/stratified.hpp"

namespace carnot {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& expect_field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw std::invalid_argument(std::string(what) + ": missing field '" + key + "'");
  return j.at(key);
}

inline int expect_int(const Json& j, const char* what) {
  if (!j.is_number_integer())
    throw std::invalid_argument(std::string(what) + ": expected an integer");
  return j.get<int>();
}

inline std::vector<int> expect_int_array(const Json& j, const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const Json& v : j) out.push_back(expect_int(v, what));
  return out;
}

}  // namespace detail

// --- Rationals ---------------------------------------------------------------

inline Json rat_to_json(const Rat& r) { return format_rat(r); }

inline Rat rat_from_json(const Json& j) {
  if (!j.is_string()) throw std::invalid_argument("rational: expected a \"p/q\" string");
  return parse_rat(j.get<std::string>());
}

// --- Matrices ----------------------------------------------------------------
// A matrix is an array of equal-length rows of rational strings.

inline Json matrix_to_json(const RatMatrix& M) {
  Json rows = Json::array();
  for (int i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(rat_to_json(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RatMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected nonempty array");
  int rows = static_cast<int>(j.size());
  if (!j.at(0).is_array() || j.at(0).empty())
    throw std::invalid_argument("matrix: expected nonempty rows");
  int cols = static_cast<int>(j.at(0).size());
  RatMatrix M(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) M(r, c) = rat_from_json(row.at(static_cast<std::size_t>(c)));
  }
  return M;
}

// --- Polynomials -------------------------------------------------------------

inline Json poly_to_json(const Poly& p) {
  Json out;
  out["nvars"] = p.nvars();
  out["weights"] = p.ring()->weights;
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json term;
    term["coeff"] = rat_to_json(c);
    term["exps"] = m.to_dense(p.nvars());
    terms.push_back(std::move(term));
  }
  out["terms"] = std::move(terms);
  return out;
}

inline Poly poly_from_json(const Json& j, PolyRingPtr ring) {
  int nvars = detail::expect_int(detail::expect_field(j, "nvars", "polynomial"), "polynomial");
  std::vector<int> weights =
      detail::expect_int_array(detail::expect_field(j, "weights", "polynomial"), "polynomial");
  if (ring) {
    if (nvars != ring->nvars || weights != ring->weights)
      throw std::invalid_argument("polynomial: ring mismatch");
  } else {
    ring = make_ring(nvars, weights);
  }
  const Json& terms = detail::expect_field(j, "terms", "polynomial");
  if (!terms.is_array()) throw std::invalid_argument("polynomial: terms must be an array");
  Poly p = Poly::zero(ring);
  for (const Json& t : terms) {
    Rat c = rat_from_json(detail::expect_field(t, "coeff", "polynomial term"));
    if (c == 0) throw std::invalid_argument("polynomial: zero coefficient term");
    std::vector<int> exps = detail::expect_int_array(
        detail::expect_field(t, "exps", "polynomial term"), "polynomial term");
    if (static_cast<int>(exps.size()) != nvars)
      throw std::invalid_argument("polynomial: exps length differs from nvars");
    for (int e : exps)
      if (e < 0) throw std::invalid_argument("polynomial: negative exponent");
    p.add_term(Monomial::from_dense(exps), c);
  }
  if (p.term_count() != terms.size())
    throw std::invalid_argument("polynomial: duplicate monomials");
  return p;
}

inline Poly poly_from_json(const Json& j) { return poly_from_json(j, nullptr); }

// --- Hall basis --------------------------------------------------------------

inline Json hall_to_json(const HallBasis& basis) {
  Json out;
  out["step"] = basis.step;
  Json elements = Json::array();
  for (const HallElement& e : basis.elements) {
    Json el;
    el["index"] = e.index;
    el["vector"] = e.vec;
    el["multi_index"] = e.multi_index;
    el["d"] = e.bracket_count;
    if (!e.is_generator()) el["monomial"] = poly_to_json(*e.monomial);
    elements.push_back(std::move(el));
  }
  out["elements"] = std::move(elements);
  return out;
}

// --- Structure constants and algebra input ------------------------------------

inline Json sc_to_json(const StructureConstants& sc) {
  Json out;
  out["dim"] = sc.dim;
  out["strata"] = sc.strata_dims();
  Json brackets = Json::array();
  for (const auto& [ij, terms] : sc.table) {
    Json b;
    b["i"] = ij.first;
    b["j"] = ij.second;
    Json ts = Json::array();
    for (const auto& [k, c] : terms) ts.push_back(Json::array({k, rat_to_json(c)}));
    b["terms"] = std::move(ts);
    brackets.push_back(std::move(b));
  }
  out["brackets"] = std::move(brackets);
  return out;
}

inline StructureConstants sc_from_json(const Json& j) {
  StructureConstants sc;
  sc.dim = detail::expect_int(detail::expect_field(j, "dim", "algebra"), "algebra");
  if (sc.dim < 1) throw std::invalid_argument("algebra: dim must be positive");
  std::vector<int> strata =
      detail::expect_int_array(detail::expect_field(j, "strata", "algebra"), "algebra");
  int total = 0;
  for (std::size_t h = 0; h < strata.size(); ++h) {
    if (strata[h] < 1) throw std::invalid_argument("algebra: empty stratum");
    for (int t = 0; t < strata[h]; ++t) sc.stratum_of.push_back(static_cast<int>(h) + 1);
    total += strata[h];
  }
  if (total != sc.dim) throw std::invalid_argument("algebra: strata do not sum to dim");

  const Json& brackets = detail::expect_field(j, "brackets", "algebra");
  if (!brackets.is_array()) throw std::invalid_argument("algebra: brackets must be an array");
  for (const Json& b : brackets) {
    int i = detail::expect_int(detail::expect_field(b, "i", "bracket"), "bracket");
    int jj = detail::expect_int(detail::expect_field(b, "j", "bracket"), "bracket");
    if (i < 1 || jj <= i || jj > sc.dim)
      throw std::invalid_argument("algebra: bracket indices must satisfy 1 <= i < j <= dim");
    if (sc.table.count({i, jj})) throw std::invalid_argument("algebra: duplicate bracket");
    const Json& ts = detail::expect_field(b, "terms", "bracket");
    if (!ts.is_array() || ts.empty())
      throw std::invalid_argument("algebra: bracket terms must be a nonempty array");
    std::vector<std::pair<int, Rat>> terms;
    for (const Json& t : ts) {
      if (!t.is_array() || t.size() != 2)
        throw std::invalid_argument("algebra: bracket term must be [k, \"c\"]");
      int k = detail::expect_int(t.at(0), "bracket term");
      if (k < 1 || k > sc.dim) throw std::invalid_argument("algebra: bracket target out of range");
      Rat c = rat_from_json(t.at(1));
      if (c == 0) throw std::invalid_argument("algebra: zero bracket coefficient");
      terms.emplace_back(k, c);
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b2) { return a.first < b2.first; });
    for (std::size_t t = 1; t < terms.size(); ++t)
      if (terms[t].first == terms[t - 1].first)
        throw std::invalid_argument("algebra: duplicate bracket target");
    sc.table[{i, jj}] = std::move(terms);
  }
  return sc;
}

struct AlgebraInput {
  StratifiedAlgebra algebra;
  std::optional<RatMatrix> J;
  std::optional<RatMatrix> gram;
};

inline Json algebra_to_json(const StratifiedAlgebra& alg,
                            const std::optional<RatMatrix>& J = std::nullopt,
                            const std::optional<RatMatrix>& gram = std::nullopt) {
  Json out = sc_to_json(alg.constants);
  if (J) out["J"] = matrix_to_json(*J);
  if (gram) out["gram"] = matrix_to_json(*gram);
  return out;
}

inline AlgebraInput algebra_from_json(const Json& j) {
  StructureConstants sc = sc_from_json(j);
  AlgebraInput in{from_constants(sc), std::nullopt, std::nullopt};
  if (j.contains("J")) in.J = matrix_from_json(j.at("J"));
  if (j.contains("gram")) in.gram = matrix_from_json(j.at("gram"));
  int d1 = in.algebra.strata_dims[0];
  if (in.J && (in.J->rows() != d1 || in.J->cols() != d1))
    throw std::invalid_argument("algebra: J must be square of first-stratum size");
  if (in.gram && (in.gram->rows() != d1 || in.gram->cols() != d1))
    throw std::invalid_argument("algebra: gram must be square of first-stratum size");
  return in;
}

// --- Embedding solutions -------------------------------------------------------

inline Json solution_to_json(const EmbeddingSolution& sol) {
  Json out;
  out["step"] = sol.step;
  out["ansatz"] = to_string(sol.ansatz);
  Json entries = Json::array();
  for (const EmbedEntry& e : sol.entries) {
    Json en;
    en["j"] = e.j;
    en["vector"] = e.vec;
    en["c"] = rat_to_json(e.c);
    if (e.feasible) {
      en["r"] = poly_to_json(e.r);
      en["q"] = poly_to_json(e.q);
      en["nullity"] = e.nullity;
    } else {
      en["feasible"] = false;
    }
    entries.push_back(std::move(en));
  }
  out["entries"] = std::move(entries);
  return out;
}

inline EmbeddingSolution solution_from_json(const Json& j) {
  EmbeddingSolution sol;
  sol.step = detail::expect_int(detail::expect_field(j, "step", "solution"), "solution");
  if (sol.step < 2) throw std::invalid_argument("solution: step must be >= 2");
  const Json& ans = detail::expect_field(j, "ansatz", "solution");
  if (!ans.is_string()) throw std::invalid_argument("solution: ansatz must be a string");
  sol.ansatz = ansatz_from_string(ans.get<std::string>());

  const Json& entries = detail::expect_field(j, "entries", "solution");
  if (!entries.is_array()) throw std::invalid_argument("solution: entries must be an array");
  PolyRingPtr ring;  // shared across all entries, fixed by the first polynomial
  for (const Json& en : entries) {
    int idx = detail::expect_int(detail::expect_field(en, "j", "entry"), "entry");
    if (idx < 3) throw std::invalid_argument("solution: entries start at index 3");
    std::vector<int> vec =
        detail::expect_int_array(detail::expect_field(en, "vector", "entry"), "entry");
    Rat c = rat_from_json(detail::expect_field(en, "c", "entry"));
    bool feasible = !(en.contains("feasible") && en.at("feasible").is_boolean() &&
                      !en.at("feasible").get<bool>());
    if (feasible) {
      Poly r = poly_from_json(detail::expect_field(en, "r", "entry"), ring);
      if (!ring) ring = r.ring();
      Poly q = poly_from_json(detail::expect_field(en, "q", "entry"), ring);
      int nullity = detail::expect_int(detail::expect_field(en, "nullity", "entry"), "entry");
      if (nullity < 0) throw std::invalid_argument("solution: negative nullity");
      sol.entries.push_back({idx, std::move(vec), c, true, std::move(r), std::move(q), nullity});
    } else {
      if (!ring) {
        // Infeasible-first files still need the ring for the placeholder
        // polynomials; derive it from the declared step.
        ring = generate_hall_basis(sol.step, std::max(sol.step, default_max_step())).ring;
      }
      sol.entries.push_back(
          {idx, std::move(vec), c, false, Poly::zero(ring), Poly::zero(ring), 0});
    }
  }
  return sol;
}

// --- Surface descriptions ------------------------------------------------------

inline Json surface_to_json(const SurfaceDescription& surf) {
  Json out;
  out["n"] = surf.n;
  out["variables"] = surf.variables;
  Json polys = Json::array();
  for (const Poly& p : surf.polynomials) polys.push_back(poly_to_json(p));
  out["polynomials"] = std::move(polys);
  return out;
}

inline std::string surface_to_latex(const SurfaceDescription& surf) {
  std::string out = "\\begin{aligned}\n";
  for (int t = 0; t < surf.n; ++t) {
    out += "v_{" + std::to_string(t + 1) +
           "} &= " + poly_to_latex(surf.polynomials[static_cast<std::size_t>(t)],
                                   surface_latex_names()) +
           " \\\\\n";
  }
  out += "\\end{aligned}\n";
  return out;
}

}  // namespace carnot
