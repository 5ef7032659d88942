#pragma once

// The embedding system for the free two-generator algebra: for each Hall
// index j >= 3, find q_j = c_j x_1 p_j + r_j with r_j a polynomial in
// x_3..x_n, so that X_1 q_j = -p_j and X_2 q_j = 0 exactly. Direct
// integration forces c_j = -1/(I(j)_1 + 1); the remaining condition on r_j
// is the linear equation
//
//   c_j x_1 (d_2 p_j + sum_{k>2} p_k d_k p_j) + sum_{l>2} p_l d_l r_j = 0,
//
// which this module assembles and solves exactly over several ansatz spaces.
// It also builds the product-span tables behind the solvability analysis at
// low steps, the step-9 obstruction certificate, and the embedded-surface
// description produced from a verified solution.

#include "carnot/hall.hpp"
#include "carnot/matrix.hpp"
#include "carnot/realize.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

struct SpanViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificateFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Ansatz { LinearOnly, Restricted, Full };

inline std::string to_string(Ansatz a) {
  switch (a) {
    case Ansatz::LinearOnly: return "linear";
    case Ansatz::Restricted: return "restricted";
    case Ansatz::Full: return "full";
  }
  throw std::logic_error("to_string(Ansatz): bad value");
}

inline Ansatz ansatz_from_string(const std::string& s) {
  if (s == "linear") return Ansatz::LinearOnly;
  if (s == "restricted") return Ansatz::Restricted;
  if (s == "full") return Ansatz::Full;
  throw std::invalid_argument("unknown ansatz '" + s + "' (expected linear|restricted|full)");
}

// The unique constant making d_1(c x_1 p_j) = -p_j.
inline Rat leading_coefficient(const HallElement& e) {
  if (e.is_generator())
    throw std::invalid_argument("leading_coefficient: generators have no monomial");
  return make_rat(-1, e.multi_index[0] + 1);
}

inline Rat leading_coefficient(const HallBasis& basis, int j) {
  return leading_coefficient(basis.at(j));
}

namespace detail {

// c_j x_1 (d_2 p_j + sum_{k>2} p_k d_k p_j): the part of the defining
// equation that does not involve r.
inline Poly base_residual(const HallBasis& basis, int j) {
  const HallElement& e = basis.at(j);
  const Poly& p = *e.monomial;
  Poly inner = p.partial(2);
  for (int k = 3; k <= basis.dimension(); ++k) {
    if (!p.depends_on(k)) continue;
    inner += *basis.at(k).monomial * p.partial(k);
  }
  return leading_coefficient(e) * (Poly::variable(basis.ring, 1) * inner);
}

// sum_{l>2} p_l d_l applied to a polynomial in x_3..x_n.
inline Poly tail_derivation(const HallBasis& basis, const Poly& r) {
  Poly out = Poly::zero(basis.ring);
  for (int l = 3; l <= basis.dimension(); ++l) {
    if (!r.depends_on(l)) continue;
    out += *basis.at(l).monomial * r.partial(l);
  }
  return out;
}

}  // namespace detail

// Left-hand side of the defining equation for index j at candidate r; zero
// iff r solves the system for that index.
inline Poly residual(const HallBasis& basis, int j, const Poly& r) {
  if (!r.is_zero() && (r.depends_on(1) || r.depends_on(2)))
    throw std::invalid_argument("residual: r must involve only x_3..x_n");
  return detail::base_residual(basis, j) + detail::tail_derivation(basis, r);
}

// Candidate monomials for r_j, in the pinned deterministic column order:
// LinearOnly lists x_k with h(k) = h(j) ascending; Restricted appends the
// squares x_l^2 with 2 h(l) = h(j) ascending; Full lists every monomial in
// x_3..x_n of weighted degree h(j) in the canonical monomial order.
inline std::vector<Monomial> ansatz_monomials(const HallBasis& basis, int j, Ansatz ansatz) {
  const int n = basis.dimension();
  const int h = basis.at(j).height;
  std::vector<Monomial> cols;
  if (ansatz == Ansatz::LinearOnly || ansatz == Ansatz::Restricted) {
    for (int k = 3; k <= n; ++k)
      if (basis.at(k).height == h) cols.push_back(Monomial::var(k, 1));
    if (ansatz == Ansatz::Restricted)
      for (int l = 3; l <= n; ++l)
        if (2 * basis.at(l).height == h) cols.push_back(Monomial::var(l, 2));
    return cols;
  }
  // Full: enumerate exponents over x_3..x_n with total weight h
  std::vector<std::pair<int, int>> partial;  // (var, exponent)
  auto recurse = [&](auto&& self, int var, int remaining) -> void {
    if (remaining == 0) {
      Monomial m;
      for (const auto& [v, e] : partial) m = m.times(Monomial::var(v, e));
      cols.push_back(m);
      return;
    }
    if (var > n) return;
    int w = basis.at(var).height;
    self(self, var + 1, remaining);  // exponent 0
    for (int e = 1; e * w <= remaining; ++e) {
      partial.emplace_back(var, e);
      self(self, var + 1, remaining - e * w);
      partial.pop_back();
    }
  };
  recurse(recurse, 3, h);
  std::sort(cols.begin(), cols.end(), MonoLess{basis.ring.get()});
  return cols;
}

struct EmbedEntry {
  int j = 0;
  std::vector<int> vec;
  Rat c;
  bool feasible = false;
  Poly r;
  Poly q;
  int nullity = 0;
};

struct EmbeddingSolution {
  int step = 0;
  Ansatz ansatz = Ansatz::Restricted;
  std::vector<EmbedEntry> entries;  // ascending j, starting at 3

  bool all_feasible() const {
    for (const EmbedEntry& e : entries)
      if (!e.feasible) return false;
    return true;
  }
};

namespace detail {

struct EmbedSystem {
  std::vector<Monomial> cols;
  RatMatrix A;
  std::vector<Rat> b;  // right-hand side: coefficients of -base_residual
};

inline EmbedSystem assemble_embed_system(const HallBasis& basis, int j, Ansatz ansatz) {
  EmbedSystem sys;
  sys.cols = ansatz_monomials(basis, j, ansatz);
  Poly rhs = make_rat(-1) * base_residual(basis, j);

  std::vector<Poly> images;
  images.reserve(sys.cols.size());
  for (const Monomial& m : sys.cols)
    images.push_back(tail_derivation(basis, Poly::monomial(basis.ring, m, Rat(1))));

  const int n = basis.dimension();
  std::map<std::vector<int>, int> row_of;
  auto note = [&](const Poly& p) {
    for (const auto& term : p.terms())
      row_of.emplace(term.first.to_dense(n), static_cast<int>(row_of.size()));
  };
  note(rhs);
  for (const Poly& p : images) note(p);

  sys.A = RatMatrix(static_cast<int>(row_of.size()), static_cast<int>(sys.cols.size()));
  sys.b.assign(row_of.size(), Rat(0));
  for (const auto& [exps, row] : row_of)
    sys.b[static_cast<std::size_t>(row)] = rhs.coeff(Monomial::from_dense(exps));
  for (std::size_t col = 0; col < images.size(); ++col)
    for (const auto& [exps, row] : row_of)
      sys.A(row, static_cast<int>(col)) = images[col].coeff(Monomial::from_dense(exps));
  return sys;
}

}  // namespace detail

// Solve the system for one index under the given ansatz, with the
// free-variable-zero convention fixing the particular solution.
inline EmbedEntry solve_embedding_entry(const HallBasis& basis, int j, Ansatz ansatz) {
  const HallElement& e = basis.at(j);
  EmbedEntry entry{j,
                   e.vec,
                   leading_coefficient(e),
                   false,
                   Poly::zero(basis.ring),
                   Poly::zero(basis.ring),
                   0};

  detail::EmbedSystem sys = detail::assemble_embed_system(basis, j, ansatz);
  auto sol = solve_affine(sys.A, sys.b);
  if (!sol) return entry;

  entry.feasible = true;
  entry.nullity = static_cast<int>(sol->nullbasis.size());
  for (std::size_t t = 0; t < sys.cols.size(); ++t)
    entry.r.add_term(sys.cols[t], sol->particular[t]);
  entry.q = entry.c * (Poly::variable(basis.ring, 1) * *e.monomial) + entry.r;
  if (!residual(basis, j, entry.r).is_zero())
    throw std::logic_error("solve_embedding_entry: solver returned a non-solution");
  return entry;
}

inline EmbeddingSolution solve_embedding(const HallBasis& basis, Ansatz ansatz) {
  EmbeddingSolution sol;
  sol.step = basis.step;
  sol.ansatz = ansatz;
  for (int j = 3; j <= basis.dimension(); ++j)
    sol.entries.push_back(solve_embedding_entry(basis, j, ansatz));
  return sol;
}

inline EmbeddingSolution solve_embedding(int step, Ansatz ansatz,
                                         int max_step = default_max_step()) {
  if (step < 2) throw std::invalid_argument("solve_embedding: step must be >= 2");
  return solve_embedding(generate_hall_basis(step, max_step), ansatz);
}

struct VerifyReport {
  int checked = 0;
  int skipped = 0;             // infeasible entries carry nothing to verify
  std::vector<int> violations;  // indices failing any exact check

  bool ok() const { return violations.empty(); }
};

// Exact verification of the defining equations X_1 q_j = -p_j and
// X_2 q_j = 0, weighted homogeneity, and the declared shape of each entry.
inline VerifyReport verify_solution(const EmbeddingSolution& sol) {
  HallBasis basis = generate_hall_basis(sol.step, std::max(sol.step, default_max_step()));
  auto [x1, x2] = generator_fields(basis);

  VerifyReport report;
  for (const EmbedEntry& entry : sol.entries) {
    if (!entry.feasible) {
      ++report.skipped;
      continue;
    }
    ++report.checked;
    const HallElement& e = basis.at(entry.j);
    bool good = true;
    if (x1.apply(entry.q) != make_rat(-1) * *e.monomial) good = false;
    if (!x2.apply(entry.q).is_zero()) good = false;
    if (entry.q.is_zero() || entry.q.weighted_degree() != e.height) good = false;
    if (!entry.r.is_zero() && (entry.r.depends_on(1) || entry.r.depends_on(2))) good = false;
    if (entry.q != entry.c * (Poly::variable(basis.ring, 1) * *e.monomial) + entry.r)
      good = false;
    if (entry.c != leading_coefficient(e)) good = false;
    if (!good) report.violations.push_back(entry.j);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Product-span tables
// ---------------------------------------------------------------------------

namespace detail {

// A nonzero single-monomial polynomial as (dense exponents, coefficient).
inline std::pair<std::vector<int>, Rat> single_monomial(const Poly& p) {
  if (p.term_count() != 1)
    throw SpanViolation("product is not a single monomial");
  const auto& term = *p.terms().begin();
  return {term.first.to_dense(p.nvars()), term.second};
}

}  // namespace detail

// For every pair (j, k) with x_1 p_k d_k p_j nonzero: the unique basis index
// l with p_l proportional to the product, and the exact scalar. Pairs whose
// product vanishes are omitted. A nonzero product outside every Span{p_l}
// raises SpanViolation.
inline std::map<std::pair<int, int>, std::pair<int, Rat>> lemma42_table(const HallBasis& basis) {
  if (basis.step > 8)
    throw std::invalid_argument("lemma42_table: certified only up to step 8");
  std::map<std::pair<int, int>, std::pair<int, Rat>> table;
  Poly x1 = Poly::variable(basis.ring, 1);
  for (int j = 3; j <= basis.dimension(); ++j) {
    const Poly& pj = *basis.at(j).monomial;
    for (int k = 3; k <= basis.dimension(); ++k) {
      if (!pj.depends_on(k)) continue;
      Poly prod = x1 * *basis.at(k).monomial * pj.partial(k);
      auto [exps, coeff] = detail::single_monomial(prod);
      int l = basis.index_by_monomial_exps(exps);
      if (l == 0)
        throw SpanViolation("pair (" + std::to_string(j) + "," + std::to_string(k) +
                            "): product matches no basis monomial");
      Rat scalar = coeff / basis.at(l).monomial->coeff(Monomial::from_dense(exps));
      table[{j, k}] = {l, scalar};
    }
  }
  return table;
}

struct Lemma43Entry {
  int ell = 0;     // basis index: value = scalar * p_ell, or scalar * x_ell p_ell
  Rat scalar;
  bool special = false;  // the x_ell p_ell case
};

// For every j with x_1 d_2 p_j nonzero: either the unique l with the product
// in Span{p_l}, or a special index whose product lies in Span{x_l p_l}.
// Through step 7 the only special index is the one with vector (2,1,2,4);
// step 8 adds (2,1,1,2,6) and (2,1,2,2,7), whose shifted exponent patterns
// match no basis vector. Zero products are omitted.
inline std::map<int, Lemma43Entry> lemma43_table(const HallBasis& basis) {
  if (basis.step > 8)
    throw std::invalid_argument("lemma43_table: certified only up to step 8");
  std::map<int, Lemma43Entry> table;
  Poly x1 = Poly::variable(basis.ring, 1);
  for (int j = 3; j <= basis.dimension(); ++j) {
    Poly prod = x1 * basis.at(j).monomial->partial(2);
    if (prod.is_zero()) continue;
    auto [exps, coeff] = detail::single_monomial(prod);
    int l = basis.index_by_monomial_exps(exps);
    if (l != 0) {
      Rat scalar = coeff / basis.at(l).monomial->coeff(Monomial::from_dense(exps));
      table[j] = {l, scalar, false};
      continue;
    }
    // try the special shape x_l * p_l
    bool placed = false;
    for (int cand = 3; cand <= basis.dimension() && !placed; ++cand) {
      std::vector<int> shifted = exps;
      if (shifted[static_cast<std::size_t>(cand) - 1] == 0) continue;
      --shifted[static_cast<std::size_t>(cand) - 1];
      int base = basis.index_by_monomial_exps(shifted);
      if (base != cand) continue;  // need the cofactor to be p_cand itself
      Rat scalar = coeff / basis.at(base).monomial->coeff(Monomial::from_dense(shifted));
      table[j] = {base, scalar, true};
      placed = true;
    }
    if (!placed)
      throw SpanViolation("index " + std::to_string(j) +
                          ": product matches neither p_l nor x_l p_l");
  }
  return table;
}

// ---------------------------------------------------------------------------
// The step-9 obstruction certificate
// ---------------------------------------------------------------------------

struct Step9Certificate {
  int index = 0;             // Hall index of the witness element
  std::vector<int> vec;      // its decomposed vector, (2,1,2,4,5)
  Rat c;                     // its leading coefficient
  bool restricted_infeasible = false;
  Rat square_coefficient;    // x_4^2 x_5 coefficient of the particular solution
  bool nullspace_clean = false;  // no nullspace vector touches that coefficient
  int full_nullity = 0;

  bool ok() const {
    return restricted_infeasible && square_coefficient != 0 && nullspace_clean;
  }
};

// Certifies the obstruction: the restricted ansatz fails exactly at the
// witness index, while the full ansatz solves it with an x_4^2 x_5
// coefficient that is the same nonzero constant in every solution.
inline Step9Certificate step9_certificate() {
  HallBasis basis = generate_hall_basis(9, std::max(9, default_max_step()));
  Step9Certificate cert;
  cert.vec = {2, 1, 2, 4, 5};
  cert.index = basis.index_of_vector(cert.vec);
  if (cert.index == 0) throw CertificateFailure("witness vector missing from the basis");
  cert.c = leading_coefficient(basis.at(cert.index));

  EmbedEntry restricted = solve_embedding_entry(basis, cert.index, Ansatz::Restricted);
  cert.restricted_infeasible = !restricted.feasible;
  if (!cert.restricted_infeasible)
    throw CertificateFailure("restricted ansatz unexpectedly solved the witness index");

  detail::EmbedSystem sys = detail::assemble_embed_system(basis, cert.index, Ansatz::Full);
  auto sol = solve_affine(sys.A, sys.b);
  if (!sol) throw CertificateFailure("full ansatz failed at the witness index");
  cert.full_nullity = static_cast<int>(sol->nullbasis.size());

  Monomial target = Monomial::var(4, 2).times(Monomial::var(5, 1));
  int col = -1;
  for (std::size_t t = 0; t < sys.cols.size(); ++t)
    if (sys.cols[t] == target) col = static_cast<int>(t);
  if (col < 0) throw CertificateFailure("x_4^2 x_5 is not an ansatz column");

  cert.square_coefficient = sol->particular[static_cast<std::size_t>(col)];
  if (cert.square_coefficient == 0)
    throw CertificateFailure("particular solution has zero x_4^2 x_5 coefficient");
  cert.nullspace_clean = true;
  for (const auto& v : sol->nullbasis)
    if (v[static_cast<std::size_t>(col)] != 0) cert.nullspace_clean = false;
  if (!cert.nullspace_clean)
    throw CertificateFailure("a nullspace vector moves the x_4^2 x_5 coefficient");
  return cert;
}

// ---------------------------------------------------------------------------
// Surface description
// ---------------------------------------------------------------------------

struct SurfaceDescription {
  int n = 0;                           // number of defining polynomials
  std::vector<std::string> variables;  // x, y, u1..un
  std::vector<Poly> polynomials;       // the q_j in Hall order
};

inline VarNamer surface_text_names() {
  return [](int k) {
    if (k == 1) return std::string("x");
    if (k == 2) return std::string("y");
    return "u" + std::to_string(k - 2);
  };
}

inline VarNamer surface_latex_names() {
  return [](int k) {
    if (k == 1) return std::string("x");
    if (k == 2) return std::string("y");
    int idx = k - 2;
    return idx < 10 ? "u_" + std::to_string(idx) : "u_{" + std::to_string(idx) + "}";
  };
}

// Package a fully solved system as the graph coordinates of the embedded
// surface, renaming (x_1, x_2) to (x, y) and x_{j} to u_{j-2}.
inline SurfaceDescription emit_surface(const EmbeddingSolution& sol) {
  if (sol.entries.empty()) throw std::invalid_argument("emit_surface: empty solution");
  if (!sol.all_feasible())
    throw std::invalid_argument("emit_surface: solution has infeasible entries");
  SurfaceDescription surf;
  surf.n = static_cast<int>(sol.entries.size());
  surf.variables = {"x", "y"};
  for (int t = 1; t <= surf.n; ++t) surf.variables.push_back("u" + std::to_string(t));
  for (const EmbedEntry& e : sol.entries) {
    if (e.q.constant_term() != 0)
      throw std::logic_error("emit_surface: surface misses the origin");
    surf.polynomials.push_back(e.q);
  }
  return surf;
}

}  // namespace carnot
