#pragma once

// Abstract stratified Lie algebras given by graded structure constants:
// dilations, strata-preserving automorphism checks, extension of first-stratum
// maps through the free bracket tree, almost complex structures, tightness,
// the conformal / CR / anti-CR predicates with exact rational arithmetic,
// certified distortion, direct sums, permutation automorphisms of product
// algebras, and the decomposition of product automorphisms.

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

struct SingularInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ClassMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// The algebra type and its builders
// ---------------------------------------------------------------------------

struct StratifiedAlgebra {
  std::vector<int> strata_dims;  // (dim of stratum 1, ..., dim of stratum step)
  StructureConstants constants;
  int step = 0;

  int dim() const { return constants.dim; }

  // [first, last] 1-based inclusive basis-index range of stratum h.
  std::pair<int, int> stratum_range(int h) const {
    if (h < 1 || h > step) throw std::out_of_range("StratifiedAlgebra: bad stratum");
    int first = 1;
    for (int t = 1; t < h; ++t) first += strata_dims[static_cast<std::size_t>(t) - 1];
    return {first, first + strata_dims[static_cast<std::size_t>(h) - 1] - 1};
  }

  int stratum_of(int k) const {
    if (k < 1 || k > dim()) throw std::out_of_range("StratifiedAlgebra: bad index");
    return constants.stratum_of[static_cast<std::size_t>(k) - 1];
  }
};

// Checks the structural invariants: consistent stratum bookkeeping in
// nondecreasing block order, a nonzero top stratum, grading of the bracket,
// and generation of every deeper stratum by bracketing with the first.
inline void validate(const StratifiedAlgebra& alg) {
  const StructureConstants& sc = alg.constants;
  if (alg.step < 1 || static_cast<int>(alg.strata_dims.size()) != alg.step)
    throw std::invalid_argument("StratifiedAlgebra: step/strata_dims mismatch");
  for (int d : alg.strata_dims)
    if (d < 1) throw std::invalid_argument("StratifiedAlgebra: empty stratum");
  int total = 0;
  for (int d : alg.strata_dims) total += d;
  if (total != sc.dim || static_cast<int>(sc.stratum_of.size()) != sc.dim)
    throw std::invalid_argument("StratifiedAlgebra: dimension mismatch");
  for (int h = 1; h <= alg.step; ++h) {
    auto [first, last] = alg.stratum_range(h);
    for (int k = first; k <= last; ++k)
      if (sc.stratum_of[static_cast<std::size_t>(k) - 1] != h)
        throw std::invalid_argument("StratifiedAlgebra: strata not in block order");
  }
  for (const auto& [key, terms] : sc.table) {
    auto [i, j] = key;
    if (i < 1 || j <= i || j > sc.dim)
      throw std::invalid_argument("StratifiedAlgebra: bad bracket key");
    int h = alg.stratum_of(i) + alg.stratum_of(j);
    for (const auto& [k, c] : terms) {
      if (c == 0) throw std::invalid_argument("StratifiedAlgebra: stored zero coefficient");
      if (h > alg.step || alg.stratum_of(k) != h)
        throw std::invalid_argument("StratifiedAlgebra: bracket violates the grading");
    }
  }
  // generation: stratum h+1 is spanned by brackets of stratum h with stratum 1
  for (int h = 1; h < alg.step; ++h) {
    auto [hf, hl] = alg.stratum_range(h);
    auto [gf, gl] = alg.stratum_range(1);
    auto [tf, tl] = alg.stratum_range(h + 1);
    int target_dim = tl - tf + 1;
    std::vector<std::vector<Rat>> products;
    for (int i = hf; i <= hl; ++i) {
      for (int g = gf; g <= gl; ++g) {
        std::vector<Rat> v(static_cast<std::size_t>(target_dim), Rat(0));
        for (const auto& [k, c] : sc.bracket(i, g))
          v[static_cast<std::size_t>(k - tf)] = c;
        products.push_back(std::move(v));
      }
    }
    RatMatrix M(static_cast<int>(products.size()), target_dim);
    for (std::size_t r = 0; r < products.size(); ++r)
      for (int c = 0; c < target_dim; ++c) M(static_cast<int>(r), c) = products[r][static_cast<std::size_t>(c)];
    if (rank(M) != target_dim)
      throw std::invalid_argument("StratifiedAlgebra: stratum " + std::to_string(h + 1) +
                                  " is not generated by the first stratum");
  }
}

inline StratifiedAlgebra from_constants(StructureConstants sc) {
  StratifiedAlgebra alg;
  alg.step = sc.step();
  alg.strata_dims = sc.strata_dims();
  alg.constants = std::move(sc);
  validate(alg);
  return alg;
}

// Heisenberg algebra of dimension 2m+1: basis X_1..X_m, Y_1..Y_m, U with
// [X_j, Y_j] = U.
inline StratifiedAlgebra heisenberg(int m) {
  if (m < 1) throw std::invalid_argument("heisenberg: m must be >= 1");
  StructureConstants sc;
  sc.dim = 2 * m + 1;
  sc.stratum_of.assign(static_cast<std::size_t>(2 * m), 1);
  sc.stratum_of.push_back(2);
  for (int j = 1; j <= m; ++j) sc.table[{j, m + j}] = {{2 * m + 1, Rat(1)}};
  return from_constants(std::move(sc));
}

// Free nilpotent algebra on two generators, truncated at the given step,
// with constants extracted from the polynomial realization.
inline StratifiedAlgebra free_nilpotent(int step, int max_step = default_max_step()) {
  return from_constants(structure_constants(realize(step, max_step)));
}

// Abelian algebra: a single stratum, trivial bracket. (Not stratified in the
// strict sense beyond step 1, but a useful degenerate test subject.)
inline StratifiedAlgebra abelian(int n) {
  if (n < 1) throw std::invalid_argument("abelian: n must be >= 1");
  StratifiedAlgebra alg;
  alg.step = 1;
  alg.strata_dims = {n};
  alg.constants.dim = n;
  alg.constants.stratum_of.assign(static_cast<std::size_t>(n), 1);
  return alg;
}

inline std::vector<VField> left_invariant_fields(const StratifiedAlgebra& alg) {
  return left_invariant_fields(alg.constants);
}

// ---------------------------------------------------------------------------
// Dilations and strata-preserving automorphisms
// ---------------------------------------------------------------------------

namespace detail {

inline Rat rat_pow(const Rat& s, int e) {
  Rat acc(1);
  for (int t = 0; t < e; ++t) acc *= s;
  return acc;
}

}  // namespace detail

inline RatMatrix dilation(const StratifiedAlgebra& alg, const Rat& s) {
  if (s == 0) throw std::invalid_argument("dilation: scale must be nonzero");
  RatMatrix D(alg.dim(), alg.dim());
  for (int k = 1; k <= alg.dim(); ++k)
    D(k - 1, k - 1) = detail::rat_pow(s, alg.stratum_of(k));
  return D;
}

inline std::vector<Rat> matrix_column(const RatMatrix& M, int col0) {
  std::vector<Rat> v(static_cast<std::size_t>(M.rows()));
  for (int r = 0; r < M.rows(); ++r) v[static_cast<std::size_t>(r)] = M(r, col0);
  return v;
}

inline bool is_strata_automorphism(const StratifiedAlgebra& alg, const RatMatrix& T) {
  const int n = alg.dim();
  if (T.rows() != n || T.cols() != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (alg.stratum_of(i + 1) != alg.stratum_of(j + 1) && T(i, j) != 0) return false;
  if (det(T) == 0) return false;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      std::vector<Rat> lhs =
          alg.constants.bracket_vectors(matrix_column(T, i - 1), matrix_column(T, j - 1));
      std::vector<Rat> rhs(static_cast<std::size_t>(n), Rat(0));
      for (const auto& [k, c] : alg.constants.bracket(i, j))
        for (int r = 0; r < n; ++r) rhs[static_cast<std::size_t>(r)] += c * T(r, k - 1);
      if (lhs != rhs) return false;
    }
  }
  return true;
}

// Push an invertible map of the first stratum of the free two-generator
// algebra through the Hall bracket tree; by freeness the result is always a
// strata-preserving automorphism of the truncated algebra.
inline RatMatrix extend_free_automorphism(const RatMatrix& A, const HallBasis& basis,
                                          const StructureConstants& sc) {
  if (A.rows() != 2 || A.cols() != 2)
    throw std::invalid_argument("extend_free_automorphism: A must be 2x2");
  if (det(A) == 0) throw SingularInput("extend_free_automorphism: A is singular");
  const int n = basis.dimension();
  std::vector<std::vector<Rat>> img(static_cast<std::size_t>(n));
  for (int g = 1; g <= 2; ++g) {
    img[static_cast<std::size_t>(g) - 1].assign(static_cast<std::size_t>(n), Rat(0));
    img[static_cast<std::size_t>(g) - 1][0] = A(0, g - 1);
    img[static_cast<std::size_t>(g) - 1][1] = A(1, g - 1);
  }
  for (int j = 3; j <= n; ++j) {
    const HallElement& e = basis.at(j);
    img[static_cast<std::size_t>(j) - 1] =
        sc.bracket_vectors(img[static_cast<std::size_t>(e.left) - 1],
                           img[static_cast<std::size_t>(e.right) - 1]);
  }
  RatMatrix T(n, n);
  for (int j = 1; j <= n; ++j)
    for (int r = 0; r < n; ++r) T(r, j - 1) = img[static_cast<std::size_t>(j) - 1][static_cast<std::size_t>(r)];
  return T;
}

inline RatMatrix extend_free_automorphism(const RatMatrix& A, int step,
                                          int max_step = default_max_step()) {
  FreeRealization real = realize(step, max_step);
  return extend_free_automorphism(A, real.basis, structure_constants(real));
}

// ---------------------------------------------------------------------------
// Almost complex structures and compatibility
// ---------------------------------------------------------------------------

struct CRStructure {
  RatMatrix J;     // on the first stratum, square of even size
  RatMatrix gram;  // symmetric positive definite on the first stratum
};

// Standard almost complex structure on a 2m-dimensional first stratum with
// basis ordered X_1..X_m, Y_1..Y_m: J X_j = Y_j, J Y_j = -X_j.
inline RatMatrix standard_J(int m) {
  if (m < 1) throw std::invalid_argument("standard_J: m must be >= 1");
  RatMatrix J(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    J(m + j, j) = Rat(1);
    J(j, m + j) = Rat(-1);
  }
  return J;
}

// Standard alternating form with omega(X_j, Y_j) = +1 in the same basis.
inline RatMatrix standard_omega(int m) {
  if (m < 1) throw std::invalid_argument("standard_omega: m must be >= 1");
  RatMatrix W(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    W(j, m + j) = Rat(1);
    W(m + j, j) = Rat(-1);
  }
  return W;
}

namespace detail {

inline bool is_symmetric(const RatMatrix& M) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = i + 1; j < M.cols(); ++j)
      if (M(i, j) != M(j, i)) return false;
  return true;
}

// Sylvester criterion with exact determinants.
inline bool is_positive_definite(const RatMatrix& M) {
  if (!M.is_square() || !is_symmetric(M)) return false;
  for (int k = 1; k <= M.rows(); ++k) {
    RatMatrix lead(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lead(i, j) = M(i, j);
    if (!(det(lead) > 0)) return false;
  }
  return true;
}

}  // namespace detail

inline void validate_cr_structure(const StratifiedAlgebra& alg, const CRStructure& cr) {
  int d1 = alg.strata_dims[0];
  if (d1 % 2 != 0) throw std::invalid_argument("CRStructure: first stratum has odd dimension");
  if (cr.J.rows() != d1 || cr.J.cols() != d1 || cr.gram.rows() != d1 || cr.gram.cols() != d1)
    throw std::invalid_argument("CRStructure: block size mismatch");
  if (cr.J * cr.J != make_rat(-1) * RatMatrix::identity(d1))
    throw std::invalid_argument("CRStructure: J squared is not minus the identity");
  if (!detail::is_positive_definite(cr.gram))
    throw std::invalid_argument("CRStructure: gram is not symmetric positive definite");
  if (transpose(cr.J) * cr.gram * cr.J != cr.gram)
    throw std::invalid_argument("CRStructure: gram is not J-compatible");
}

namespace detail {

// [u + iv, u' + iv'] componentwise over the complexification.
inline std::vector<CRat> bracket_complex(const StructureConstants& sc, const std::vector<CRat>& a,
                                         const std::vector<CRat>& b) {
  const int n = sc.dim;
  auto part = [&](const std::vector<CRat>& w, bool imag) {
    std::vector<Rat> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
      out[static_cast<std::size_t>(t)] =
          imag ? w[static_cast<std::size_t>(t)].im : w[static_cast<std::size_t>(t)].re;
    return out;
  };
  std::vector<Rat> u = part(a, false), v = part(a, true);
  std::vector<Rat> up = part(b, false), vp = part(b, true);
  std::vector<Rat> re1 = sc.bracket_vectors(u, up);
  std::vector<Rat> re2 = sc.bracket_vectors(v, vp);
  std::vector<Rat> im1 = sc.bracket_vectors(u, vp);
  std::vector<Rat> im2 = sc.bracket_vectors(v, up);
  std::vector<CRat> out(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t)
    out[static_cast<std::size_t>(t)] =
        CRat{re1[static_cast<std::size_t>(t)] - re2[static_cast<std::size_t>(t)],
             im1[static_cast<std::size_t>(t)] + im2[static_cast<std::size_t>(t)]};
  return out;
}

// Full-dimension complex vector e_a - i J e_a (or its conjugate) for the
// first-stratum basis vector a (1-based within the stratum).
inline std::vector<CRat> holomorphic_vector(const StratifiedAlgebra& alg, const RatMatrix& J,
                                            int a, bool conjugate) {
  const int n = alg.dim();
  int d1 = alg.strata_dims[0];
  std::vector<CRat> v(static_cast<std::size_t>(n), CRat{});
  v[static_cast<std::size_t>(a) - 1].re = Rat(1);
  Rat sign = conjugate ? Rat(1) : Rat(-1);
  for (int r = 0; r < d1; ++r) v[static_cast<std::size_t>(r)].im += sign * J(r, a - 1);
  return v;
}

}  // namespace detail

// Direct test of the two compatibility identities on first-stratum basis
// pairs, together with J^2 = -Id.
inline bool check_ac_structure(const StratifiedAlgebra& alg, const RatMatrix& J) {
  int d1 = alg.strata_dims[0];
  if (d1 % 2 != 0) return false;
  if (J.rows() != d1 || J.cols() != d1) return false;
  if (J * J != make_rat(-1) * RatMatrix::identity(d1)) return false;

  const int n = alg.dim();
  auto embed = [&](int a) {  // J e_a as a full-dimension vector
    std::vector<Rat> v(static_cast<std::size_t>(n), Rat(0));
    for (int r = 0; r < d1; ++r) v[static_cast<std::size_t>(r)] = J(r, a - 1);
    return v;
  };
  auto unit = [&](int a) {
    std::vector<Rat> v(static_cast<std::size_t>(n), Rat(0));
    v[static_cast<std::size_t>(a) - 1] = Rat(1);
    return v;
  };
  const StructureConstants& sc = alg.constants;
  for (int a = 1; a <= d1; ++a) {
    for (int b = 1; b <= d1; ++b) {
      std::vector<Rat> ja = embed(a), jb = embed(b);
      if (sc.bracket_vectors(ja, jb) != sc.bracket_vectors(unit(a), unit(b))) return false;
      std::vector<Rat> lhs = sc.bracket_vectors(unit(a), jb);
      std::vector<Rat> rhs = sc.bracket_vectors(ja, unit(b));
      for (auto& x : rhs) x = -x;
      if (lhs != rhs) return false;
    }
  }
  return true;
}

// Equivalent test over the complexification: the span L of e_a - i J e_a is
// an abelian subalgebra (and J^2 = -Id).
inline bool check_ac_structure_complexified(const StratifiedAlgebra& alg, const RatMatrix& J) {
  int d1 = alg.strata_dims[0];
  if (d1 % 2 != 0) return false;
  if (J.rows() != d1 || J.cols() != d1) return false;
  if (J * J != make_rat(-1) * RatMatrix::identity(d1)) return false;
  for (int a = 1; a <= d1; ++a) {
    std::vector<CRat> la = detail::holomorphic_vector(alg, J, a, false);
    for (int b = a + 1; b <= d1; ++b) {
      std::vector<CRat> lb = detail::holomorphic_vector(alg, J, b, false);
      for (const CRat& c : detail::bracket_complex(alg.constants, la, lb))
        if (!(c == CRat{})) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Tightness
// ---------------------------------------------------------------------------

enum class TightClass { None, TwoGenerator, Heisenberg };

struct TightResult {
  bool tight = false;
  TightClass tag = TightClass::None;
};

inline TightResult is_tight(const StratifiedAlgebra& alg) {
  if (alg.step < 2) return {};
  int d1 = alg.strata_dims[0];
  int d2 = alg.strata_dims[1];
  if (d2 != 1) return {};

  if (d1 == 2) {
    // no first-stratum vector may be central: stack the maps v -> [v, e_k]
    // and require full column rank
    const int n = alg.dim();
    RatMatrix M(n * n, d1);
    int row = 0;
    for (int k = 1; k <= n; ++k) {
      for (int a = 1; a <= d1; ++a) {
        std::vector<Rat> ea(static_cast<std::size_t>(n), Rat(0));
        ea[static_cast<std::size_t>(a) - 1] = Rat(1);
        std::vector<Rat> ek(static_cast<std::size_t>(n), Rat(0));
        ek[static_cast<std::size_t>(k) - 1] = Rat(1);
        std::vector<Rat> br = alg.constants.bracket_vectors(ea, ek);
        for (int t = 0; t < n; ++t) M(row + t, a - 1) = br[static_cast<std::size_t>(t)];
      }
      row += n;
    }
    if (rank(M) == d1) return {true, TightClass::TwoGenerator};
    return {};
  }

  if (alg.step == 2) {
    // bracket form on the first stratum with values in the line of stratum 2
    auto [uf, ul] = alg.stratum_range(2);
    (void)ul;
    RatMatrix form(d1, d1);
    for (int a = 1; a <= d1; ++a)
      for (int b = 1; b <= d1; ++b)
        for (const auto& [k, c] : alg.constants.bracket(a, b))
          if (k == uf) form(a - 1, b - 1) = c;
    if (det(form) != 0) return {true, TightClass::Heisenberg};
  }
  return {};
}

struct TightPresentation {
  int m = 0;
  std::vector<int> x_index;  // basis indices playing X_1..X_m
  std::vector<int> y_index;  // basis indices playing Y_1..Y_m
  int u_index = 0;           // basis index playing U
};

// Searches for a presentation witnessed by existing basis vectors: pairs
// (X_j, Y_j) with [X_j, Y_l] = delta_{jl} U and all other first-stratum
// brackets zero. Returns nullopt when the basis at hand does not witness one
// (a change of basis might; this routine reports only exact witnesses).
inline std::optional<TightPresentation> tight_presentation(const StratifiedAlgebra& alg) {
  TightResult tr = is_tight(alg);
  if (!tr.tight) return std::nullopt;
  int d1 = alg.strata_dims[0];
  auto [uf, ul] = alg.stratum_range(2);
  (void)ul;

  // coefficient of U in [e_a, e_b], a, b within the first stratum
  auto pair_coeff = [&](int a, int b) {
    Rat c(0);
    for (const auto& [k, cc] : alg.constants.bracket(a, b))
      if (k == uf) c = cc;
    return c;
  };

  TightPresentation tp;
  tp.u_index = uf;
  std::vector<bool> used(static_cast<std::size_t>(d1) + 1, false);
  for (int a = 1; a <= d1; ++a) {
    if (used[static_cast<std::size_t>(a)]) continue;
    int partner = 0;
    Rat sign(0);
    for (int b = a + 1; b <= d1; ++b) {
      if (used[static_cast<std::size_t>(b)]) continue;
      Rat c = pair_coeff(a, b);
      if (c == 1 || c == -1) {
        partner = b;
        sign = c;
        break;
      }
    }
    if (partner == 0) return std::nullopt;
    used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(partner)] = true;
    if (sign == 1) {
      tp.x_index.push_back(a);
      tp.y_index.push_back(partner);
    } else {
      tp.x_index.push_back(partner);
      tp.y_index.push_back(a);
    }
  }
  tp.m = static_cast<int>(tp.x_index.size());

  // verify the presentation relations exactly
  auto relation = [&](int a, int b, const Rat& expect) {
    for (const auto& [k, c] : alg.constants.bracket(a, b)) {
      if (k != uf) return false;
      if (c != expect) return false;
    }
    return expect == 0 ? alg.constants.bracket(a, b).empty() : true;
  };
  for (int j = 0; j < tp.m; ++j) {
    for (int l = 0; l < tp.m; ++l) {
      int xj = tp.x_index[static_cast<std::size_t>(j)], xl = tp.x_index[static_cast<std::size_t>(l)];
      int yj = tp.y_index[static_cast<std::size_t>(j)], yl = tp.y_index[static_cast<std::size_t>(l)];
      if (j != l && !relation(xj, xl, Rat(0))) return std::nullopt;
      if (j != l && !relation(yj, yl, Rat(0))) return std::nullopt;
      if (!relation(xj, yl, j == l ? Rat(1) : Rat(0))) return std::nullopt;
    }
  }
  return tp;
}

// ---------------------------------------------------------------------------
// Conformal / CR / anti-CR predicates on the first stratum
// ---------------------------------------------------------------------------

inline RatMatrix restrict_to_first_stratum(const StratifiedAlgebra& alg, const RatMatrix& T) {
  int d1 = alg.strata_dims[0];
  if (T.rows() < d1 || T.cols() < d1)
    throw std::invalid_argument("restrict_to_first_stratum: matrix too small");
  RatMatrix B(d1, d1);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d1; ++j) B(i, j) = T(i, j);
  return B;
}

struct ConformalResult {
  bool conformal = false;
  std::optional<Rat> lambda_sq;
};

// Exact test of gram-orthogonality up to scale: T^t gram T = lambda^2 gram
// with lambda^2 > 0.
inline ConformalResult is_conformal(const RatMatrix& T1, const RatMatrix& gram) {
  if (!T1.is_square() || T1.rows() != gram.rows() || !gram.is_square()) return {};
  RatMatrix M = transpose(T1) * gram * T1;
  for (int i = 0; i < gram.rows(); ++i) {
    for (int j = 0; j < gram.cols(); ++j) {
      if (gram(i, j) == 0) continue;
      Rat lambda_sq = M(i, j) / gram(i, j);
      if (!(lambda_sq > 0)) return {};
      if (M == lambda_sq * gram) return {true, lambda_sq};
      return {};
    }
  }
  return {};
}

inline ConformalResult is_conformal(const RatMatrix& T1) {
  return is_conformal(T1, RatMatrix::identity(T1.rows()));
}

inline bool is_cr(const RatMatrix& T1, const RatMatrix& J) { return T1 * J == J * T1; }

inline bool is_anti_cr(const RatMatrix& T1, const RatMatrix& J) {
  return T1 * J == make_rat(-1) * (J * T1);
}

namespace detail {

// Columns e_a - i J e_a (conjugate = false) or e_a + i J e_a (true),
// restricted to the first stratum.
inline CMatrix eigenspace_columns(const RatMatrix& J, bool conjugate) {
  const int d1 = J.rows();
  CMatrix L(d1, d1);
  Rat sign = conjugate ? Rat(1) : Rat(-1);
  for (int a = 0; a < d1; ++a) {
    L(a, a).re = Rat(1);
    for (int r = 0; r < d1; ++r) L(r, a).im += sign * J(r, a);
  }
  return L;
}

inline CMatrix complexify(const RatMatrix& M) {
  CMatrix out(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out(i, j).re = M(i, j);
  return out;
}

// T_C maps the span of src's columns into the span of dst's columns.
inline bool maps_span_into(const CMatrix& T, const CMatrix& src, const CMatrix& dst) {
  for (int c = 0; c < src.cols(); ++c) {
    std::vector<CRat> img(static_cast<std::size_t>(T.rows()), CRat{});
    for (int r = 0; r < T.rows(); ++r) {
      CRat acc{};
      for (int k = 0; k < T.cols(); ++k) acc += T(r, k) * src(k, c);
      img[static_cast<std::size_t>(r)] = acc;
    }
    if (!solve_affine(dst, img).has_value()) return false;
  }
  return true;
}

}  // namespace detail

// Complexified equivalents: T preserves the +i eigenspace L of J, or maps it
// to its conjugate.
inline bool is_cr_complexified(const RatMatrix& T1, const RatMatrix& J) {
  CMatrix L = detail::eigenspace_columns(J, false);
  return detail::maps_span_into(detail::complexify(T1), L, L);
}

inline bool is_anti_cr_complexified(const RatMatrix& T1, const RatMatrix& J) {
  CMatrix L = detail::eigenspace_columns(J, false);
  CMatrix Lbar = detail::eigenspace_columns(J, true);
  return detail::maps_span_into(detail::complexify(T1), L, Lbar);
}

// ---------------------------------------------------------------------------
// Distortion: certified extreme singular values of the gram-symmetrized map
// ---------------------------------------------------------------------------

namespace detail {

using RPoly = std::vector<Rat>;  // coefficients, ascending degree

inline void rp_trim(RPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline Rat rp_eval(const RPoly& p, const Rat& x) {
  Rat acc(0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline RPoly rp_deriv(const RPoly& p) {
  RPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(Rat(static_cast<long long>(i)) * p[i]);
  rp_trim(d);
  return d;
}

inline RPoly rp_rem(RPoly a, const RPoly& b) {
  rp_trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    rp_trim(a);
  }
  return a;
}

inline std::vector<RPoly> sturm_chain(RPoly p) {
  rp_trim(p);
  std::vector<RPoly> chain;
  chain.push_back(p);
  RPoly d = rp_deriv(p);
  if (d.empty()) return chain;
  chain.push_back(d);
  while (true) {
    RPoly r = rp_rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (Rat& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  return chain;
}

inline int sign_variations(const std::vector<RPoly>& chain, const Rat& x) {
  int count = 0;
  int prev = 0;
  for (const RPoly& p : chain) {
    Rat v = rp_eval(p, x);
    int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

// Distinct real roots in the half-open interval (a, b]. With the
// zero-skipping convention the variation count is right-continuous, so the
// formula is valid even when a or b is itself a root.
inline int roots_between(const std::vector<RPoly>& chain, const Rat& a, const Rat& b) {
  return sign_variations(chain, a) - sign_variations(chain, b);
}

// Characteristic polynomial of M, monic, ascending coefficients, by the
// trace recurrence on M(cur + c_k I).
inline RPoly char_poly(const RatMatrix& M) {
  const int n = M.rows();
  RPoly coeffs(static_cast<std::size_t>(n) + 1, Rat(0));
  coeffs[static_cast<std::size_t>(n)] = Rat(1);
  RatMatrix I = RatMatrix::identity(n);
  RatMatrix cur = M;
  for (int k = 1; k <= n; ++k) {
    Rat tr(0);
    for (int i = 0; i < n; ++i) tr += cur(i, i);
    Rat ck = -tr / Rat(k);
    coeffs[static_cast<std::size_t>(n - k)] = ck;
    if (k < n) cur = M * (cur + ck * I);
  }
  return coeffs;
}

struct RootEnclosure {
  Rat lo, hi;  // root lies in (lo, hi]; when exact, lo == hi == root
  bool exact;
};

// Bisect for the largest (want_max) or smallest root of p inside (lo, hi],
// assuming at least one root lies there. Narrows the bracket by the given
// number of halvings or stops early when the root is hit exactly.
inline RootEnclosure bisect_extreme_root(const std::vector<RPoly>& chain, Rat lo, Rat hi,
                                         bool want_max, int halvings) {
  const RPoly& p = chain.front();
  for (int it = 0; it < halvings; ++it) {
    Rat mid = (lo + hi) / 2;
    if (want_max) {
      if (roots_between(chain, mid, hi) > 0)
        lo = mid;  // the largest root is in (mid, hi]
      else if (rp_eval(p, mid) == 0)
        return {mid, mid, true};  // nothing beyond mid and mid itself is a root
      else
        hi = mid;
    } else {
      int k = roots_between(chain, lo, mid);
      if (k == 0)
        lo = mid;  // the smallest root is in (mid, hi]
      else if (k == 1 && rp_eval(p, mid) == 0)
        return {mid, mid, true};  // the only root up to mid is mid itself
      else
        hi = mid;
    }
  }
  return {lo, hi, false};
}

}  // namespace detail

// Certified quasiconformal distortion of an invertible first-stratum map:
// sqrt(mu_max / mu_min) over the exact eigenvalues mu of gram^{-1} T^t gram T.
// Returns exactly 1.0 whenever the exact conformality predicate holds.
inline double distortion(const RatMatrix& T1, const RatMatrix& gram, double tol = 1e-12) {
  if (!T1.is_square() || !gram.is_square() || T1.rows() != gram.rows())
    throw std::invalid_argument("distortion: size mismatch");
  if (!(tol > 0)) throw std::invalid_argument("distortion: tol must be positive");
  if (det(T1) == 0) throw SingularInput("distortion: the map is singular");
  if (is_conformal(T1, gram).conformal) return 1.0;

  auto ginv = inverse(gram);
  if (!ginv) throw SingularInput("distortion: gram is singular");
  RatMatrix M = *ginv * transpose(T1) * gram * T1;
  detail::RPoly p = detail::char_poly(M);
  std::vector<detail::RPoly> chain = detail::sturm_chain(p);

  // Cauchy bound: all roots lie in (0, B); 0 is excluded since det(M) != 0.
  Rat B(1);
  for (const Rat& c : p) {
    Rat a = c < 0 ? -c : c;
    if (a > B) B = a;
  }
  B += 1;

  detail::RootEnclosure emax{Rat(0), B, false};
  detail::RootEnclosure emin{Rat(0), B, false};
  for (int rounds = 0; rounds < 40; ++rounds) {
    if (!emax.exact) emax = detail::bisect_extreme_root(chain, emax.lo, emax.hi, true, 8);
    if (!emin.exact) emin = detail::bisect_extreme_root(chain, emin.lo, emin.hi, false, 8);
    if (emax.exact && emin.exact) return std::sqrt(rat_to_double(emax.hi / emin.hi));
    // keep refining until the brackets separate and the min bracket leaves 0,
    // so the returned value can never collide with the exact conformal case
    if (emin.hi >= emax.lo || emin.lo == 0) continue;
    double outer = std::sqrt(rat_to_double(emax.hi / emin.lo));
    double inner = std::sqrt(rat_to_double(emax.lo / emin.hi));
    if (outer - inner <= tol) return (outer + inner) / 2;
  }
  throw std::runtime_error("distortion: enclosure did not converge");
}

inline double distortion(const RatMatrix& T1, double tol = 1e-12) {
  return distortion(T1, RatMatrix::identity(T1.rows()), tol);
}

// Extend a similitude of the standard alternating form on the first stratum
// of heisenberg(m) (A^t omega A = mu · omega, mu != 0) to the automorphism
// diag(A, mu) of the full algebra.
inline RatMatrix extend_heisenberg_similitude(const RatMatrix& A) {
  if (!A.is_square() || A.rows() % 2 != 0 || A.rows() < 2)
    throw std::invalid_argument("extend_heisenberg_similitude: bad block size");
  int m = A.rows() / 2;
  RatMatrix W = standard_omega(m);
  RatMatrix M = transpose(A) * W * A;
  Rat mu = M(0, m);
  if (mu == 0 || M != mu * W)
    throw std::invalid_argument("extend_heisenberg_similitude: not an omega similitude");
  RatMatrix T(2 * m + 1, 2 * m + 1);
  for (int i = 0; i < 2 * m; ++i)
    for (int j = 0; j < 2 * m; ++j) T(i, j) = A(i, j);
  T(2 * m, 2 * m) = mu;
  return T;
}

// ---------------------------------------------------------------------------
// Direct sums and product automorphisms
// ---------------------------------------------------------------------------

struct DirectSum {
  StratifiedAlgebra sum;
  std::vector<StratifiedAlgebra> factors;
  std::vector<std::vector<int>> global_of;   // global_of[f][local-1] = global index
  std::vector<std::pair<int, int>> origin;   // origin[global-1] = (factor, local)
};

// Global basis ordered stratum-major, then factor-major, then by the factor's
// local order; factors commute.
inline DirectSum direct_sum(std::vector<StratifiedAlgebra> factors) {
  if (factors.empty()) throw std::invalid_argument("direct_sum: no factors");
  DirectSum ds;
  int max_step = 0;
  for (const StratifiedAlgebra& f : factors) max_step = std::max(max_step, f.step);

  int total = 0;
  for (const StratifiedAlgebra& f : factors) total += f.dim();
  ds.global_of.assign(factors.size(), {});
  for (std::size_t f = 0; f < factors.size(); ++f)
    ds.global_of[f].assign(static_cast<std::size_t>(factors[f].dim()), 0);
  ds.origin.assign(static_cast<std::size_t>(total), {0, 0});

  StructureConstants sc;
  sc.dim = total;
  int next = 1;
  std::vector<int> strata_dims(static_cast<std::size_t>(max_step), 0);
  for (int h = 1; h <= max_step; ++h) {
    for (std::size_t f = 0; f < factors.size(); ++f) {
      if (h > factors[f].step) continue;
      auto [first, last] = factors[f].stratum_range(h);
      for (int local = first; local <= last; ++local) {
        ds.global_of[f][static_cast<std::size_t>(local) - 1] = next;
        ds.origin[static_cast<std::size_t>(next) - 1] = {static_cast<int>(f), local};
        sc.stratum_of.push_back(h);
        ++strata_dims[static_cast<std::size_t>(h) - 1];
        ++next;
      }
    }
  }
  for (std::size_t f = 0; f < factors.size(); ++f) {
    for (const auto& [key, terms] : factors[f].constants.table) {
      auto [i, j] = key;
      int gi = ds.global_of[f][static_cast<std::size_t>(i) - 1];
      int gj = ds.global_of[f][static_cast<std::size_t>(j) - 1];
      std::vector<std::pair<int, Rat>> out;
      for (const auto& [k, c] : terms)
        out.emplace_back(ds.global_of[f][static_cast<std::size_t>(k) - 1], c);
      sc.table[{gi, gj}] = std::move(out);
    }
  }

  ds.sum.step = max_step;
  ds.sum.strata_dims = std::move(strata_dims);
  ds.sum.constants = std::move(sc);
  ds.factors = std::move(factors);
  return ds;
}

// The permutation automorphism induced by sigma (0-based factor indices) and
// per-factor strata-preserving isomorphisms isos[f] mapping the class model
// of factor f onto factor f. classes[f] labels the declared isomorphism
// class; sigma must preserve it.
inline RatMatrix perm_automorphism(const DirectSum& ds, const std::vector<int>& sigma,
                                   const std::vector<int>& classes,
                                   const std::vector<RatMatrix>& isos) {
  const std::size_t m = ds.factors.size();
  if (sigma.size() != m || classes.size() != m || isos.size() != m)
    throw std::invalid_argument("perm_automorphism: size mismatch");
  std::vector<bool> hit(m, false);
  for (std::size_t f = 0; f < m; ++f) {
    int s = sigma[f];
    if (s < 0 || s >= static_cast<int>(m) || hit[static_cast<std::size_t>(s)])
      throw std::invalid_argument("perm_automorphism: sigma is not a permutation");
    hit[static_cast<std::size_t>(s)] = true;
    if (classes[f] != classes[static_cast<std::size_t>(s)])
      throw ClassMismatch("perm_automorphism: sigma moves factor " + std::to_string(f) +
                          " across isomorphism classes");
  }
  for (std::size_t f = 0; f < m; ++f) {
    if (!isos[f].is_square() || isos[f].rows() != ds.factors[f].dim())
      throw std::invalid_argument("perm_automorphism: iso block size mismatch");
    if (det(isos[f]) == 0) throw SingularInput("perm_automorphism: iso block is singular");
  }

  const int n = ds.sum.dim();
  RatMatrix T(n, n);
  for (std::size_t f = 0; f < m; ++f) {
    std::size_t g = static_cast<std::size_t>(sigma[f]);
    auto inv = inverse(isos[f]);
    RatMatrix block = isos[g] * *inv;  // factor f -> factor sigma(f), local coords
    const std::vector<int>& src = ds.global_of[f];
    const std::vector<int>& dst = ds.global_of[g];
    if (block.rows() != static_cast<int>(dst.size()) || block.cols() != static_cast<int>(src.size()))
      throw std::invalid_argument("perm_automorphism: factor dimension mismatch under sigma");
    for (std::size_t r = 0; r < dst.size(); ++r)
      for (std::size_t c = 0; c < src.size(); ++c)
        T(dst[r] - 1, src[c] - 1) = block(static_cast<int>(r), static_cast<int>(c));
  }
  if (!is_strata_automorphism(ds.sum, T))
    throw std::invalid_argument(
        "perm_automorphism: the declared isomorphisms do not assemble into an automorphism");
  return T;
}

struct ProductDecomposition {
  std::vector<int> sigma;         // factor j maps onto factor sigma[j], 0-based
  std::vector<RatMatrix> blocks;  // local matrix of T from factor j into factor sigma[j]
};

// Structural analysis of a strata-preserving automorphism of a direct sum:
// finds the factor permutation from image supports and extracts the local
// blocks. Returns nullopt when some factor's image meets more than one
// factor, i.e. T is not product-compatible with this decomposition.
inline std::optional<ProductDecomposition> decompose_product_automorphism(const DirectSum& ds,
                                                                          const RatMatrix& T) {
  const std::size_t m = ds.factors.size();
  const int n = ds.sum.dim();
  if (T.rows() != n || T.cols() != n)
    throw std::invalid_argument("decompose_product_automorphism: size mismatch");

  ProductDecomposition out;
  out.sigma.assign(m, -1);
  std::vector<bool> taken(m, false);
  for (std::size_t f = 0; f < m; ++f) {
    int target = -1;
    for (int gcol : ds.global_of[f]) {
      for (int r = 0; r < n; ++r) {
        if (T(r, gcol - 1) == 0) continue;
        int owner = ds.origin[static_cast<std::size_t>(r)].first;
        if (target < 0) target = owner;
        if (owner != target) return std::nullopt;
      }
    }
    if (target < 0) return std::nullopt;  // zero image: not an automorphism
    if (taken[static_cast<std::size_t>(target)]) return std::nullopt;
    taken[static_cast<std::size_t>(target)] = true;
    out.sigma[f] = target;
  }
  for (std::size_t f = 0; f < m; ++f) {
    const std::vector<int>& src = ds.global_of[f];
    const std::vector<int>& dst = ds.global_of[static_cast<std::size_t>(out.sigma[f])];
    RatMatrix block(static_cast<int>(dst.size()), static_cast<int>(src.size()));
    for (std::size_t r = 0; r < dst.size(); ++r)
      for (std::size_t c = 0; c < src.size(); ++c)
        block(static_cast<int>(r), static_cast<int>(c)) = T(dst[r] - 1, src[c] - 1);
    out.blocks.push_back(std::move(block));
  }
  return out;
}

// Rebuild the global matrix described by a decomposition; inverse of the
// extraction above, useful for exactness round trips.
inline RatMatrix assemble_product_automorphism(const DirectSum& ds,
                                               const ProductDecomposition& dec) {
  const int n = ds.sum.dim();
  RatMatrix T(n, n);
  for (std::size_t f = 0; f < ds.factors.size(); ++f) {
    const std::vector<int>& src = ds.global_of[f];
    const std::vector<int>& dst = ds.global_of[static_cast<std::size_t>(dec.sigma[f])];
    const RatMatrix& block = dec.blocks[f];
    for (std::size_t r = 0; r < dst.size(); ++r)
      for (std::size_t c = 0; c < src.size(); ++c)
        T(dst[r] - 1, src[c] - 1) = block(static_cast<int>(r), static_cast<int>(c));
  }
  return T;
}

}  // namespace carnot
