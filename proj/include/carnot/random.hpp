#pragma once

// Seeded random generators for the property suites: invertible and
// symmetric integer matrices, symplectic and similitude matrices built from
// elementary symplectic factors, rational rotations from Pythagorean
// triples, injected conformal first-stratum blocks (plain and conjugated),
// and valid/invalid almost-complex-structure candidates. Everything is
// driven by an explicit std::mt19937_64 so reports are reproducible.

#include <random>
#include <stdexcept>
#include <vector>

#include "carnot/matrix.hpp"
#include "carnot/stratified.hpp"

namespace carnot {

using Rng = std::mt19937_64;

inline int random_int(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(rng);
}

inline Rat random_nonzero_rat(Rng& rng, int bound = 3) {
  Rat r;
  do {
    r = make_rat(random_int(rng, -bound, bound), random_int(rng, 1, bound));
  } while (r == 0);
  return r;
}

// Integer-entry matrix with entries in [-bound, bound].
inline RatMatrix random_matrix(Rng& rng, int rows, int cols, int bound = 3) {
  RatMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = make_rat(random_int(rng, -bound, bound));
  return M;
}

inline RatMatrix random_invertible(Rng& rng, int n, int bound = 3) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RatMatrix M = random_matrix(rng, n, n, bound);
    if (det(M) != 0) return M;
  }
  throw std::runtime_error("random_invertible: no invertible sample found");
}

inline RatMatrix random_symmetric(Rng& rng, int n, int bound = 2) {
  RatMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      M(i, j) = make_rat(random_int(rng, -bound, bound));
      M(j, i) = M(i, j);
    }
  return M;
}

// A symplectic matrix for the form with Omega(X_j, Y_j) = 1, assembled from
// the elementary generators [[I,B],[0,I]], [[I,0],[C,I]] (B, C symmetric)
// and [[P,0],[0,(P^t)^-1]] (P invertible).
inline RatMatrix random_symplectic(Rng& rng, int m, int factors = 4) {
  int n = 2 * m;
  RatMatrix S = RatMatrix::identity(n);
  for (int f = 0; f < factors; ++f) {
    RatMatrix G = RatMatrix::identity(n);
    switch (random_int(rng, 0, 2)) {
      case 0: {
        RatMatrix B = random_symmetric(rng, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) G(i, m + j) = B(i, j);
        break;
      }
      case 1: {
        RatMatrix C = random_symmetric(rng, m);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) G(m + i, j) = C(i, j);
        break;
      }
      default: {
        RatMatrix P = random_invertible(rng, m, 2);
        RatMatrix Q = *inverse(P.transpose());
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            G(i, j) = P(i, j);
            G(m + i, m + j) = Q(i, j);
          }
        break;
      }
    }
    S = S * G;
  }
  return S;
}

// A symplectic similitude: symplectic times the mu-twist diag(mu I, I),
// which scales the form by mu (mu != 0, random sign).
inline RatMatrix random_similitude(Rng& rng, int m, int factors = 4) {
  RatMatrix S = random_symplectic(rng, m, factors);
  Rat mu = random_nonzero_rat(rng, 2);
  RatMatrix T(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < 2 * m; ++j) {
      T(i, j) = mu * S(i, j);
      T(m + i, j) = S(m + i, j);
    }
  return T;
}

// A rational rotation [[a,-b],[b,a]]/c from a Pythagorean triple, with a
// random quadrant choice.
inline RatMatrix random_rotation2(Rng& rng) {
  static const int triples[][3] = {{1, 0, 1},   {3, 4, 5},   {5, 12, 13}, {8, 15, 17},
                                   {7, 24, 25}, {20, 21, 29}, {9, 40, 41}, {12, 35, 37},
                                   {28, 45, 53}, {33, 56, 65}};
  const int* t = triples[random_int(rng, 0, 9)];
  Rat c = make_rat(t[0], t[2]);
  Rat s = make_rat(t[1], t[2]);
  if (random_int(rng, 0, 1)) std::swap(c, s);
  if (random_int(rng, 0, 1)) s = -s;
  if (random_int(rng, 0, 1)) c = -c;
  return RatMatrix::from_rows({{c, -s}, {s, c}});
}

// A conformal block for the standard J on a first stratum of dimension 2m:
// one rational rotation per (X_j, Y_j) plane, all scaled by the same
// nonzero factor. Plain blocks commute with J; conjugated ones (Y_j -> -Y_j
// applied first) anticommute.
inline RatMatrix random_conformal_block(Rng& rng, int m, bool conjugated) {
  Rat lambda = random_nonzero_rat(rng, 3);
  RatMatrix T(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    RatMatrix R = random_rotation2(rng);
    T(j, j) = lambda * R(0, 0);
    T(j, m + j) = lambda * R(0, 1);
    T(m + j, j) = lambda * R(1, 0);
    T(m + j, m + j) = lambda * R(1, 1);
  }
  if (conjugated)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < 2 * m; ++i) T(i, m + j) = -T(i, m + j);
  return T;
}

// Valid almost-complex candidate on a 2m-dimensional Heisenberg first
// stratum: a symplectic conjugate of the standard J (squares to -Id and
// preserves the form).
inline RatMatrix random_valid_J_heisenberg(Rng& rng, int m) {
  RatMatrix S = random_symplectic(rng, m, 3);
  return *inverse(S) * standard_J(m) * S;
}

// Valid candidate on a two-generator first stratum: any traceless 2x2 with
// determinant 1 squares to -Id, and the single-pair bracket compatibility
// holds automatically because such a matrix has determinant 1.
inline RatMatrix random_valid_J_two_generator(Rng& rng) {
  Rat a = make_rat(random_int(rng, -2, 2), random_int(rng, 1, 2));
  Rat b = random_nonzero_rat(rng, 2);
  Rat c = -(make_rat(1) + a * a) / b;
  return RatMatrix::from_rows({{a, b}, {c, -a}});
}

}  // namespace carnot
