#pragma once

// Polynomial vector-field realization of the free nilpotent Lie algebra on
// two generators: X_1 = d_1 and X_2 = d_2 + sum_{j>=3} p_j d_j, with every
// further basis field obtained by bracketing along the Hall tree. Structure
// constants are extracted exactly by expanding each pairwise bracket in the
// basis fields via a rational linear solve. The module also computes the
// series coefficients c_k with sum_{i+j=k} ((-1)^i/(i+1)!) c_j = [k = 0]
// and uses them to build left-invariant fields from structure constants
// (the ad-series in exponential coordinates terminates by nilpotency).

#include "carnot/hall.hpp"
#include "carnot/matrix.hpp"
#include "carnot/vfield.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

struct ExpansionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FreeRealization {
  int step = 0;
  HallBasis basis;
  std::vector<VField> fields;  // fields[j-1] realizes X_j

  const VField& field(int j) const {
    if (j < 1 || j > static_cast<int>(fields.size()))
      throw std::out_of_range("FreeRealization: index out of range");
    return fields[static_cast<std::size_t>(j) - 1];
  }
};

// The two generator fields alone; enough for nilpotency experiments where
// materializing every bracket field would be wasteful.
inline std::pair<VField, VField> generator_fields(const HallBasis& basis) {
  VField x1 = VField::partial_op(basis.ring, 1);
  VField x2 = VField::partial_op(basis.ring, 2);
  for (int j = 3; j <= basis.dimension(); ++j) x2.set_coeff(j, *basis.at(j).monomial);
  return {std::move(x1), std::move(x2)};
}

inline FreeRealization realize(int step, int max_step = default_max_step()) {
  FreeRealization real;
  real.step = step;
  real.basis = generate_hall_basis(step, max_step);
  auto [x1, x2] = generator_fields(real.basis);
  real.fields.push_back(std::move(x1));
  real.fields.push_back(std::move(x2));
  for (int j = 3; j <= real.basis.dimension(); ++j) {
    const HallElement& e = real.basis.at(j);
    real.fields.push_back(vf_bracket(real.field(e.left), real.field(e.right)));
  }
  return real;
}

struct StructureConstants {
  int dim = 0;
  std::vector<int> stratum_of;  // stratum_of[k-1] = stratum (height) of basis vector k
  // table keys are (i, j) with i < j; [X_i, X_j] = sum of coeff * X_k over the
  // stored (k, coeff) entries. Pairs bracketing to zero are absent.
  std::map<std::pair<int, int>, std::vector<std::pair<int, Rat>>> table;

  int step() const {
    int s = 0;
    for (int h : stratum_of) s = std::max(s, h);
    return s;
  }

  std::vector<int> strata_dims() const {
    std::vector<int> dims(static_cast<std::size_t>(step()), 0);
    for (int h : stratum_of) ++dims[static_cast<std::size_t>(h) - 1];
    return dims;
  }

  // [X_i, X_j] for any pair, antisymmetry applied.
  std::vector<std::pair<int, Rat>> bracket(int i, int j) const {
    if (i < 1 || j < 1 || i > dim || j > dim)
      throw std::out_of_range("StructureConstants: index out of range");
    if (i == j) return {};
    bool flip = i > j;
    auto it = table.find(flip ? std::make_pair(j, i) : std::make_pair(i, j));
    if (it == table.end()) return {};
    std::vector<std::pair<int, Rat>> out = it->second;
    if (flip)
      for (auto& [k, c] : out) c = -c;
    return out;
  }

  // [u, v] for dense coordinate vectors.
  std::vector<Rat> bracket_vectors(const std::vector<Rat>& u, const std::vector<Rat>& v) const {
    if (static_cast<int>(u.size()) != dim || static_cast<int>(v.size()) != dim)
      throw std::invalid_argument("StructureConstants: vector length mismatch");
    std::vector<Rat> out(static_cast<std::size_t>(dim), Rat(0));
    for (const auto& [key, terms] : table) {
      auto [i, j] = key;
      Rat c = u[static_cast<std::size_t>(i) - 1] * v[static_cast<std::size_t>(j) - 1] -
              u[static_cast<std::size_t>(j) - 1] * v[static_cast<std::size_t>(i) - 1];
      if (c == 0) continue;
      for (const auto& [k, coeff] : terms) out[static_cast<std::size_t>(k) - 1] += c * coeff;
    }
    return out;
  }
};

// Expand w as a rational combination of fields[c-1] for c in candidates, by
// matching polynomial coefficients direction by direction. Returns the
// coordinate vector (aligned with candidates) or nullopt when w is not in
// the span. Throws when the candidate fields are linearly dependent, since
// the expansion would not be well defined.
inline std::optional<std::vector<Rat>> expand_in_fields(const std::vector<VField>& fields,
                                                        const std::vector<int>& candidates,
                                                        const VField& w) {
  const int n = w.ring()->nvars;
  // rows are (direction, monomial) pairs from the union of supports
  std::map<std::pair<int, std::vector<int>>, int> row_of;
  auto note_support = [&](const VField& f) {
    for (int dir = 1; dir <= n; ++dir)
      for (const auto& term : f.coeff(dir).terms())
        row_of.emplace(std::make_pair(dir, term.first.to_dense(n)),
                       static_cast<int>(row_of.size()));
  };
  note_support(w);
  for (int c : candidates) note_support(fields.at(static_cast<std::size_t>(c) - 1));

  RatMatrix A(static_cast<int>(row_of.size()), static_cast<int>(candidates.size()));
  std::vector<Rat> b(row_of.size(), Rat(0));
  for (const auto& [key, row] : row_of)
    b[static_cast<std::size_t>(row)] = w.coeff(key.first).coeff(Monomial::from_dense(key.second));
  for (std::size_t col = 0; col < candidates.size(); ++col) {
    const VField& f = fields.at(static_cast<std::size_t>(candidates[col]) - 1);
    for (const auto& [key, row] : row_of)
      A(row, static_cast<int>(col)) = f.coeff(key.first).coeff(Monomial::from_dense(key.second));
  }

  auto sol = solve_affine(A, b);
  if (!sol) return std::nullopt;
  if (!sol->nullbasis.empty())
    throw ExpansionFailure("expand_in_fields: candidate fields are linearly dependent");
  return sol->particular;
}

inline StructureConstants structure_constants(const FreeRealization& real) {
  const HallBasis& basis = real.basis;
  const int n = basis.dimension();
  StructureConstants sc;
  sc.dim = n;
  for (int k = 1; k <= n; ++k) sc.stratum_of.push_back(basis.at(k).height);

  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      VField w = vf_bracket(real.field(i), real.field(j));
      int h = basis.at(i).height + basis.at(j).height;
      if (h > basis.step) {
        if (!w.is_zero())
          throw ExpansionFailure("bracket of combined height " + std::to_string(h) +
                                 " did not vanish for pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
        continue;
      }
      if (w.is_zero()) continue;

      auto [first, last] = basis.height_range(h);
      std::vector<int> candidates;
      for (int k = first; k <= last; ++k) candidates.push_back(k);

      auto coords = expand_in_fields(real.fields, candidates, w);
      if (!coords)
        throw ExpansionFailure("bracket of pair (" + std::to_string(i) + "," + std::to_string(j) +
                               ") is not in the span of the height-" + std::to_string(h) +
                               " basis fields");
      std::vector<std::pair<int, Rat>> terms;
      for (std::size_t col = 0; col < candidates.size(); ++col)
        if ((*coords)[col] != 0) terms.emplace_back(candidates[col], (*coords)[col]);
      if (!terms.empty()) sc.table[{i, j}] = std::move(terms);
    }
  }
  return sc;
}

struct SeriesCoeffs {
  std::vector<Rat> values;  // c_0, c_1, ...
};

inline SeriesCoeffs bch_coefficients(int count) {
  if (count < 0) throw std::invalid_argument("bch_coefficients: count must be >= 0");
  SeriesCoeffs series;
  series.values.reserve(static_cast<std::size_t>(count) + 1);
  series.values.push_back(Rat(1));
  for (int k = 1; k <= count; ++k) {
    Rat acc(0);
    for (int i = 1; i <= k; ++i) {
      Rat term = make_rat(Int(i % 2 == 0 ? 1 : -1), factorial(i + 1));
      acc += term * series.values[static_cast<std::size_t>(k - i)];
    }
    series.values.push_back(-acc);
  }
  return series;
}

// Left-invariant fields in exponential coordinates of the graded algebra
// described by sc: the d_j coefficient of the field for basis vector T is the
// j-th component of sum_k c_k ad^k(u . U) T with symbolic coordinates u.
inline std::vector<VField> left_invariant_fields(const StructureConstants& sc) {
  const int n = sc.dim;
  PolyRingPtr ring = make_ring(n, sc.stratum_of);
  SeriesCoeffs series = bch_coefficients(std::max(sc.step() - 1, 0));

  std::vector<VField> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int t = 1; t <= n; ++t) {
    // cur holds ad^k(u . U) e_t as polynomial coordinates
    std::vector<Poly> cur(static_cast<std::size_t>(n), Poly::zero(ring));
    cur[static_cast<std::size_t>(t) - 1] = Poly::constant(ring, Rat(1));
    std::vector<Poly> total = cur;  // c_0 = 1

    for (int k = 1; k < static_cast<int>(series.values.size()); ++k) {
      std::vector<Poly> next(static_cast<std::size_t>(n), Poly::zero(ring));
      for (const auto& [key, terms] : sc.table) {
        auto [i, j] = key;
        // [u_i U_i, cur_j U_j] + [u_j U_j, cur_i U_i]
        Poly c = Poly::variable(ring, i) * cur[static_cast<std::size_t>(j) - 1] -
                 Poly::variable(ring, j) * cur[static_cast<std::size_t>(i) - 1];
        if (c.is_zero()) continue;
        for (const auto& [target, coeff] : terms)
          next[static_cast<std::size_t>(target) - 1] += coeff * c;
      }
      cur = std::move(next);
      bool all_zero = true;
      for (const Poly& p : cur)
        if (!p.is_zero()) {
          all_zero = false;
          break;
        }
      if (all_zero) break;
      const Rat& ck = series.values[static_cast<std::size_t>(k)];
      if (ck == 0) continue;
      for (int j = 1; j <= n; ++j)
        total[static_cast<std::size_t>(j) - 1] += ck * cur[static_cast<std::size_t>(j) - 1];
    }

    VField f(ring);
    for (int j = 1; j <= n; ++j) f.set_coeff(j, total[static_cast<std::size_t>(j) - 1]);
    out.push_back(std::move(f));
  }
  return out;
}

// Left-normed bracket word [[ ... [g_{w_1}, g_{w_2}], ... ], g_{w_L}] over the
// given fields, with 1-based letters indexing into gens.
inline VField bracket_word(const std::vector<VField>& gens, const std::vector<int>& word) {
  if (word.empty()) throw std::invalid_argument("bracket_word: empty word");
  auto pick = [&](int letter) -> const VField& {
    if (letter < 1 || letter > static_cast<int>(gens.size()))
      throw std::invalid_argument("bracket_word: letter out of range");
    return gens[static_cast<std::size_t>(letter) - 1];
  };
  VField acc = pick(word[0]);
  for (std::size_t t = 1; t < word.size(); ++t) acc = vf_bracket(acc, pick(word[t]));
  return acc;
}

}  // namespace carnot
