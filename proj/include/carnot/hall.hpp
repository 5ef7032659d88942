#pragma once

// Hall basis of the free nilpotent Lie algebra on two generators, truncated
// at a given step. Elements are iterated brackets [X_a, X_b] admissible under
// the two Hall conditions (a > b in the basis order; and if a = [z, w] then
// b >= w). New brackets of each length are enumerated ordered by (length of
// the right factor ascending, left index ascending, right index ascending);
// that ordering pins the canonical numbering X_1, X_2, X_3 = [X_2, X_1], ...
//
// Every non-generator carries its decomposed-bracket vector (2,1,i_2,...,i_m),
// the multi-index I(j) counting the tail entries, the bracket count d(j) = m,
// and the monomial p_j = (-1)^{d(j)} / I(j)!  * x^{I(j)}, which is the
// coefficient of d/dx_j in the second generator's vector-field realization.

#include "carnot/poly.hpp"

#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

struct HallElement {
  int index = 0;   // 1-based canonical position
  int height = 0;  // bracket word length = stratum
  int left = 0;    // factor indices; 0 for the two generators
  int right = 0;
  std::vector<int> vec;          // (2,1,i_2,...,i_m); empty for generators
  std::vector<int> multi_index;  // dense I(j) over all basis indices; empty for generators
  int bracket_count = 0;         // d(j)
  std::optional<Poly> monomial;  // p_j; absent for generators

  bool is_generator() const { return left == 0; }
};

class HallBasis {
 public:
  int step = 0;
  std::vector<HallElement> elements;  // elements[i] is X_{i+1}
  std::vector<int> stratum_offsets;   // stratum_offsets[h-1] = first 1-based index of height h
  PolyRingPtr ring;                   // nvars = dimension, weight of x_k = height of X_k

  int dimension() const { return static_cast<int>(elements.size()); }

  const HallElement& at(int j) const {
    if (j < 1 || j > dimension()) throw std::out_of_range("HallBasis: index out of range");
    return elements[static_cast<std::size_t>(j) - 1];
  }

  int height_of(int j) const { return at(j).height; }

  // [first, last] 1-based inclusive range of indices with the given height.
  std::pair<int, int> height_range(int h) const {
    if (h < 1 || h > step) throw std::out_of_range("HallBasis: bad height");
    int first = stratum_offsets[static_cast<std::size_t>(h) - 1];
    int last = h == step ? dimension() : stratum_offsets[static_cast<std::size_t>(h)] - 1;
    return {first, last};
  }

  // 0 when the decomposed-bracket vector is not in the basis.
  int index_of_vector(const std::vector<int>& v) const {
    auto it = by_vector_.find(v);
    return it == by_vector_.end() ? 0 : it->second;
  }

  // 0 when no p_j has the given dense exponent vector. Distinct basis
  // elements have distinct exponent vectors, so the lookup is well defined.
  int index_by_monomial_exps(const std::vector<int>& exps) const {
    auto it = by_exps_.find(exps);
    return it == by_exps_.end() ? 0 : it->second;
  }

  friend HallBasis generate_hall_basis(int step, int max_step);

 private:
  std::map<std::vector<int>, int> by_vector_;
  std::map<std::vector<int>, int> by_exps_;
};

// Step cap, overridable through the environment so deep experiments stay an
// explicit opt-in rather than an accidental memory grab.
inline int default_max_step() {
  if (const char* env = std::getenv("CARNOT_MAX_STEP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 64) return static_cast<int>(v);
  }
  return 10;
}

inline HallBasis generate_hall_basis(int step, int max_step = default_max_step()) {
  if (step < 1) throw std::invalid_argument("generate_hall_basis: step must be >= 1");
  if (step > max_step)
    throw std::invalid_argument("generate_hall_basis: step " + std::to_string(step) +
                                " exceeds the configured cap " + std::to_string(max_step));

  HallBasis basis;
  basis.step = step;
  auto& elems = basis.elements;
  elems.push_back({1, 1});
  elems.push_back({2, 1});
  basis.stratum_offsets.assign(1, 1);

  for (int len = 2; len <= step; ++len) {
    basis.stratum_offsets.push_back(static_cast<int>(elems.size()) + 1);
    for (int lb = 1; lb <= len - lb; ++lb) {
      int la = len - lb;
      // snapshot the index ranges before appending new elements of this length
      auto indices_of_height = [&](int h) {
        std::vector<int> out;
        for (const auto& e : elems)
          if (e.height == h) out.push_back(e.index);
        return out;
      };
      const std::vector<int> as = indices_of_height(la);
      const std::vector<int> bs = indices_of_height(lb);
      for (int a : as) {
        for (int b : bs) {
          if (la == lb && a <= b) continue;  // first Hall condition within a stratum
          const HallElement& A = elems[static_cast<std::size_t>(a) - 1];
          if (!A.is_generator() && b < A.right) continue;  // second Hall condition
          HallElement e;
          e.index = static_cast<int>(elems.size()) + 1;
          e.height = len;
          e.left = a;
          e.right = b;
          if (A.is_generator())
            e.vec = {a, b};
          else {
            e.vec = A.vec;
            e.vec.push_back(b);
          }
          elems.push_back(std::move(e));
        }
      }
    }
  }

  const int n = basis.dimension();
  std::vector<int> weights;
  weights.reserve(static_cast<std::size_t>(n));
  for (const auto& e : elems) weights.push_back(e.height);
  basis.ring = make_ring(n, std::move(weights));

  for (auto& e : elems) {
    if (e.is_generator()) continue;
    e.bracket_count = static_cast<int>(e.vec.size()) - 1;
    e.multi_index.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t t = 1; t < e.vec.size(); ++t)
      ++e.multi_index[static_cast<std::size_t>(e.vec[t]) - 1];
    Int fact = 1;
    for (int c : e.multi_index) fact *= factorial(c);
    Rat coeff = make_rat(Int(e.bracket_count % 2 == 0 ? 1 : -1), fact);
    e.monomial = Poly::monomial(basis.ring, Monomial::from_dense(e.multi_index), coeff);
    basis.by_vector_[e.vec] = e.index;
    basis.by_exps_[e.multi_index] = e.index;
  }
  return basis;
}

inline std::vector<std::pair<std::vector<int>, Poly>> monomial_table(const HallBasis& basis) {
  std::vector<std::pair<std::vector<int>, Poly>> out;
  for (const auto& e : basis.elements)
    if (!e.is_generator()) out.emplace_back(e.vec, *e.monomial);
  return out;
}

namespace detail {

inline std::string vector_to_text(const std::vector<int>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace detail

inline std::string hall_text(const HallBasis& basis) {
  std::ostringstream os;
  os << "Hall basis, step " << basis.step << ", dimension " << basis.dimension() << "\n";
  for (const auto& e : basis.elements) {
    os << "X_" << e.index << "  h=" << e.height;
    if (e.is_generator()) {
      os << "  generator\n";
      continue;
    }
    os << "  [X_" << e.left << ",X_" << e.right << "]"
       << "  vector=" << detail::vector_to_text(e.vec) << "  d=" << e.bracket_count
       << "  p_" << e.index << " = " << poly_to_text(*e.monomial) << "\n";
  }
  return os.str();
}

inline std::string hall_latex(const HallBasis& basis) {
  std::ostringstream os;
  os << "\\begin{table}\n\\centering\n\\begin{tabular}{c|l|l}\n"
     << "Step & Vectors & Monomials \\\\\n\\hline\n";
  for (int h = 2; h <= basis.step; ++h) {
    auto [first, last] = basis.height_range(h);
    os << h << " & $";
    for (int j = first; j <= last; ++j)
      os << (j > first ? ",\\; " : "") << detail::vector_to_text(basis.at(j).vec);
    os << "$ & $";
    for (int j = first; j <= last; ++j) {
      os << (j > first ? ",\\; " : "") << "p_{" << j
         << "}=" << poly_to_latex(*basis.at(j).monomial);
    }
    os << "$ \\\\\n";
  }
  os << "\\end{tabular}\n\\caption{Monomials up to step " << basis.step << ".}\n\\end{table}\n";
  return os.str();
}

}  // namespace carnot
