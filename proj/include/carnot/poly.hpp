#pragma once

// Sparse multivariate polynomials over Rat with per-variable weights.
// Variables are 1-based (x_1 .. x_nvars); the weight of x_k is the height of
// the k-th basis element in every ring this library builds, so weighted
// degrees are dilation degrees. Terms live in a fixed canonical order:
// graded by weighted degree, then at the first variable index where two
// monomials differ the larger exponent sorts first. Serialization walks the
// term map, so output is byte-stable.

#include "carnot/rational.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

struct PolyRing {
  int nvars = 0;
  std::vector<int> weights;  // weights[k-1] = weight of x_k, all positive
};

using PolyRingPtr = std::shared_ptr<const PolyRing>;

inline PolyRingPtr make_ring(int nvars, std::vector<int> weights) {
  if (nvars < 0) throw std::invalid_argument("make_ring: negative nvars");
  if (static_cast<int>(weights.size()) != nvars)
    throw std::invalid_argument("make_ring: weights size mismatch");
  for (int w : weights)
    if (w <= 0) throw std::invalid_argument("make_ring: weights must be positive");
  return std::make_shared<const PolyRing>(PolyRing{nvars, std::move(weights)});
}

inline PolyRingPtr make_ring(int nvars) {
  return make_ring(nvars, std::vector<int>(static_cast<std::size_t>(nvars), 1));
}

inline bool same_ring(const PolyRing& a, const PolyRing& b) {
  return a.nvars == b.nvars && a.weights == b.weights;
}

// A monomial: sorted (variable, exponent) pairs with positive exponents.
class Monomial {
 public:
  Monomial() = default;  // the constant monomial 1

  static Monomial var(int k, int e = 1) {
    if (k < 1) throw std::invalid_argument("Monomial::var: variables are 1-based");
    Monomial m;
    if (e < 0) throw std::invalid_argument("Monomial::var: negative exponent");
    if (e > 0) m.e_.push_back({k, e});
    return m;
  }

  static Monomial from_dense(const std::vector<int>& exps) {
    Monomial m;
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] < 0) throw std::invalid_argument("Monomial: negative exponent");
      if (exps[i] > 0) m.e_.push_back({static_cast<int>(i) + 1, exps[i]});
    }
    return m;
  }

  std::vector<int> to_dense(int nvars) const {
    std::vector<int> d(static_cast<std::size_t>(nvars), 0);
    for (const auto& [v, e] : e_) {
      if (v > nvars) throw std::out_of_range("Monomial::to_dense: variable out of range");
      d[static_cast<std::size_t>(v) - 1] = e;
    }
    return d;
  }

  int exponent(int k) const {
    for (const auto& [v, e] : e_)
      if (v == k) return e;
    return 0;
  }

  bool is_one() const { return e_.empty(); }
  int max_var() const { return e_.empty() ? 0 : e_.back().first; }
  int min_var() const { return e_.empty() ? 0 : e_.front().first; }

  int total_degree() const {
    int d = 0;
    for (const auto& [v, e] : e_) d += e;
    return d;
  }

  long long weighted_degree(const std::vector<int>& weights) const {
    long long d = 0;
    for (const auto& [v, e] : e_) {
      if (v > static_cast<int>(weights.size()))
        throw std::out_of_range("Monomial: variable beyond ring");
      d += static_cast<long long>(e) * weights[static_cast<std::size_t>(v) - 1];
    }
    return d;
  }

  Monomial times(const Monomial& o) const {
    Monomial r;
    auto ia = e_.begin(), ib = o.e_.begin();
    while (ia != e_.end() || ib != o.e_.end()) {
      if (ib == o.e_.end() || (ia != e_.end() && ia->first < ib->first))
        r.e_.push_back(*ia++);
      else if (ia == e_.end() || ib->first < ia->first)
        r.e_.push_back(*ib++);
      else {
        r.e_.push_back({ia->first, ia->second + ib->second});
        ++ia;
        ++ib;
      }
    }
    return r;
  }

  // The monomial divided by x_k once; pre: exponent(k) > 0.
  Monomial with_decrement(int k) const {
    Monomial r;
    bool found = false;
    for (const auto& [v, e] : e_) {
      if (v == k) {
        found = true;
        if (e > 1) r.e_.push_back({v, e - 1});
      } else {
        r.e_.push_back({v, e});
      }
    }
    if (!found) throw std::invalid_argument("Monomial::with_decrement: exponent is zero");
    return r;
  }

  const std::vector<std::pair<int, int>>& entries() const { return e_; }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

 private:
  std::vector<std::pair<int, int>> e_;
};

// Canonical order: graded by weighted degree, then scan variables in
// ascending index; at the first variable where exponents differ, the larger
// exponent sorts first (so x1^2 < x1*x2 < x2^2).
inline int mono_cmp(const Monomial& a, const Monomial& b, const std::vector<int>& weights) {
  long long da = a.weighted_degree(weights);
  long long db = b.weighted_degree(weights);
  if (da != db) return da < db ? -1 : 1;
  auto ia = a.entries().begin(), ea = a.entries().end();
  auto ib = b.entries().begin(), eb = b.entries().end();
  while (ia != ea || ib != eb) {
    int va = ia != ea ? ia->first : std::numeric_limits<int>::max();
    int vb = ib != eb ? ib->first : std::numeric_limits<int>::max();
    if (va < vb) return -1;  // a has a positive exponent where b has zero
    if (vb < va) return 1;
    if (ia->second != ib->second) return ia->second > ib->second ? -1 : 1;
    ++ia;
    ++ib;
  }
  return 0;
}

struct MonoLess {
  const PolyRing* ring = nullptr;
  bool operator()(const Monomial& a, const Monomial& b) const {
    return mono_cmp(a, b, ring->weights) < 0;
  }
};

class Poly {
 public:
  using TermMap = std::map<Monomial, Rat, MonoLess>;

  explicit Poly(PolyRingPtr ring)
      : ring_(std::move(ring)), terms_(MonoLess{ring_.get()}) {
    if (!ring_) throw std::invalid_argument("Poly: null ring");
  }

  static Poly zero(PolyRingPtr ring) { return Poly(std::move(ring)); }

  static Poly constant(PolyRingPtr ring, const Rat& c) {
    Poly p(std::move(ring));
    p.add_term(Monomial(), c);
    return p;
  }

  static Poly variable(PolyRingPtr ring, int k) {
    return monomial(std::move(ring), Monomial::var(k), Rat(1));
  }

  static Poly monomial(PolyRingPtr ring, const Monomial& m, const Rat& c) {
    Poly p(std::move(ring));
    if (m.max_var() > p.nvars())
      throw std::invalid_argument("Poly::monomial: variable beyond ring");
    p.add_term(m, c);
    return p;
  }

  const PolyRingPtr& ring() const { return ring_; }
  int nvars() const { return ring_->nvars; }
  const std::vector<int>& weights() const { return ring_->weights; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  Rat coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rat(0) : it->second;
  }
  Rat constant_term() const { return coeff(Monomial()); }

  void add_term(const Monomial& m, const Rat& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    if (a.terms_.size() != b.terms_.size()) return false;
    return std::equal(a.terms_.begin(), a.terms_.end(), b.terms_.begin());
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly operator-() const {
    Poly r(ring_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_compatible(b);
    Poly r(a.ring_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma.times(mb), ca * cb);
    return r;
  }
  friend Poly operator*(const Rat& s, const Poly& p) {
    Poly r(p.ring_);
    if (s == 0) return r;
    for (const auto& [m, c] : p.terms_) r.terms_.emplace(m, s * c);
    return r;
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly partial(int k) const {
    if (k < 1 || k > nvars()) throw std::invalid_argument("Poly::partial: bad variable");
    Poly r(ring_);
    for (const auto& [m, c] : terms_) {
      int e = m.exponent(k);
      if (e > 0) r.add_term(m.with_decrement(k), c * e);
    }
    return r;
  }

  // Weighted degree if homogeneous, std::nullopt if not; the zero polynomial
  // has no degree and is a usage error here.
  std::optional<long long> weighted_degree() const {
    if (terms_.empty())
      throw std::invalid_argument("weighted_degree: zero polynomial");
    long long d = terms_.begin()->first.weighted_degree(ring_->weights);
    for (const auto& [m, c] : terms_)
      if (m.weighted_degree(ring_->weights) != d) return std::nullopt;
    return d;
  }

  bool depends_on(int k) const {
    for (const auto& [m, c] : terms_)
      if (m.exponent(k) > 0) return true;
    return false;
  }

  int max_var() const {
    int v = 0;
    for (const auto& [m, c] : terms_) v = std::max(v, m.max_var());
    return v;
  }

  int min_var() const {
    int v = nvars() + 1;
    for (const auto& [m, c] : terms_)
      if (!m.is_one()) v = std::min(v, m.min_var());
    return v;
  }

 private:
  void check_compatible(const Poly& o) const {
    if (ring_ == o.ring_) return;
    if (!same_ring(*ring_, *o.ring_))
      throw std::invalid_argument("Poly: ring mismatch (nvars/weights differ)");
  }

  PolyRingPtr ring_;
  TermMap terms_;
};

// --- Plain-text and LaTeX rendering -----------------------------------------

using VarNamer = std::function<std::string(int)>;

inline VarNamer default_text_names() {
  return [](int k) { return "x" + std::to_string(k); };
}

inline VarNamer default_latex_names() {
  return [](int k) {
    return k < 10 ? "x_" + std::to_string(k) : "x_{" + std::to_string(k) + "}";
  };
}

inline std::string poly_to_text(const Poly& p, const VarNamer& name = default_text_names()) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    if (m.is_one()) {
      os << format_rat(a);
    } else {
      bool coeff_shown = a != 1;
      if (coeff_shown) os << format_rat(a) << "*";
      bool firstv = true;
      for (const auto& [v, e] : m.entries()) {
        if (!firstv) os << "*";
        firstv = false;
        os << name(v);
        if (e > 1) os << "^" << e;
      }
    }
  }
  return os.str();
}

inline std::string poly_to_latex(const Poly& p, const VarNamer& name = default_latex_names()) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rat a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? "-" : "+");
      if (a < 0) a = -a;
    }
    first = false;
    Int num = rat_num(a), den = rat_den(a);
    if (den != 1)
      os << "\\frac{" << num.str() << "}{" << den.str() << "}";
    else if (num != 1 || m.is_one())
      os << num.str();
    for (const auto& [v, e] : m.entries()) {
      os << name(v);
      if (e > 1) os << (e < 10 ? "^" + std::to_string(e) : "^{" + std::to_string(e) + "}");
    }
  }
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Poly& p) {
  return os << poly_to_text(p);
}

}  // namespace carnot
