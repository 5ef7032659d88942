#pragma once

// First-order differential operators with polynomial coefficients:
// V = sum_k coeff_k(x) * d/dx_k. The commutator of two such operators is
// again first-order; its d/dx_k coefficient is V(W_k) - W(V_k).

#include "carnot/poly.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace carnot {

class VField {
 public:
  explicit VField(PolyRingPtr ring) : ring_(std::move(ring)) {
    if (!ring_) throw std::invalid_argument("VField: null ring");
    coeffs_.assign(static_cast<std::size_t>(ring_->nvars), Poly::zero(ring_));
  }

  // The coordinate operator d/dx_k.
  static VField partial_op(PolyRingPtr ring, int k) {
    VField v(std::move(ring));
    v.set_coeff(k, Poly::constant(v.ring_, Rat(1)));
    return v;
  }

  const PolyRingPtr& ring() const { return ring_; }
  int nvars() const { return ring_->nvars; }

  const Poly& coeff(int k) const {
    check_var(k);
    return coeffs_[static_cast<std::size_t>(k) - 1];
  }

  void set_coeff(int k, Poly p) {
    check_var(k);
    if (!same_ring(*ring_, *p.ring()))
      throw std::invalid_argument("VField::set_coeff: ring mismatch");
    coeffs_[static_cast<std::size_t>(k) - 1] = std::move(p);
  }

  bool is_zero() const {
    for (const Poly& p : coeffs_)
      if (!p.is_zero()) return false;
    return true;
  }

  friend bool operator==(const VField& a, const VField& b) {
    a.check_compatible(b);
    for (int k = 1; k <= a.nvars(); ++k)
      if (a.coeff(k) != b.coeff(k)) return false;
    return true;
  }
  friend bool operator!=(const VField& a, const VField& b) { return !(a == b); }

  VField operator-() const {
    VField r(ring_);
    for (int k = 1; k <= nvars(); ++k) r.set_coeff(k, -coeff(k));
    return r;
  }
  friend VField operator+(const VField& a, const VField& b) {
    a.check_compatible(b);
    VField r(a.ring_);
    for (int k = 1; k <= a.nvars(); ++k) r.set_coeff(k, a.coeff(k) + b.coeff(k));
    return r;
  }
  friend VField operator-(const VField& a, const VField& b) {
    a.check_compatible(b);
    VField r(a.ring_);
    for (int k = 1; k <= a.nvars(); ++k) r.set_coeff(k, a.coeff(k) - b.coeff(k));
    return r;
  }
  friend VField operator*(const Rat& s, const VField& v) {
    VField r(v.ring_);
    for (int k = 1; k <= v.nvars(); ++k) r.set_coeff(k, s * v.coeff(k));
    return r;
  }
  VField& operator+=(const VField& o) { return *this = *this + o; }
  VField& operator-=(const VField& o) { return *this = *this - o; }

  // V(p) = sum_k coeff_k * dp/dx_k.
  Poly apply(const Poly& p) const {
    if (!same_ring(*ring_, *p.ring()))
      throw std::invalid_argument("VField::apply: ring mismatch");
    Poly out = Poly::zero(ring_);
    for (int k = 1; k <= nvars(); ++k) {
      const Poly& ck = coeff(k);
      if (ck.is_zero() || !p.depends_on(k)) continue;
      out += ck * p.partial(k);
    }
    return out;
  }

 private:
  void check_var(int k) const {
    if (k < 1 || k > nvars()) throw std::invalid_argument("VField: bad direction index");
  }
  void check_compatible(const VField& o) const {
    if (ring_ != o.ring_ && !same_ring(*ring_, *o.ring_))
      throw std::invalid_argument("VField: ring mismatch");
  }

  PolyRingPtr ring_;
  std::vector<Poly> coeffs_;  // coeffs_[k-1] multiplies d/dx_k
};

inline VField vf_bracket(const VField& V, const VField& W) {
  if (!same_ring(*V.ring(), *W.ring()))
    throw std::invalid_argument("vf_bracket: ring mismatch");
  VField out(V.ring());
  for (int k = 1; k <= V.nvars(); ++k)
    out.set_coeff(k, V.apply(W.coeff(k)) - W.apply(V.coeff(k)));
  return out;
}

inline std::string vf_to_text(const VField& v, const VarNamer& name = default_text_names()) {
  std::ostringstream os;
  bool first = true;
  for (int k = 1; k <= v.nvars(); ++k) {
    const Poly& c = v.coeff(k);
    if (c.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (c.term_count() == 1 && c.constant_term() == 1)
      os << "d_" << k;
    else
      os << "(" << poly_to_text(c, name) << ")*d_" << k;
  }
  if (first) os << "0";
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const VField& v) {
  return os << vf_to_text(v);
}

}  // namespace carnot
