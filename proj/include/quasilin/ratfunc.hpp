#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quasilin/errors.hpp"
#include "quasilin/poly2.hpp"

namespace quasilin {

/// Element num/den of the rational function field GF(2)(t_0, t_1, ...).
///
/// Always stored reduced: gcd(num, den) = 1 and zero is (0, 1). Since GF(2) has no
/// units besides 1, the reduced pair is unique and equality is structural.
class RatFunc {
 public:
  RatFunc() : den_(Poly2::one()) {}
  RatFunc(Poly2 num) : num_(std::move(num)), den_(Poly2::one()) {}  // NOLINT: implicit embedding
  RatFunc(Poly2 num, Poly2 den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw InvalidOperand("rational function with zero denominator");
    normalize();
  }

  static RatFunc one() { return RatFunc(Poly2::one()); }
  static RatFunc variable(std::size_t index) { return RatFunc(Poly2::variable(index)); }

  const Poly2& num() const noexcept { return num_; }
  const Poly2& den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_one() const noexcept { return num_.is_one() && den_.is_one(); }
  bool is_polynomial() const noexcept { return den_.is_one(); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) {
      if (a.den_.is_one()) return RatFunc::raw(a.num_ + b.num_, a.den_);
      return RatFunc(a.num_ + b.num_, a.den_);
    }
    if (a.den_.is_one()) return RatFunc::raw(a.num_ * b.den_ + b.num_, b.den_);
    if (b.den_.is_one()) return RatFunc::raw(a.num_ + b.num_ * a.den_, a.den_);
    // Henrici: only the common part of the denominators can cancel.
    const Poly2 g = gcd(a.den_, b.den_);
    if (g.is_one()) return RatFunc::raw(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    const Poly2 da = Poly2::divide_or_throw(a.den_, g);
    const Poly2 db = Poly2::divide_or_throw(b.den_, g);
    const Poly2 t = a.num_ * db + b.num_ * da;
    if (t.is_zero()) return {};
    const Poly2 g2 = gcd(t, g);
    if (g2.is_one()) return RatFunc::raw(t, da * b.den_);
    return RatFunc::raw(Poly2::divide_or_throw(t, g2),
                        da * Poly2::divide_or_throw(b.den_, g2));
  }
  RatFunc& operator+=(const RatFunc& b) { return *this = *this + b; }
  // Characteristic 2: subtraction is addition.
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + b; }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.den_.is_one() && b.den_.is_one()) return RatFunc::raw(a.num_ * b.num_, Poly2::one());
    // Cross-cancel before multiplying so the final normalization sees small operands.
    const Poly2 g1 = gcd(a.num_, b.den_);
    const Poly2 g2 = gcd(b.num_, a.den_);
    const Poly2 n1 = g1.is_one() ? a.num_ : Poly2::divide_or_throw(a.num_, g1);
    const Poly2 d2 = g1.is_one() ? b.den_ : Poly2::divide_or_throw(b.den_, g1);
    const Poly2 n2 = g2.is_one() ? b.num_ : Poly2::divide_or_throw(b.num_, g2);
    const Poly2 d1 = g2.is_one() ? a.den_ : Poly2::divide_or_throw(a.den_, g2);
    return RatFunc::raw(n1 * n2, d1 * d2);
  }
  RatFunc& operator*=(const RatFunc& b) { return *this = *this * b; }

  RatFunc inverse() const {
    if (is_zero()) throw InvalidOperand("division by zero");
    return RatFunc::raw(den_, num_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

  RatFunc squared() const { return RatFunc::raw(num_.squared(), den_.squared()); }

  std::string to_string(const std::vector<std::string>& names) const {
    if (den_.is_one()) return num_.to_string(names);
    const auto wrap = [&](const Poly2& p) {
      const std::string s = p.to_string(names);
      return p.size() > 1 ? "(" + s + ")" : s;
    };
    return wrap(num_) + "/" + wrap(den_);
  }

 private:
  /// Trusted constructor: the caller guarantees the pair is already reduced.
  static RatFunc raw(Poly2 num, Poly2 den) {
    RatFunc r;
    r.num_ = std::move(num);
    r.den_ = r.num_.is_zero() ? Poly2::one() : std::move(den);
    return r;
  }

  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly2::one();
      return;
    }
    if (den_.is_one()) return;
    const Poly2 g = gcd(num_, den_);
    if (!g.is_one()) {
      num_ = Poly2::divide_or_throw(num_, g);
      den_ = Poly2::divide_or_throw(den_, g);
    }
  }

  Poly2 num_;
  Poly2 den_;
};

/// Coordinates of x over the subfield of squares: x = sum_g s_g^2 * g with g square-free.
///
/// Computed as x = (num*den)/den^2 followed by a parity split of num*den. The result is
/// sorted by g and contains only nonzero s_g.
inline std::vector<std::pair<Monomial, RatFunc>> frobenius_split(const RatFunc& x) {
  std::vector<std::pair<Monomial, RatFunc>> out;
  if (x.is_zero()) return out;
  for (auto& [g, s] : (x.num() * x.den()).frobenius_split()) {
    out.emplace_back(g, RatFunc(std::move(s), x.den()));
  }
  return out;
}

/// Inverse of frobenius_split.
inline RatFunc recompose_frobenius(const std::vector<std::pair<Monomial, RatFunc>>& parts) {
  RatFunc x;
  for (const auto& [g, s] : parts) x += s.squared() * RatFunc(Poly2(g));
  return x;
}

}  // namespace quasilin
