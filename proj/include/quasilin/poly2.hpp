#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasilin/deadline.hpp"
#include "quasilin/errors.hpp"
#include "quasilin/monomial.hpp"

namespace quasilin {

/// Sparse multivariate polynomial over GF(2).
///
/// A polynomial is the set of its monomials (every coefficient is 1), kept sorted in
/// descending graded lexicographic order, so `terms().front()` is the leading term.
/// Addition is symmetric difference.
class Poly2 {
 public:
  Poly2() = default;

  static Poly2 one() { return Poly2(Monomial{}); }
  static Poly2 variable(std::size_t index, unsigned power = 1) {
    return Poly2(Monomial::variable(index, power));
  }
  explicit Poly2(const Monomial& m) : terms_{m} {}

  /// Builds from an arbitrary list; repeated monomials cancel in pairs.
  static Poly2 from_terms(std::vector<Monomial> terms) {
    Poly2 p;
    p.terms_ = std::move(terms);
    p.canonicalize();
    return p;
  }

  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_one() const noexcept { return terms_.size() == 1 && terms_.front().is_one(); }
  bool is_monomial() const noexcept { return terms_.size() == 1; }
  const Monomial& leading() const { return terms_.front(); }

  unsigned total_degree() const noexcept { return terms_.empty() ? 0 : terms_.front().degree(); }

  unsigned degree_in(std::size_t var) const noexcept {
    unsigned d = 0;
    for (const auto& m : terms_) d = std::max(d, m.exponent(var));
    return d;
  }

  std::size_t support_end() const noexcept {
    std::size_t e = 0;
    for (const auto& m : terms_) e = std::max(e, m.support_end());
    return e;
  }

  friend bool operator==(const Poly2& a, const Poly2& b) noexcept { return a.terms_ == b.terms_; }

  /// Order used only for deterministic containers: by size, then termwise.
  friend bool operator<(const Poly2& a, const Poly2& b) noexcept {
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size();
    return std::lexicographical_compare(a.terms_.begin(), a.terms_.end(), b.terms_.begin(),
                                        b.terms_.end(),
                                        [](const Monomial& x, const Monomial& y) { return x > y; });
  }

  friend Poly2 operator+(const Poly2& a, const Poly2& b) {
    Poly2 out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() && j != b.terms_.end()) {
      const auto c = *i <=> *j;
      if (c > 0) {
        out.terms_.push_back(*i++);
      } else if (c < 0) {
        out.terms_.push_back(*j++);
      } else {
        ++i;
        ++j;
      }
    }
    out.terms_.insert(out.terms_.end(), i, a.terms_.end());
    out.terms_.insert(out.terms_.end(), j, b.terms_.end());
    return out;
  }
  Poly2& operator+=(const Poly2& b) { return *this = *this + b; }

  friend Poly2 operator*(const Poly2& p, const Monomial& m) {
    Poly2 out;
    out.terms_.reserve(p.terms_.size());
    for (const auto& t : p.terms_) out.terms_.push_back(t * m);
    return out;  // multiplication by a monomial preserves the order
  }

  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_monomial()) return b * a.leading();
    if (b.is_monomial()) return a * b.leading();
    check_deadline();
    // Heap multiplication: one cursor per term of the shorter factor; products leave the heap
    // in descending order, so equal monomials are adjacent and cancel in pairs on the fly.
    const Poly2& s = a.size() <= b.size() ? a : b;
    const Poly2& l = a.size() <= b.size() ? b : a;
    struct Entry {
      Monomial m;
      std::uint32_t i;
      std::uint32_t j;
    };
    const auto less = [](const Entry& x, const Entry& y) { return x.m < y.m; };
    std::vector<Entry> heap;
    heap.reserve(s.size());
    for (std::uint32_t i = 0; i < s.size(); ++i) heap.push_back({s.terms_[i] * l.terms_[0], i, 0});
    std::make_heap(heap.begin(), heap.end(), less);
    Poly2 out;
    std::size_t steps = 0;
    while (!heap.empty()) {
      const Monomial m = heap.front().m;
      bool odd = false;
      while (!heap.empty() && heap.front().m == m) {
        std::pop_heap(heap.begin(), heap.end(), less);
        Entry& e = heap.back();
        odd = !odd;
        if (e.j + 1 < l.size()) {
          ++e.j;
          e.m = s.terms_[e.i] * l.terms_[e.j];
          std::push_heap(heap.begin(), heap.end(), less);
        } else {
          heap.pop_back();
        }
      }
      if (odd) out.terms_.push_back(m);
      if (++steps % 4096 == 0) check_deadline();
    }
    return out;
  }
  Poly2& operator*=(const Poly2& b) { return *this = *this * b; }

  /// Frobenius: (sum m)^2 = sum m^2 in characteristic 2.
  Poly2 squared() const {
    Poly2 out;
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) out.terms_.push_back(t.squared());
    return out;
  }

  Poly2 pow(unsigned e) const {
    Poly2 result = one();
    Poly2 base = *this;
    while (e != 0) {
      if (e & 1U) result *= base;
      e >>= 1U;
      if (e != 0) base = base.squared();
    }
    return result;
  }

  /// Largest monomial dividing every term.
  Monomial monomial_content() const {
    if (terms_.empty()) return {};
    Monomial g = terms_.front();
    for (const auto& t : terms_) {
      g = Monomial::gcd(g, t);
      if (g.is_one()) break;
    }
    return g;
  }

  Poly2 divide_by_monomial(const Monomial& m) const {
    Poly2 out;
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!m.divides(t)) throw InvalidOperand("monomial does not divide polynomial");
      out.terms_.push_back(m.cofactor_in(t));
    }
    return out;
  }

  /// Exact quotient a / b, or nullopt when b does not divide a.
  static std::optional<Poly2> divide_exact(const Poly2& a, const Poly2& b) {
    if (b.is_zero()) throw InvalidOperand("division by the zero polynomial");
    if (a.is_zero()) return Poly2{};
    if (b.is_one()) return a;
    if (b.is_monomial()) {
      for (const auto& t : a.terms_) {
        if (!b.leading().divides(t)) return std::nullopt;
      }
      return a.divide_by_monomial(b.leading());
    }
    if (a.total_degree() < b.total_degree()) return std::nullopt;
    // Johnson's heap division: the heap holds the next unconsumed product b[i] * q[k] for
    // every quotient term k, so each step finds the current leading monomial in log time.
    struct Entry {
      Monomial m;
      std::size_t i;
      std::size_t k;
    };
    const auto less = [](const Entry& x, const Entry& y) { return x.m < y.m; };
    std::vector<Entry> heap;
    std::vector<Monomial> quotient;
    const Monomial& lead = b.leading();
    std::size_t next_a = 0;
    std::size_t steps = 0;
    while (next_a < a.terms_.size() || !heap.empty()) {
      Monomial m;
      if (heap.empty() || (next_a < a.terms_.size() && a.terms_[next_a] > heap.front().m)) {
        m = a.terms_[next_a];
      } else {
        m = heap.front().m;
      }
      bool odd = false;
      if (next_a < a.terms_.size() && a.terms_[next_a] == m) {
        odd = true;
        ++next_a;
      }
      while (!heap.empty() && heap.front().m == m) {
        std::pop_heap(heap.begin(), heap.end(), less);
        Entry e = heap.back();
        heap.pop_back();
        odd = !odd;
        if (e.i + 1 < b.terms_.size()) {
          heap.push_back({b.terms_[e.i + 1] * quotient[e.k], e.i + 1, e.k});
          std::push_heap(heap.begin(), heap.end(), less);
        }
      }
      if (!odd) continue;
      if (!lead.divides(m)) return std::nullopt;
      quotient.push_back(lead.cofactor_in(m));
      heap.push_back({b.terms_[1] * quotient.back(), 1, quotient.size() - 1});
      std::push_heap(heap.begin(), heap.end(), less);
      if (++steps % 256 == 0) check_deadline();
    }
    Poly2 out;
    out.terms_ = std::move(quotient);  // produced in strictly descending order
    return out;
  }

  static Poly2 divide_or_throw(const Poly2& a, const Poly2& b) {
    auto q = divide_exact(a, b);
    if (!q) throw InternalError("expected exact polynomial division");
    return std::move(*q);
  }

  /// Coefficients with respect to `var`: result[k] is the coefficient of var^k.
  std::vector<Poly2> coefficients_in(std::size_t var) const {
    std::vector<std::vector<Monomial>> buckets(degree_in(var) + 1);
    for (auto m : terms_) {
      const unsigned e = m.take(var);
      buckets[e].push_back(m);
    }
    std::vector<Poly2> out(buckets.size());
    for (std::size_t k = 0; k < buckets.size(); ++k) {
      out[k].terms_ = std::move(buckets[k]);
      std::sort(out[k].terms_.begin(), out[k].terms_.end(), std::greater<>());
    }
    return out;
  }

  static Poly2 from_coefficients(const std::vector<Poly2>& coeffs, std::size_t var) {
    std::vector<Monomial> all;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const Monomial shift = Monomial::variable(var, static_cast<unsigned>(k));
      for (const auto& m : coeffs[k].terms_) all.push_back(m * shift);
    }
    std::sort(all.begin(), all.end(), std::greater<>());
    Poly2 out;
    out.terms_ = std::move(all);
    return out;
  }

  /// Writes p = sum_g (s_g)^2 * g over square-free monomials g; entries sorted by g.
  std::vector<std::pair<Monomial, Poly2>> frobenius_split() const {
    std::map<Monomial, std::vector<Monomial>> buckets;
    Monomial half;
    Monomial parity;
    for (const auto& t : terms_) {
      t.split_parity(half, parity);
      buckets[parity].push_back(half);
    }
    std::vector<std::pair<Monomial, Poly2>> out;
    out.reserve(buckets.size());
    for (auto& [g, halves] : buckets) {
      Poly2 s;
      s.terms_ = std::move(halves);  // halving exponents preserves grlex order within a bucket
      out.emplace_back(g, std::move(s));
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i != 0) out += " + ";
      out += terms_[i].to_string(names);
    }
    return out;
  }

 private:
  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(), std::greater<>());
    std::size_t w = 0;
    std::size_t i = 0;
    while (i < terms_.size()) {
      std::size_t j = i + 1;
      while (j < terms_.size() && terms_[j] == terms_[i]) ++j;
      if ((j - i) % 2 == 1) terms_[w++] = terms_[i];
      i = j;
    }
    terms_.resize(w);
  }

  std::vector<Monomial> terms_;
};

namespace detail {

inline Poly2 gcd_core(const Poly2& a, const Poly2& b);

inline Poly2 content_in(const Poly2& p, std::size_t var) {
  const auto coeffs = p.coefficients_in(var);
  Poly2 g;
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c : gcd_core(g, c);
    if (g.is_one()) break;
  }
  return g;
}

/// Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b with respect to the main variable.
inline std::vector<Poly2> pseudo_remainder(std::vector<Poly2> a, const std::vector<Poly2>& b) {
  const Poly2& lb = b.back();
  std::size_t pending = a.size() - b.size() + 1;
  while (a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const Poly2 la = a.back();
    a.pop_back();
    for (auto& c : a) c *= lb;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) a[k + shift] += la * b[k];
    --pending;
    while (!a.empty() && a.back().is_zero()) a.pop_back();
    check_deadline();
  }
  if (pending != 0 && !a.empty()) {
    const Poly2 f = lb.pow(static_cast<unsigned>(pending));
    for (auto& c : a) c *= f;
  }
  return a;
}

inline std::vector<Poly2> primitive_part(std::vector<Poly2> coeffs) {
  Poly2 g;
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c : gcd_core(g, c);
    if (g.is_one()) return coeffs;
  }
  for (auto& c : coeffs) c = Poly2::divide_or_throw(c, g);
  return coeffs;
}

inline bool uses_variable(const Poly2& p, std::size_t var) { return p.degree_in(var) > 0; }

namespace gf64 {

/// Product in GF(2^64) = GF(2)[x]/(x^64 + x^4 + x^3 + x + 1).
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  for (unsigned i = 0; i < 64; ++i) {
    if ((b >> i) & 1U) {
      lo ^= a << i;
      if (i != 0) hi ^= a >> (64 - i);
    }
  }
  const std::uint64_t over = (hi >> 63) ^ (hi >> 61) ^ (hi >> 60);
  lo ^= hi ^ (hi << 1) ^ (hi << 3) ^ (hi << 4);
  lo ^= over ^ (over << 1) ^ (over << 3) ^ (over << 4);
  return lo;
}

inline std::uint64_t inverse(std::uint64_t a) noexcept {
  // a^(2^64 - 2)
  std::uint64_t result = 1;
  std::uint64_t base = a;
  for (unsigned i = 1; i < 64; ++i) {
    base = mul(base, base);
    result = mul(result, base);
  }
  return result;
}

using UPoly = std::vector<std::uint64_t>;

inline void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

/// Image of p as a univariate polynomial in `var`, other variables set to `point`.
inline UPoly evaluate_except(const Poly2& p, std::size_t var,
                             const std::array<std::uint64_t, kMaxVariables>& point) {
  const std::size_t end = p.support_end();
  std::vector<std::vector<std::uint64_t>> powers(end);
  UPoly out(p.degree_in(var) + 1, 0);
  for (const auto& m : p.terms()) {
    std::uint64_t value = 1;
    for (std::size_t v = 0; v < end; ++v) {
      const unsigned e = m.exponent(v);
      if (v == var || e == 0) continue;
      auto& pw = powers[v];
      if (pw.empty()) pw.push_back(1);
      while (pw.size() <= e) pw.push_back(mul(pw.back(), point[v]));
      value = mul(value, pw[e]);
    }
    out[m.exponent(var)] ^= value;
  }
  return out;
}

inline std::size_t gcd_degree(UPoly a, UPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    const std::uint64_t inv = inverse(b.back());
    while (a.size() >= b.size()) {
      const std::uint64_t f = mul(a.back(), inv);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] ^= mul(f, b[k]);
      trim(a);
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

}  // namespace gf64

/// Upper bound on deg_var gcd(a, b), exact whenever the evaluation keeps both leading
/// coefficients nonzero; returns nullopt if every attempted point was unlucky.
inline std::optional<std::size_t> gcd_degree_bound(const Poly2& a, const Poly2& b,
                                                   std::size_t var) {
  std::uint64_t state = 0x243F6A8885A308D3ULL ^ (var * 0x9E3779B97F4A7C15ULL);
  const auto next = [&state]() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  for (int attempt = 0; attempt < 3; ++attempt) {
    std::array<std::uint64_t, kMaxVariables> point{};
    for (auto& x : point) x = next();
    const auto ia = gf64::evaluate_except(a, var, point);
    const auto ib = gf64::evaluate_except(b, var, point);
    if (ia.back() == 0 || ib.back() == 0) continue;
    return gf64::gcd_degree(ia, ib);
  }
  return std::nullopt;
}

/// gcd of two nonzero polynomials without common monomial content handling.
inline Poly2 gcd_core(const Poly2& a, const Poly2& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_one() || b.is_one()) return Poly2::one();
  if (a == b) return a;
  const Monomial ma = a.monomial_content();
  const Monomial mb = b.monomial_content();
  const Monomial mg = Monomial::gcd(ma, mb);
  const Poly2 pa = ma.is_one() ? a : a.divide_by_monomial(ma);
  const Poly2 pb = mb.is_one() ? b : b.divide_by_monomial(mb);
  if (pa.is_one() || pb.is_one()) return Poly2(mg);
  if (pa.is_monomial() || pb.is_monomial()) return Poly2(mg);  // monomial content removed
  if (pa == pb) return Poly2(mg) * pa;

  const std::size_t end = std::max(pa.support_end(), pb.support_end());
  // A variable present in only one operand: the gcd lies in its content there.
  for (std::size_t v = 0; v < end; ++v) {
    const bool in_a = uses_variable(pa, v);
    const bool in_b = uses_variable(pb, v);
    if (in_a && !in_b) return Poly2(mg) * gcd_core(content_in(pa, v), pb);
    if (in_b && !in_a) return Poly2(mg) * gcd_core(pa, content_in(pb, v));
  }
  // Every variable of the gcd is shared; a zero degree bound in all of them proves coprimality.
  bool all_zero = true;
  std::optional<std::size_t> free_var;
  for (std::size_t v = 0; v < end; ++v) {
    if (!uses_variable(pa, v)) continue;
    const auto bound = gcd_degree_bound(pa, pb, v);
    if (bound && *bound == 0) {
      if (!free_var) free_var = v;
    } else {
      all_zero = false;
    }
  }
  if (all_zero) return Poly2(mg);
  if (free_var) {
    return Poly2(mg) * gcd_core(content_in(pa, *free_var), content_in(pb, *free_var));
  }
  // Main variable: the shared one of smallest maximal degree keeps the remainder sequence short.
  std::size_t var = end;
  unsigned best = ~0U;
  for (std::size_t v = 0; v < end; ++v) {
    if (!uses_variable(pa, v)) continue;
    const unsigned d = std::max(pa.degree_in(v), pb.degree_in(v));
    if (d < best) {
      best = d;
      var = v;
    }
  }
  auto ca = pa.coefficients_in(var);
  auto cb = pb.coefficients_in(var);
  Poly2 cont_a;
  for (const auto& c : ca) {
    if (!c.is_zero()) cont_a = cont_a.is_zero() ? c : gcd_core(cont_a, c);
  }
  Poly2 cont_b;
  for (const auto& c : cb) {
    if (!c.is_zero()) cont_b = cont_b.is_zero() ? c : gcd_core(cont_b, c);
  }
  const Poly2 content = gcd_core(cont_a, cont_b);
  if (!cont_a.is_one()) {
    for (auto& c : ca) c = Poly2::divide_or_throw(c, cont_a);
  }
  if (!cont_b.is_one()) {
    for (auto& c : cb) c = Poly2::divide_or_throw(c, cont_b);
  }
  if (ca.size() < cb.size()) std::swap(ca, cb);
  // Subresultant remainder sequence: every division below is exact in the coefficient ring.
  Poly2 g = Poly2::one();
  Poly2 h = Poly2::one();
  while (true) {
    const std::size_t delta = ca.size() - cb.size();
    auto r = pseudo_remainder(ca, cb);
    if (r.empty()) {
      return Poly2(mg) * content * Poly2::from_coefficients(primitive_part(std::move(cb)), var);
    }
    if (r.size() == 1) return Poly2(mg) * content;
    const Poly2 divisor = g * h.pow(static_cast<unsigned>(delta));
    if (!divisor.is_one()) {
      for (auto& c : r) c = Poly2::divide_or_throw(c, divisor);
    }
    ca = std::move(cb);
    cb = std::move(r);
    g = ca.back();
    if (delta == 0) {
      // h stays unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = Poly2::divide_or_throw(g.pow(static_cast<unsigned>(delta)),
                                 h.pow(static_cast<unsigned>(delta - 1)));
    }
  }
}

}  // namespace detail

/// Greatest common divisor over GF(2); gcd(a, 0) = a. Leading coefficient is always 1.
inline Poly2 gcd(const Poly2& a, const Poly2& b) { return detail::gcd_core(a, b); }

}  // namespace quasilin
