#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quasilin/errors.hpp"

namespace quasilin {

/// Number of distinct transcendental variables a single computation may use.
inline constexpr std::size_t kMaxVariables = 32;
static_assert(kMaxVariables % 4 == 0);

/// A power product t_0^{e_0} ... t_{n-1}^{e_{n-1}}.
///
/// Exponents are 15-bit fields packed four to a 64-bit word, variable 0 in the most
/// significant field of word 0, so the product is a word-wise sum and the lexicographic
/// part of the graded order is a word-wise compare. The top bit of each field stays clear;
/// a product that would set it signals exponent overflow.
class Monomial {
 public:
  static constexpr unsigned kMaxExponent = 0x7FFFU;

  Monomial() = default;

  static Monomial variable(std::size_t index, unsigned power = 1) {
    Monomial m;
    m.set_exponent(index, power);
    return m;
  }

  unsigned exponent(std::size_t index) const noexcept {
    if (index >= kMaxVariables) return 0;
    return static_cast<unsigned>((w_[index / 4] >> shift(index)) & kField);
  }

  void set_exponent(std::size_t index, unsigned power) {
    if (index >= kMaxVariables) {
      throw ResourceLimit("variable index " + std::to_string(index) + " exceeds capacity " +
                          std::to_string(kMaxVariables));
    }
    if (power > kMaxExponent) throw ResourceLimit("monomial exponent overflow");
    degree_ = degree_ - exponent(index) + power;
    std::uint64_t& w = w_[index / 4];
    w = (w & ~(kField << shift(index))) | (std::uint64_t{power} << shift(index));
  }

  unsigned degree() const noexcept { return degree_; }
  bool is_one() const noexcept { return degree_ == 0; }

  /// One past the largest variable index with a nonzero exponent.
  std::size_t support_end() const noexcept {
    for (std::size_t i = kMaxVariables; i > 0; --i) {
      if (exponent(i - 1) != 0) return i;
    }
    return 0;
  }

  bool divides(const Monomial& other) const noexcept {
    if (degree_ > other.degree_) return false;
    for (std::size_t k = 0; k < kWords; ++k) {
      if ((((other.w_[k] | kHigh) - w_[k]) & kHigh) != kHigh) return false;
    }
    return true;
  }

  /// other / *this; caller guarantees divisibility.
  Monomial cofactor_in(const Monomial& other) const noexcept {
    Monomial q;
    for (std::size_t k = 0; k < kWords; ++k) q.w_[k] = other.w_[k] - w_[k];
    q.degree_ = other.degree_ - degree_;
    return q;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    std::uint64_t over = 0;
    for (std::size_t k = 0; k < kWords; ++k) {
      m.w_[k] = a.w_[k] + b.w_[k];
      over |= m.w_[k];
    }
    if (over & kHigh) throw ResourceLimit("monomial exponent overflow");
    m.degree_ = a.degree_ + b.degree_;
    return m;
  }

  Monomial squared() const { return *this * *this; }

  /// Componentwise minimum (the gcd of two monomials).
  static Monomial gcd(const Monomial& a, const Monomial& b) noexcept {
    Monomial m;
    for (std::size_t i = 0; i < kMaxVariables; ++i) {
      const unsigned x = a.exponent(i);
      const unsigned y = b.exponent(i);
      const unsigned e = x < y ? x : y;
      if (e != 0) {
        m.w_[i / 4] |= std::uint64_t{e} << shift(i);
        m.degree_ += e;
      }
    }
    return m;
  }

  /// Writes *this = half^2 * parity with parity square-free.
  void split_parity(Monomial& half, Monomial& parity) const noexcept {
    half = Monomial{};
    parity = Monomial{};
    for (std::size_t k = 0; k < kWords; ++k) {
      parity.w_[k] = w_[k] & kLow;
      half.w_[k] = (w_[k] >> 1) & kMask15;
    }
    parity.degree_ = parity.field_sum();
    half.degree_ = (degree_ - parity.degree_) / 2;
  }

  bool is_square_free() const noexcept {
    for (auto w : w_) {
      if (w & ~kLow) return false;
    }
    return true;
  }

  /// Removes variable `index`, returning its exponent.
  unsigned take(std::size_t index) noexcept {
    const unsigned e = exponent(index);
    w_[index / 4] &= ~(kField << shift(index));
    degree_ -= e;
    return e;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) noexcept {
    return a.degree_ == b.degree_ && a.w_ == b.w_;
  }

  /// Graded lexicographic order: total degree first, then the exponent of t_0, t_1, ...
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) noexcept {
    if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
    for (std::size_t k = 0; k < kWords; ++k) {
      if (a.w_[k] != b.w_[k]) return a.w_[k] <=> b.w_[k];
    }
    return std::strong_ordering::equal;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ degree_;
    for (auto w : w_) {
      h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }

  /// Renders as `t1^2*t3`; the empty product renders as `1`.
  std::string to_string(const std::vector<std::string>& names) const {
    std::string out;
    for (std::size_t i = 0; i < kMaxVariables; ++i) {
      const unsigned e = exponent(i);
      if (e == 0) continue;
      if (!out.empty()) out += '*';
      out += i < names.size() ? names[i] : "v" + std::to_string(i);
      if (e > 1) out += "^" + std::to_string(e);
    }
    return out.empty() ? "1" : out;
  }

 private:
  static constexpr std::size_t kWords = kMaxVariables / 4;
  static constexpr std::uint64_t kField = 0xFFFFULL;
  static constexpr std::uint64_t kHigh = 0x8000800080008000ULL;
  static constexpr std::uint64_t kLow = 0x0001000100010001ULL;
  static constexpr std::uint64_t kMask15 = 0x7FFF7FFF7FFF7FFFULL;

  static constexpr unsigned shift(std::size_t index) noexcept {
    return static_cast<unsigned>(48 - 16 * (index % 4));
  }

  unsigned field_sum() const noexcept {
    unsigned s = 0;
    for (auto w : w_) {
      for (unsigned k = 0; k < 4; ++k) s += static_cast<unsigned>((w >> (16 * k)) & kField);
    }
    return s;
  }

  std::array<std::uint64_t, kWords> w_{};
  unsigned degree_ = 0;
};

}  // namespace quasilin

template <>
struct std::hash<quasilin::Monomial> {
  std::size_t operator()(const quasilin::Monomial& m) const noexcept { return m.hash(); }
};
