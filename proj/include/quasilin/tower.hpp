#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quasilin/errors.hpp"
#include "quasilin/ratfunc.hpp"

namespace quasilin {

class TowerElement;

namespace detail {

using Coords = std::vector<RatFunc>;

struct TowerData {
  struct Event {
    bool is_root;
    std::size_t index;
  };

  std::vector<std::string> variables;
  std::size_t initial_variables = 0;
  std::vector<std::string> roots;
  /// radicands[j] lives in the prefix tower with j roots and has 2^j coordinates.
  std::vector<Coords> radicands;
  std::vector<Event> history;
  std::shared_ptr<const TowerData> parent;
  /// root_powers[e] = prod_{i in e} radicands[i], as full-length coordinates.
  std::vector<Coords> root_powers;
};

inline bool all_zero(std::span<const RatFunc> x) {
  return std::all_of(x.begin(), x.end(), [](const RatFunc& c) { return c.is_zero(); });
}

inline Coords add(std::span<const RatFunc> x, std::span<const RatFunc> y) {
  Coords out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

/// Product in the prefix tower with `level` roots: (a + b r)(c + d r) = ac + bd u + (ad + bc) r.
inline Coords mul(const TowerData& t, std::span<const RatFunc> x, std::span<const RatFunc> y,
                  std::size_t level) {
  if (level == 0) return {x[0] * y[0]};
  const std::size_t h = std::size_t{1} << (level - 1);
  const auto a = x.first(h);
  const auto b = x.subspan(h);
  const auto c = y.first(h);
  const auto d = y.subspan(h);
  const bool b0 = all_zero(b);
  const bool d0 = all_zero(d);
  Coords out(2 * h);
  if (b0 && d0) {
    auto ac = mul(t, a, c, level - 1);
    std::move(ac.begin(), ac.end(), out.begin());
    return out;
  }
  if (b0 || d0) {
    // One factor lies in the prefix: scale both halves of the other.
    const auto s = b0 ? a : c;
    const auto lo = b0 ? c : a;
    const auto hi = b0 ? d : b;
    auto l = mul(t, s, lo, level - 1);
    auto u = mul(t, s, hi, level - 1);
    std::move(l.begin(), l.end(), out.begin());
    std::move(u.begin(), u.end(), out.begin() + static_cast<std::ptrdiff_t>(h));
    return out;
  }
  const auto ac = mul(t, a, c, level - 1);
  const auto bd = mul(t, b, d, level - 1);
  const auto bdu = mul(t, bd, t.radicands[level - 1], level - 1);
  const auto cross = mul(t, add(a, b), add(c, d), level - 1);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = ac[i] + bdu[i];
    out[h + i] = cross[i] + ac[i] + bd[i];
  }
  return out;
}

/// x^2 = a^2 + b^2 u; the result lies in the prefix (upper half zero).
inline Coords square(const TowerData& t, std::span<const RatFunc> x, std::size_t level) {
  if (level == 0) return {x[0].squared()};
  const std::size_t h = std::size_t{1} << (level - 1);
  Coords out(2 * h);
  auto lo = square(t, x.first(h), level - 1);
  if (!all_zero(x.subspan(h))) {
    const auto b2 = square(t, x.subspan(h), level - 1);
    const auto b2u = mul(t, b2, t.radicands[level - 1], level - 1);
    for (std::size_t i = 0; i < h; ++i) lo[i] += b2u[i];
  }
  std::move(lo.begin(), lo.end(), out.begin());
  return out;
}

/// x^{-1} = x / x^2 with x^2 in the prefix, recursively.
inline Coords inverse(const TowerData& t, std::span<const RatFunc> x, std::size_t level) {
  if (level == 0) return {x[0].inverse()};
  const std::size_t h = std::size_t{1} << (level - 1);
  Coords out(2 * h);
  const auto a = x.first(h);
  const auto b = x.subspan(h);
  if (all_zero(b)) {
    auto ia = inverse(t, a, level - 1);
    std::move(ia.begin(), ia.end(), out.begin());
    return out;
  }
  const auto norm = square(t, x, level);
  const auto inv = inverse(t, std::span<const RatFunc>(norm).first(h), level - 1);
  auto lo = mul(t, a, inv, level - 1);
  auto hi = mul(t, b, inv, level - 1);
  std::move(lo.begin(), lo.end(), out.begin());
  std::move(hi.begin(), hi.end(), out.begin() + static_cast<std::ptrdiff_t>(h));
  return out;
}

inline std::string root_product_name(const std::vector<std::string>& roots, std::size_t e) {
  std::string out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if ((e >> i) & 1U) {
      if (!out.empty()) out += '*';
      out += roots[i];
    }
  }
  return out;
}

inline std::string coords_to_string(const Coords& c, const std::vector<std::string>& vars,
                                    const std::vector<std::string>& roots) {
  std::string out;
  for (std::size_t e = 0; e < c.size(); ++e) {
    if (c[e].is_zero()) continue;
    if (!out.empty()) out += " + ";
    if (e == 0) {
      out += c[e].to_string(vars);
      continue;
    }
    const std::string r = root_product_name(roots, e);
    if (c[e].is_one()) {
      out += r;
    } else if (c[e].is_polynomial() && c[e].num().is_monomial()) {
      out += c[e].to_string(vars) + "*" + r;
    } else {
      out += "(" + c[e].to_string(vars) + ")*" + r;
    }
  }
  return out.empty() ? "0" : out;
}

}  // namespace detail

/// Field L = GF(2)(t_1..t_m)(sqrt(u_1), ..., sqrt(u_r)), with transcendentals and roots
/// adjoined in any interleaving. Towers are immutable; every extension returns a new tower
/// that remembers its parent so elements can be embedded explicitly.
class FieldTower {
 public:
  static FieldTower rational(const std::vector<std::string>& names) {
    auto data = std::make_shared<detail::TowerData>();
    for (const auto& n : names) {
      if (std::find(data->variables.begin(), data->variables.end(), n) != data->variables.end()) {
        throw NameCollision("duplicate variable name '" + n + "'");
      }
      data->variables.push_back(n);
    }
    if (data->variables.size() > kMaxVariables) throw ResourceLimit("too many variables");
    data->initial_variables = names.size();
    data->root_powers = {detail::Coords{RatFunc::one()}};
    return FieldTower(std::move(data));
  }

  std::size_t num_roots() const noexcept { return data_->roots.size(); }
  std::size_t num_variables() const noexcept { return data_->variables.size(); }
  /// [L : K] where K is the rational function field on all variables.
  std::size_t degree() const noexcept { return std::size_t{1} << num_roots(); }
  const std::vector<std::string>& variable_names() const noexcept { return data_->variables; }
  const std::vector<std::string>& root_names() const noexcept { return data_->roots; }
  const detail::Coords& radicand_coords(std::size_t j) const { return data_->radicands.at(j); }

  bool has_name(const std::string& name) const {
    return std::find(data_->variables.begin(), data_->variables.end(), name) !=
               data_->variables.end() ||
           std::find(data_->roots.begin(), data_->roots.end(), name) != data_->roots.end();
  }

  std::optional<std::size_t> variable_index(const std::string& name) const {
    const auto it = std::find(data_->variables.begin(), data_->variables.end(), name);
    if (it == data_->variables.end()) return std::nullopt;
    return static_cast<std::size_t>(it - data_->variables.begin());
  }

  std::optional<std::size_t> root_index(const std::string& name) const {
    const auto it = std::find(data_->roots.begin(), data_->roots.end(), name);
    if (it == data_->roots.end()) return std::nullopt;
    return static_cast<std::size_t>(it - data_->roots.begin());
  }

  /// Purely transcendental extension by fresh variables; every old element embeds unchanged.
  FieldTower adjoin_transcendentals(const std::vector<std::string>& names) const {
    if (names.empty()) return *this;
    auto data = std::make_shared<detail::TowerData>(*data_);
    data->parent = data_;
    for (const auto& n : names) {
      if (std::find(data->variables.begin(), data->variables.end(), n) != data->variables.end() ||
          std::find(data->roots.begin(), data->roots.end(), n) != data->roots.end()) {
        throw NameCollision("name '" + n + "' is already declared");
      }
      data->history.push_back({false, data->variables.size()});
      data->variables.push_back(n);
    }
    if (data->variables.size() > kMaxVariables) throw ResourceLimit("too many variables");
    return FieldTower(std::move(data));
  }

  /// Adjoins a square root of u without checking that u is a non-square.
  /// Use adjoin_sqrt (semilinear.hpp) unless non-squareness is already known.
  FieldTower adjoin_root_unchecked(const std::string& name, const TowerElement& u) const;

  /// Fresh names `prefix1`, `prefix2`, ... not used by this tower.
  std::vector<std::string> fresh_names(const std::string& prefix, std::size_t count) const {
    std::vector<std::string> out;
    for (std::size_t i = 1; out.size() < count; ++i) {
      std::string n = prefix + std::to_string(i);
      if (!has_name(n)) out.push_back(std::move(n));
    }
    return out;
  }

  TowerElement zero() const;
  TowerElement one() const;
  TowerElement variable(std::size_t index) const;
  TowerElement root(std::size_t index) const;
  TowerElement constant(const RatFunc& c) const;
  TowerElement from_coords(detail::Coords coords) const;

  /// Embeds an element of this tower or of one of its ancestors.
  TowerElement embed(const TowerElement& x) const;

  bool is_extension_of(const FieldTower& other) const noexcept {
    for (const detail::TowerData* p = data_.get(); p != nullptr; p = p->parent.get()) {
      if (p == other.data_.get()) return true;
    }
    return false;
  }

  /// prod_{i in e} u_i, the square of the basis element r^e.
  const detail::Coords& root_power(std::size_t e) const { return data_->root_powers.at(e); }

  const detail::TowerData& data() const noexcept { return *data_; }

  /// Script text that rebuilds this tower: `field`, then `adjoin` lines in construction order.
  std::string descriptor() const {
    std::string out = "field GF2(";
    for (std::size_t i = 0; i < data_->initial_variables; ++i) {
      if (i != 0) out += ", ";
      out += data_->variables[i];
    }
    out += ")\n";
    for (const auto& ev : data_->history) {
      if (!ev.is_root) {
        out += "adjoin var " + data_->variables[ev.index] + "\n";
      } else {
        std::vector<std::string> prefix_roots(data_->roots.begin(),
                                              data_->roots.begin() +
                                                  static_cast<std::ptrdiff_t>(ev.index));
        out += "adjoin " + data_->roots[ev.index] + " = sqrt(" +
               detail::coords_to_string(data_->radicands[ev.index], data_->variables,
                                        prefix_roots) +
               ")\n";
      }
    }
    return out;
  }

  friend bool operator==(const FieldTower& a, const FieldTower& b) noexcept {
    return a.data_ == b.data_;
  }

 private:
  explicit FieldTower(std::shared_ptr<const detail::TowerData> data) : data_(std::move(data)) {}
  friend class TowerElement;

  std::shared_ptr<const detail::TowerData> data_;
};

/// Element of a FieldTower: sum_e coords[e] * r^e over the 2^r root products, coords in K.
class TowerElement {
 public:
  TowerElement(FieldTower tower, detail::Coords coords)
      : tower_(std::move(tower)), coords_(std::move(coords)) {
    if (coords_.size() != tower_.degree()) {
      throw InvalidOperand("coordinate vector does not match the tower degree");
    }
  }

  const FieldTower& tower() const noexcept { return tower_; }
  const detail::Coords& coords() const noexcept { return coords_; }
  const RatFunc& coord(std::size_t e) const { return coords_.at(e); }

  bool is_zero() const { return detail::all_zero(coords_); }
  bool is_one() const {
    return coords_[0].is_one() && detail::all_zero(std::span<const RatFunc>(coords_).subspan(1));
  }
  /// True when the element lies in the rational function field K.
  bool in_rational_field() const {
    return detail::all_zero(std::span<const RatFunc>(coords_).subspan(1));
  }

  friend bool operator==(const TowerElement& a, const TowerElement& b) {
    a.require_same(b);
    return a.coords_ == b.coords_;
  }

  friend TowerElement operator+(const TowerElement& a, const TowerElement& b) {
    a.require_same(b);
    return TowerElement(a.tower_, detail::add(a.coords_, b.coords_));
  }
  TowerElement& operator+=(const TowerElement& b) { return *this = *this + b; }

  friend TowerElement operator*(const TowerElement& a, const TowerElement& b) {
    a.require_same(b);
    return TowerElement(a.tower_, detail::mul(a.tower_.data(), a.coords_, b.coords_,
                                              a.tower_.num_roots()));
  }
  TowerElement& operator*=(const TowerElement& b) { return *this = *this * b; }

  /// Multiplication by an element of K.
  friend TowerElement operator*(const TowerElement& a, const RatFunc& c) {
    detail::Coords out(a.coords_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] * c;
    return TowerElement(a.tower_, std::move(out));
  }

  TowerElement squared() const {
    return TowerElement(tower_, detail::square(tower_.data(), coords_, tower_.num_roots()));
  }

  TowerElement inverse() const {
    if (is_zero()) throw InvalidOperand("division by zero in field tower");
    return TowerElement(tower_, detail::inverse(tower_.data(), coords_, tower_.num_roots()));
  }

  friend TowerElement operator/(const TowerElement& a, const TowerElement& b) {
    return a * b.inverse();
  }

  TowerElement pow(long e) const {
    TowerElement base = e < 0 ? inverse() : *this;
    unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    TowerElement result = tower_.one();
    while (n != 0) {
      if (n & 1UL) result *= base;
      n >>= 1UL;
      if (n != 0) base = base.squared();
    }
    return result;
  }

  std::string to_string() const {
    return detail::coords_to_string(coords_, tower_.variable_names(), tower_.root_names());
  }

 private:
  void require_same(const TowerElement& other) const {
    if (!(tower_ == other.tower_)) {
      throw MixedField("operands belong to different field towers; embed explicitly");
    }
  }

  FieldTower tower_;
  detail::Coords coords_;
};

inline TowerElement FieldTower::zero() const { return TowerElement(*this, detail::Coords(degree())); }

inline TowerElement FieldTower::one() const { return constant(RatFunc::one()); }

inline TowerElement FieldTower::constant(const RatFunc& c) const {
  detail::Coords coords(degree());
  coords[0] = c;
  return TowerElement(*this, std::move(coords));
}

inline TowerElement FieldTower::variable(std::size_t index) const {
  if (index >= num_variables()) throw InvalidOperand("variable index out of range");
  return constant(RatFunc::variable(index));
}

inline TowerElement FieldTower::root(std::size_t index) const {
  if (index >= num_roots()) throw InvalidOperand("root index out of range");
  detail::Coords coords(degree());
  coords[std::size_t{1} << index] = RatFunc::one();
  return TowerElement(*this, std::move(coords));
}

inline TowerElement FieldTower::from_coords(detail::Coords coords) const {
  return TowerElement(*this, std::move(coords));
}

inline TowerElement FieldTower::embed(const TowerElement& x) const {
  if (x.tower() == *this) return x;
  if (!is_extension_of(x.tower())) {
    throw MixedField("element does not belong to a subfield of this tower");
  }
  detail::Coords coords = x.coords();
  coords.resize(degree());
  return TowerElement(*this, std::move(coords));
}

inline FieldTower FieldTower::adjoin_root_unchecked(const std::string& name,
                                                    const TowerElement& u) const {
  if (has_name(name)) throw NameCollision("name '" + name + "' is already declared");
  const TowerElement radicand = embed(u);
  if (radicand.is_zero()) throw ZeroRadicand("cannot adjoin the square root of zero");
  auto data = std::make_shared<detail::TowerData>(*data_);
  data->parent = data_;
  const std::size_t j = data->roots.size();
  data->history.push_back({true, j});
  data->roots.push_back(name);
  data->radicands.push_back(radicand.coords());
  const std::size_t r = j + 1;
  const std::size_t full = std::size_t{1} << r;
  std::vector<detail::Coords> powers(full);
  for (std::size_t e = 0; e < full; ++e) {
    if (e < (full >> 1)) {
      powers[e] = data_->root_powers[e];
      powers[e].resize(full);
    } else {
      const auto& lower = data_->root_powers[e - (full >> 1)];
      auto prod = detail::mul(*data, lower, radicand.coords(), j);
      prod.resize(full);
      powers[e] = std::move(prod);
    }
  }
  data->root_powers = std::move(powers);
  return FieldTower(std::move(data));
}

}  // namespace quasilin
