#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasilin/errors.hpp"
#include "quasilin/semilinear.hpp"
#include "quasilin/tower.hpp"

namespace quasilin {

/// Diagonal quasilinear form <a_1, ..., a_n>, i.e. a_1 x_1^2 + ... + a_n x_n^2, over a tower.
class QForm {
 public:
  QForm(FieldTower tower, std::vector<TowerElement> coeffs)
      : tower_(std::move(tower)), coeffs_(std::move(coeffs)) {
    for (const auto& c : coeffs_) {
      if (!(c.tower() == tower_)) throw MixedField("form coefficients must share one tower");
    }
  }

  const FieldTower& tower() const noexcept { return tower_; }
  const std::vector<TowerElement>& coeffs() const noexcept { return coeffs_; }
  std::size_t dim() const noexcept { return coeffs_.size(); }
  const TowerElement& operator[](std::size_t i) const { return coeffs_.at(i); }

  /// The same coefficients read in an extension tower.
  QForm extended_to(const FieldTower& ext) const {
    std::vector<TowerElement> c;
    c.reserve(coeffs_.size());
    for (const auto& x : coeffs_) c.push_back(ext.embed(x));
    return QForm(ext, std::move(c));
  }

  TowerElement evaluate(const std::vector<TowerElement>& x) const {
    if (x.size() != dim()) throw InvalidOperand("vector length does not match the form");
    TowerElement acc = tower_.zero();
    for (std::size_t i = 0; i < dim(); ++i) acc += x[i].squared() * coeffs_[i];
    return acc;
  }

  std::string to_string() const {
    std::string s = "<";
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) s += ", ";
      s += coeffs_[i].to_string();
    }
    return s + ">";
  }

  friend bool operator==(const QForm& a, const QForm& b) {
    return a.tower_ == b.tower_ && a.coeffs_ == b.coeffs_;
  }

 private:
  FieldTower tower_;
  std::vector<TowerElement> coeffs_;
};

/// Quasi-Pfister form <<a_1, ..., a_n>> = <1, a_1> (x) ... (x) <1, a_n>.
class PfisterForm {
 public:
  PfisterForm(FieldTower tower, std::vector<TowerElement> slots)
      : tower_(std::move(tower)), slots_(std::move(slots)) {
    for (const auto& c : slots_) {
      if (!(c.tower() == tower_)) throw MixedField("Pfister slots must share one tower");
    }
  }

  const FieldTower& tower() const noexcept { return tower_; }
  const std::vector<TowerElement>& slots() const noexcept { return slots_; }
  std::size_t fold() const noexcept { return slots_.size(); }
  std::size_t dim() const noexcept { return std::size_t{1} << slots_.size(); }

  /// Coefficients in tensor order: <1, a> (x) <1, b> = <1, b, a, ab>.
  QForm expand() const {
    std::vector<TowerElement> c{tower_.one()};
    for (const auto& a : slots_) {
      std::vector<TowerElement> next;
      next.reserve(2 * c.size());
      for (const auto& x : c) {
        next.push_back(x);
        next.push_back(x * a);
      }
      c = std::move(next);
    }
    return QForm(tower_, std::move(c));
  }

  std::string to_string() const {
    std::string s = "<<";
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (i) s += ", ";
      s += slots_[i].to_string();
    }
    return s + ">>";
  }

 private:
  FieldTower tower_;
  std::vector<TowerElement> slots_;
};

namespace detail {

/// For each element of `cols`, whether it lies in the L^2-span of the elements before it.
inline std::vector<bool> dependent_mask(const FieldTower& t, const std::vector<TowerElement>& cols) {
  std::vector<bool> out(cols.size(), false);
  if (cols.empty()) return out;
  const auto k = solve_homogeneous(SemilinearSystem::scalars(t, cols), false);
  for (const std::size_t j : k.free_blocks) out[j] = true;
  return out;
}

inline void require_same_tower(const QForm& a, const QForm& b) {
  if (!(a.tower() == b.tower())) throw MixedField("forms belong to different field towers");
}

}  // namespace detail

inline std::size_t isotropy_index(const QForm& q) {
  const auto mask = detail::dependent_mask(q.tower(), q.coeffs());
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

inline bool is_anisotropic(const QForm& q) { return isotropy_index(q) == 0; }

/// Basis of the isotropic vectors {x : sum x_j^2 a_j = 0} over the tower.
inline std::vector<std::vector<TowerElement>> isotropic_vectors(const QForm& q) {
  if (q.dim() == 0) return {};
  return solve_homogeneous(SemilinearSystem::scalars(q.tower(), q.coeffs())).basis;
}

/// The earliest L^2-independent coefficients, in their original order.
inline QForm anisotropic_part(const QForm& q) {
  const auto mask = detail::dependent_mask(q.tower(), q.coeffs());
  std::vector<TowerElement> c;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    if (!mask[i]) c.push_back(q[i]);
  }
  return QForm(q.tower(), std::move(c));
}

/// A vector x with q(x) = a, or nullopt when a is not represented.
inline std::optional<std::vector<TowerElement>> represents(const QForm& q, const TowerElement& a) {
  if (!(a.tower() == q.tower())) throw MixedField("value and form belong to different towers");
  if (a.is_zero()) return std::vector<TowerElement>(q.dim(), q.tower().zero());
  if (q.dim() == 0) return std::nullopt;
  return solve_affine(SemilinearSystem::scalars(q.tower(), q.coeffs()), {a});
}

/// D(psi) contained in D(phi); on anisotropic forms this is the subform relation.
inline bool is_subform_of(const QForm& psi, const QForm& phi) {
  detail::require_same_tower(psi, phi);
  if (psi.dim() == 0) return true;
  std::vector<TowerElement> cols = phi.coeffs();
  cols.insert(cols.end(), psi.coeffs().begin(), psi.coeffs().end());
  const auto mask = detail::dependent_mask(phi.tower(), cols);
  return std::all_of(mask.begin() + static_cast<std::ptrdiff_t>(phi.dim()), mask.end(),
                     [](bool b) { return b; });
}

inline bool d_equal(const QForm& a, const QForm& b) {
  return is_subform_of(a, b) && is_subform_of(b, a);
}

inline bool isometric(const QForm& a, const QForm& b) {
  return a.dim() == b.dim() && d_equal(a, b);
}

inline QForm tensor(const QForm& s, const QForm& v) {
  detail::require_same_tower(s, v);
  std::vector<TowerElement> c;
  c.reserve(s.dim() * v.dim());
  for (const auto& a : s.coeffs()) {
    for (const auto& b : v.coeffs()) c.push_back(a * b);
  }
  return QForm(s.tower(), std::move(c));
}

inline QForm perp(const QForm& s, const QForm& v) {
  detail::require_same_tower(s, v);
  std::vector<TowerElement> c = s.coeffs();
  c.insert(c.end(), v.coeffs().begin(), v.coeffs().end());
  return QForm(s.tower(), std::move(c));
}

inline QForm scale(const TowerElement& a, const QForm& s) {
  if (!(a.tower() == s.tower())) throw MixedField("scalar and form belong to different towers");
  if (a.is_zero()) throw InvalidOperand("cannot scale a form by zero");
  std::vector<TowerElement> c;
  c.reserve(s.dim());
  for (const auto& x : s.coeffs()) c.push_back(a * x);
  return QForm(s.tower(), std::move(c));
}

/// Norm form of phi as a quasi-Pfister form whose value set is the field L^2(a_0 a_i).
///
/// Builds a product basis B of that field one slot at a time: b = a_0 a_i joins as a slot
/// only when it falls outside span_{L^2}(B), and then B doubles to B u bB.
inline PfisterForm norm_form(const QForm& phi) {
  const FieldTower& t = phi.tower();
  auto first = std::find_if(phi.coeffs().begin(), phi.coeffs().end(),
                            [](const TowerElement& x) { return !x.is_zero(); });
  if (first == phi.coeffs().end()) throw InvalidOperand("norm form of the zero form");
  const TowerElement a0 = *first;
  std::vector<TowerElement> slots;
  std::vector<TowerElement> basis{t.one()};
  for (auto it = std::next(first); it != phi.coeffs().end(); ++it) {
    if (it->is_zero()) continue;
    const TowerElement b = a0 * *it;
    std::vector<TowerElement> cols = basis;
    cols.push_back(b);
    if (detail::dependent_mask(t, cols).back()) continue;
    slots.push_back(b);
    const std::size_t n = basis.size();
    for (std::size_t i = 0; i < n; ++i) basis.push_back(b * basis[i]);
    check_deadline();
  }
  return PfisterForm(t, std::move(slots));
}

inline std::size_t lndeg(const QForm& phi) { return norm_form(phi).fold(); }

/// Smallest s with dim <= 2^(s+1); -1 for dimension 1.
inline int dimension_exponent(std::size_t dim) {
  if (dim == 0) throw InvalidOperand("dimension exponent of the zero form");
  int s = -1;
  while ((std::size_t{1} << (s + 1)) < dim) ++s;
  return s;
}

struct NeighbourReport {
  bool neighbour = false;
  std::size_t lndeg = 0;
  int s = -1;
};

inline NeighbourReport quasi_pfister_neighbour_report(const QForm& phi) {
  if (phi.dim() == 0) throw InvalidOperand("neighbour test on the zero form");
  if (!is_anisotropic(phi)) throw IsotropicInput("neighbour test needs an anisotropic form");
  NeighbourReport r;
  r.lndeg = lndeg(phi);
  r.s = dimension_exponent(phi.dim());
  r.neighbour = static_cast<int>(r.lndeg) == r.s + 1;
  return r;
}

inline bool is_quasi_pfister_neighbour(const QForm& phi) {
  return quasi_pfister_neighbour_report(phi).neighbour;
}

/// Anisotropic and similar to a quasi-Pfister form.
inline bool is_similar_to_quasi_pfister(const QForm& phi) {
  if (phi.dim() == 0 || !is_anisotropic(phi)) return false;
  return (std::size_t{1} << lndeg(phi)) == phi.dim();
}

inline bool is_similarity_factor(const TowerElement& a, const QForm& phi) {
  if (!(a.tower() == phi.tower())) throw MixedField("scalar and form belong to different towers");
  if (a.is_zero()) return false;
  const QForm an = anisotropic_part(phi);
  return is_subform_of(scale(a, an), an);
}

struct SimilarityField {
  /// L^2-basis of G(phi) u {0}, each element a similarity factor.
  std::vector<TowerElement> basis;
  /// Field generators over L^2; their quasi-Pfister form has value set G(phi) u {0}.
  std::vector<TowerElement> generators;
  std::size_t log_dim = 0;
};

/// Similarity factors of an anisotropic form.
///
/// With d_i = c_1 c_i the form <d_i> is similar to phi and represents 1, so G u {0} is the set
/// of a in D = span(d_i) with a d_j in D for every j. Starting from V = D, each coefficient cuts
/// V down to {sum y_b^2 v_b : sum y_b^2 v_b d_j in D}, one single-row system at a time.
/// D is a vector space over G u {0}, so an odd dimension leaves only the squares.
inline SimilarityField similarity_field(const QForm& phi) {
  if (phi.dim() == 0) throw InvalidOperand("similarity field of the zero form");
  if (!is_anisotropic(phi)) throw IsotropicInput("similarity field needs an anisotropic form");
  const FieldTower& t = phi.tower();
  const std::size_t n = phi.dim();
  std::vector<TowerElement> d;
  for (const auto& c : phi.coeffs()) d.push_back(phi[0] * c);

  SimilarityField out;
  if (n % 2 == 1) {
    out.basis.push_back(t.one());
    return out;
  }
  if (n == 2) {
    out.basis = {t.one(), d[1]};
    out.generators = {d[1]};
    out.log_dim = 1;
    return out;
  }
  std::vector<TowerElement> v = d;
  for (std::size_t j = 1; j < n && v.size() > 1; ++j) {
    std::vector<TowerElement> cols = d;
    for (const auto& b : v) cols.push_back(b * d[j]);
    const auto k = solve_homogeneous(SemilinearSystem::scalars(t, cols));
    std::vector<TowerElement> next;
    for (std::size_t idx = 0; idx < k.free_blocks.size(); ++idx) {
      const std::size_t f = k.free_blocks[idx];
      if (f < n) throw InternalError("similarity system has a dependent coefficient");
      const auto& x = k.basis[idx];
      const TowerElement pivot = x[f];
      if (!pivot.in_rational_field() || pivot.is_zero()) {
        throw InternalError("similarity witness has an unexpected free coordinate");
      }
      const RatFunc inv = pivot.coord(0).inverse();
      TowerElement a = t.zero();
      for (std::size_t b = 0; b < v.size(); ++b) {
        const TowerElement y = x[n + b] * inv;
        if (!y.is_zero()) a += y.squared() * v[b];
      }
      next.push_back(std::move(a));
    }
    v = std::move(next);
    check_deadline();
  }
  if (v.size() == 1) v = {t.one()};
  out.basis = std::move(v);

  std::size_t size = out.basis.size();
  while (size > 1 && size % 2 == 0) size /= 2;
  if (size != 1) throw InternalError("similarity factors do not span a power-of-two space");
  std::vector<TowerElement> span{t.one()};
  for (const auto& g : out.basis) {
    if (span.size() == out.basis.size()) break;
    std::vector<TowerElement> cols = span;
    cols.push_back(g);
    if (detail::dependent_mask(t, cols).back()) continue;
    out.generators.push_back(g);
    const std::size_t m = span.size();
    for (std::size_t i = 0; i < m; ++i) span.push_back(g * span[i]);
  }
  if (span.size() != out.basis.size()) {
    throw InternalError("similarity factors are not closed under multiplication");
  }
  out.log_dim = out.generators.size();
  return out;
}

/// phi_an ~ pi (x) sigma with D-set equality, or PreconditionError when pi does not divide.
///
/// The quotient is greedy: a coefficient of phi_an joins sigma when pi (x) sigma misses it.
inline QForm divide_by_quasi_pfister(const QForm& phi, const PfisterForm& pi) {
  if (!(phi.tower() == pi.tower())) throw MixedField("form and divisor belong to different towers");
  const QForm an = anisotropic_part(phi);
  const QForm p = pi.expand();
  if (!is_anisotropic(p)) throw PreconditionError("divisor " + pi.to_string() + " is isotropic");
  for (const auto& a : pi.slots()) {
    if (!is_subform_of(scale(a, an), an)) {
      throw PreconditionError("slot " + a.to_string() + " is not a similarity factor");
    }
  }
  QForm sigma(phi.tower(), {});
  for (const auto& c : an.coeffs()) {
    if (is_subform_of(QForm(phi.tower(), {c}), tensor(p, sigma))) continue;
    sigma = perp(sigma, QForm(phi.tower(), {c}));
    check_deadline();
  }
  if (sigma.dim() * p.dim() != an.dim() || !d_equal(tensor(p, sigma), an)) {
    throw InternalError("quasi-Pfister division did not reconstruct the form");
  }
  return sigma;
}

struct Divisibility {
  std::size_t index = 0;
  PfisterForm divisor;
  QForm quotient;
};

inline Divisibility divisibility_index(const QForm& phi) {
  const SimilarityField g = similarity_field(phi);
  PfisterForm pi(phi.tower(), g.generators);
  QForm sigma = divide_by_quasi_pfister(phi, pi);
  return {g.log_dim, std::move(pi), std::move(sigma)};
}

}  // namespace quasilin
