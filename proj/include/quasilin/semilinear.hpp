#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "quasilin/deadline.hpp"
#include "quasilin/errors.hpp"
#include "quasilin/ratfunc.hpp"
#include "quasilin/tower.hpp"

namespace quasilin {

/// Dense row-major matrix over GF(2)[t].
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Poly2& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Poly2& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Poly2> data_;
};

struct Elimination {
  std::vector<std::size_t> pivot_cols;  // pivot_cols[i] is the pivot column of row i
  std::vector<std::size_t> free_cols;
  Poly2 last_pivot = Poly2::one();      // determinant of the pivot minor
};

/// Fraction-free (Bareiss) forward elimination to echelon form, in place.
///
/// Columns are scanned left to right. Within a column the pivot is the nonzero entry with the
/// fewest terms, ties going to the lowest row. Every entry stays a minor of the input, so each
/// division by the previous pivot is exact.
inline Elimination bareiss_eliminate(PolyMatrix& m) {
  Elimination out;
  Poly2 prev = Poly2::one();
  std::size_t pr = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    check_deadline();
    std::optional<std::size_t> best;
    for (std::size_t i = pr; i < m.rows(); ++i) {
      if (m.at(i, c).is_zero()) continue;
      if (!best || m.at(i, c).size() < m.at(*best, c).size()) best = i;
    }
    if (!best) {
      out.free_cols.push_back(c);
      continue;
    }
    m.swap_rows(pr, *best);
    const Poly2 p = m.at(pr, c);
    for (std::size_t i = pr + 1; i < m.rows(); ++i) {
      const Poly2 factor = m.at(i, c);
      for (std::size_t j = c + 1; j < m.cols(); ++j) {
        Poly2& a = m.at(i, j);
        const Poly2& b = m.at(pr, j);
        if (a.is_zero() && (factor.is_zero() || b.is_zero())) continue;
        Poly2 v = p * a;
        if (!factor.is_zero() && !b.is_zero()) v += factor * b;
        a = prev.is_one() ? std::move(v) : Poly2::divide_or_throw(v, prev);
      }
      m.at(i, c) = Poly2{};
      check_deadline();
    }
    out.pivot_cols.push_back(c);
    prev = p;
    ++pr;
  }
  out.last_pivot = prev;
  return out;
}

/// Kernel vector of an echelon matrix for one free column f, with v_f = D (the pivot minor)
/// and the pivot entries found by back substitution. D v is the adjugate solution, so every
/// entry is a polynomial and each division is exact.
inline std::vector<Poly2> kernel_vector(const PolyMatrix& m, const Elimination& e, std::size_t f) {
  std::vector<Poly2> v(m.cols());
  v[f] = e.last_pivot;
  for (std::size_t i = e.pivot_cols.size(); i-- > 0;) {
    Poly2 acc = m.at(i, f) * e.last_pivot;
    for (std::size_t k = i + 1; k < e.pivot_cols.size(); ++k) {
      const std::size_t c = e.pivot_cols[k];
      if (!m.at(i, c).is_zero() && !v[c].is_zero()) acc += m.at(i, c) * v[c];
    }
    v[e.pivot_cols[i]] = Poly2::divide_or_throw(acc, m.at(i, e.pivot_cols[i]));
    check_deadline();
  }
  return v;
}

namespace detail {

inline Poly2 lcm(const Poly2& a, const Poly2& b) {
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  const Poly2 g = gcd(a, b);
  return Poly2::divide_or_throw(a, g) * b;
}

/// Scales each column of a rational matrix by the lcm of its denominators.
inline PolyMatrix clear_column_denominators(const std::vector<std::vector<RatFunc>>& rows,
                                            std::size_t cols, std::vector<Poly2>& scales) {
  PolyMatrix m(rows.size(), cols);
  scales.assign(cols, Poly2::one());
  for (std::size_t j = 0; j < cols; ++j) {
    for (const auto& row : rows) {
      if (!row[j].is_zero()) scales[j] = lcm(scales[j], row[j].den());
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const RatFunc& x = rows[i][j];
      if (x.is_zero()) continue;
      m.at(i, j) = x.den().is_one() ? x.num() * scales[j]
                                    : x.num() * Poly2::divide_or_throw(scales[j], x.den());
    }
  }
  return m;
}

}  // namespace detail

struct FieldRank {
  std::size_t rank = 0;
  std::vector<std::vector<RatFunc>> kernel;
};

/// Rank and kernel basis of a matrix over K = GF(2)(t), by fraction-free elimination.
inline FieldRank rank_over_field(const std::vector<std::vector<RatFunc>>& rows, std::size_t cols,
                                 bool with_kernel = true) {
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidOperand("ragged matrix");
  }
  std::vector<Poly2> scales;
  PolyMatrix m = detail::clear_column_denominators(rows, cols, scales);
  const Elimination e = bareiss_eliminate(m);
  FieldRank out;
  out.rank = e.pivot_cols.size();
  if (!with_kernel) return out;
  for (const std::size_t f : e.free_cols) {
    const auto v = kernel_vector(m, e, f);
    std::vector<RatFunc> k(cols);
    for (std::size_t j = 0; j < cols; ++j) k[j] = RatFunc(v[j] * scales[j]);
    out.kernel.push_back(std::move(k));
  }
  return out;
}

/// Unknowns x_1..x_k in L and the equation sum_j x_j^2 A_j = 0 with columns A_j in L^n.
class SemilinearSystem {
 public:
  SemilinearSystem(FieldTower tower, std::size_t rows)
      : tower_(std::move(tower)), rows_(rows) {}

  /// One-row system whose columns are the given scalars.
  static SemilinearSystem scalars(const FieldTower& tower, const std::vector<TowerElement>& c) {
    SemilinearSystem s(tower, 1);
    for (const auto& x : c) s.add_column({x});
    return s;
  }

  void add_column(std::vector<TowerElement> column) {
    if (column.size() != rows_) throw InvalidOperand("column length does not match the system");
    for (const auto& x : column) {
      if (!(x.tower() == tower_)) throw MixedField("system entries must share one tower");
    }
    columns_.push_back(std::move(column));
  }

  const FieldTower& tower() const noexcept { return tower_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const std::vector<std::vector<TowerElement>>& columns() const noexcept { return columns_; }

 private:
  FieldTower tower_;
  std::size_t rows_;
  std::vector<std::vector<TowerElement>> columns_;
};

struct KernelDescription {
  std::size_t dim_over_L = 0;
  std::vector<std::vector<TowerElement>> basis;
  std::size_t rank_over_K = 0;
  /// Unknowns j whose column lies in the L^2-span of the earlier columns.
  std::vector<std::size_t> free_blocks;
  std::vector<std::size_t> pivot_blocks;
};

namespace detail {

/// Frobenius descent of a semilinear system to a matrix over K.
///
/// Unknown x_j = sum_e m_{j,e} r^e turns x_j^2 A_j into sum_e m_{j,e}^2 U_e A_j. Column (j, e)
/// holds the coordinates of U_e A_j: for each row, each root product f, and each square-free
/// monomial g of the Frobenius split, one K-linear equation in the m's.
struct Descent {
  std::vector<std::vector<RatFunc>> rows;
  std::size_t cols = 0;
  std::vector<std::tuple<std::size_t, std::size_t, Monomial>> row_keys;
};

inline Descent descend(const SemilinearSystem& sys) {
  const FieldTower& t = sys.tower();
  const std::size_t deg = t.degree();
  Descent d;
  d.cols = sys.size() * deg;
  std::map<std::tuple<std::size_t, std::size_t, Monomial>, std::size_t> index;
  std::vector<std::vector<std::pair<std::size_t, RatFunc>>> entries(d.cols);
  for (std::size_t j = 0; j < sys.size(); ++j) {
    for (std::size_t e = 0; e < deg; ++e) {
      const std::size_t col = j * deg + e;
      const TowerElement ue = t.from_coords(t.root_power(e));
      for (std::size_t row = 0; row < sys.rows(); ++row) {
        const TowerElement& a = sys.columns()[j][row];
        if (a.is_zero()) continue;
        const TowerElement y = e == 0 ? a : ue * a;
        for (std::size_t f = 0; f < deg; ++f) {
          for (auto& [g, s] : frobenius_split(y.coord(f))) {
            auto key = std::make_tuple(row, f, g);
            auto it = index.find(key);
            if (it == index.end()) it = index.emplace(std::move(key), index.size()).first;
            entries[col].emplace_back(it->second, std::move(s));
          }
        }
        check_deadline();
      }
    }
  }
  d.rows.assign(index.size(), std::vector<RatFunc>(d.cols));
  // Row order follows the sorted keys so that pivoting does not depend on insertion order.
  std::vector<std::size_t> order(index.size());
  d.row_keys.reserve(index.size());
  for (const auto& [key, i] : index) {
    order[i] = d.row_keys.size();
    d.row_keys.push_back(key);
  }
  for (std::size_t c = 0; c < d.cols; ++c) {
    for (auto& [i, s] : entries[c]) d.rows[order[i]][c] = std::move(s);
  }
  return d;
}

inline TowerElement assemble(const FieldTower& t, const std::vector<Poly2>& v,
                             const std::vector<Poly2>& scales, std::size_t block) {
  const std::size_t deg = t.degree();
  Coords c(deg);
  for (std::size_t e = 0; e < deg; ++e) {
    const std::size_t col = block * deg + e;
    if (!v[col].is_zero()) c[e] = RatFunc(v[col] * scales[col]);
  }
  return t.from_coords(std::move(c));
}

inline bool satisfies(const SemilinearSystem& sys, const std::vector<TowerElement>& x) {
  for (std::size_t row = 0; row < sys.rows(); ++row) {
    TowerElement acc = sys.tower().zero();
    for (std::size_t j = 0; j < sys.size(); ++j) {
      if (x[j].is_zero() || sys.columns()[j][row].is_zero()) continue;
      acc += x[j].squared() * sys.columns()[j][row];
    }
    if (!acc.is_zero()) return false;
  }
  return true;
}

/// Strips a common polynomial factor from a witness so printed values stay small.
inline void reduce_witness(std::vector<TowerElement>& x) {
  Poly2 g;
  for (const auto& xi : x) {
    for (const auto& c : xi.coords()) {
      if (c.is_zero()) continue;
      if (!c.is_polynomial()) return;
      g = g.is_zero() ? c.num() : gcd(g, c.num());
      if (g.is_one()) return;
    }
  }
  if (g.is_zero()) return;
  const RatFunc inv(Poly2::one(), g);
  for (auto& xi : x) xi = xi * inv;
}

}  // namespace detail

/// Solution space of sum_j x_j^2 A_j = 0 over L.
///
/// With columns ordered unknown-major, free K-columns come in whole blocks: block j is free
/// exactly when A_j lies in the L^2-span of A_1..A_{j-1}. One kernel vector per free block is
/// an L-basis of the solution space.
inline KernelDescription solve_homogeneous(const SemilinearSystem& sys, bool with_witnesses = true) {
  if (sys.size() == 0) throw InvalidOperand("semilinear system without unknowns");
  const std::size_t deg = sys.tower().degree();
  const detail::Descent d = detail::descend(sys);
  std::vector<Poly2> scales;
  PolyMatrix m = detail::clear_column_denominators(d.rows, d.cols, scales);
  const Elimination e = bareiss_eliminate(m);

  KernelDescription out;
  out.rank_over_K = e.pivot_cols.size();
  const std::size_t kernel_k = d.cols - out.rank_over_K;
  if (kernel_k % deg != 0) {
    throw InternalError("K-kernel dimension is not divisible by the tower degree");
  }
  std::vector<int> free_count(sys.size(), 0);
  for (const std::size_t c : e.free_cols) ++free_count[c / deg];
  for (std::size_t j = 0; j < sys.size(); ++j) {
    if (free_count[j] == 0) {
      out.pivot_blocks.push_back(j);
    } else if (static_cast<std::size_t>(free_count[j]) == deg) {
      out.free_blocks.push_back(j);
    } else {
      throw InternalError("free columns do not form whole blocks");
    }
  }
  out.dim_over_L = out.free_blocks.size();
  if (!with_witnesses) return out;
  for (const std::size_t j : out.free_blocks) {
    const auto v = kernel_vector(m, e, j * deg);
    std::vector<TowerElement> x;
    x.reserve(sys.size());
    for (std::size_t b = 0; b < sys.size(); ++b) x.push_back(detail::assemble(sys.tower(), v, scales, b));
    detail::reduce_witness(x);
    if (!detail::satisfies(sys, x)) throw InternalError("kernel witness failed substitution");
    out.basis.push_back(std::move(x));
  }
  return out;
}

/// One solution of sum_j x_j^2 A_j = B, verified by substitution, or nullopt.
inline std::optional<std::vector<TowerElement>> solve_affine(const SemilinearSystem& sys,
                                                             const std::vector<TowerElement>& b) {
  SemilinearSystem ext = sys;
  ext.add_column(b);
  const std::size_t last = ext.size() - 1;
  const std::size_t deg = ext.tower().degree();
  const detail::Descent d = detail::descend(ext);
  std::vector<Poly2> scales;
  PolyMatrix m = detail::clear_column_denominators(d.rows, d.cols, scales);
  const Elimination e = bareiss_eliminate(m);
  const bool last_free =
      std::find(e.free_cols.begin(), e.free_cols.end(), last * deg) != e.free_cols.end();
  if (!last_free) return std::nullopt;
  const auto v = kernel_vector(m, e, last * deg);
  const TowerElement y = detail::assemble(ext.tower(), v, scales, last);
  if (!y.in_rational_field() || y.is_zero()) {
    throw InternalError("affine witness has an unexpected last coordinate");
  }
  const RatFunc inv = y.coord(0).inverse();
  std::vector<TowerElement> x;
  x.reserve(sys.size());
  for (std::size_t j = 0; j < sys.size(); ++j) {
    x.push_back(detail::assemble(ext.tower(), v, scales, j) * inv);
  }
  for (std::size_t row = 0; row < sys.rows(); ++row) {
    TowerElement acc = ext.tower().zero();
    for (std::size_t j = 0; j < sys.size(); ++j) acc += x[j].squared() * sys.columns()[j][row];
    if (!(acc == b[row])) throw InternalError("affine witness failed substitution");
  }
  return x;
}

/// Square root of x in its tower, or nullopt when x is not a square.
inline std::optional<TowerElement> sqrt(const TowerElement& x) {
  const FieldTower& t = x.tower();
  if (x.is_zero()) return x;
  if (t.num_roots() == 0) {
    const auto parts = frobenius_split(x.coord(0));
    if (parts.size() != 1 || !parts[0].first.is_one()) return std::nullopt;
    return t.constant(parts[0].second);
  }
  const auto w = solve_affine(SemilinearSystem::scalars(t, {t.one()}), {x});
  if (!w) return std::nullopt;
  return (*w)[0];
}

inline bool is_square(const TowerElement& x) { return sqrt(x).has_value(); }

/// Adjoins sqrt(u), rejecting zero and square radicands.
inline FieldTower adjoin_sqrt(const FieldTower& tower, const std::string& name,
                              const TowerElement& u) {
  const TowerElement radicand = tower.embed(u);
  if (radicand.is_zero()) throw ZeroRadicand("cannot adjoin the square root of zero");
  if (is_square(radicand)) {
    throw SquareRadicand("radicand " + radicand.to_string() + " is already a square");
  }
  return tower.adjoin_root_unchecked(name, radicand);
}

/// CSV dump of the descended K-matrix: one line per (row, root product, monomial) equation.
inline void dump_descended_csv(const SemilinearSystem& sys, std::ostream& os) {
  const detail::Descent d = detail::descend(sys);
  const FieldTower& t = sys.tower();
  const auto& vars = t.variable_names();
  os << "row,root,monomial";
  for (std::size_t c = 0; c < d.cols; ++c) {
    os << ",x" << c / t.degree() + 1 << "_" << c % t.degree();
  }
  os << "\n";
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& [row, f, g] = d.row_keys[i];
    os << row << "," << f << "," << g.to_string(vars);
    for (const auto& x : d.rows[i]) os << ",\"" << x.to_string(vars) << "\"";
    os << "\n";
  }
}

}  // namespace quasilin
