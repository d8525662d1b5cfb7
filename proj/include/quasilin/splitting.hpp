#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "quasilin/errors.hpp"
#include "quasilin/qform.hpp"

namespace quasilin {

inline constexpr std::size_t kDefaultVariableBudget = 12;

/// F[phi] = F(X_1..X_n)(rho) with rho^2 = a_0 (a_1 X_1^2 + ... + a_n X_n^2), phi_an = <a_0..a_n>.
struct FunctionFieldStep {
  FieldTower base;
  /// Anisotropic part of phi over the base; its coefficients define the radicand.
  QForm form;
  std::vector<std::string> variables;
  std::string root;
  TowerElement radicand;
  FieldTower tower;
  /// Isotropic vector of `form` over the new tower.
  std::vector<TowerElement> witness;
};

inline FunctionFieldStep affine_function_field(const QForm& phi) {
  const QForm an = anisotropic_part(phi);
  if (an.dim() < 2) throw SplitForm("form " + phi.to_string() + " is split");
  const FieldTower& base = phi.tower();
  const std::size_t n = an.dim() - 1;
  auto names = base.fresh_names("X", n);
  const FieldTower k = base.adjoin_transcendentals(names);
  const TowerElement a0 = k.embed(an[0]);
  TowerElement sum = k.zero();
  for (std::size_t i = 1; i <= n; ++i) {
    const TowerElement x = k.variable(k.num_variables() - n + i - 1);
    sum += k.embed(an[i]) * x.squared();
  }
  const TowerElement radicand = a0 * sum;
  const std::string root = k.fresh_names("r", 1).front();
  FieldTower l = [&] {
    try {
      return adjoin_sqrt(k, root, radicand);
    } catch (const SquareRadicand&) {
      throw InternalError("function field radicand of an anisotropic form is a square");
    }
  }();
  std::vector<TowerElement> w{l.root(l.num_roots() - 1)};
  for (std::size_t i = 1; i <= n; ++i) {
    w.push_back(l.embed(a0) * l.variable(l.num_variables() - n + i - 1));
  }
  const QForm ext = an.extended_to(l);
  if (!ext.evaluate(w).is_zero()) throw InternalError("function field witness failed substitution");
  return {base, an, std::move(names), root, radicand, l, std::move(w)};
}

struct ExtensionIndex {
  std::size_t i0 = 0;
  long d = 0;
};

/// i_0 and d = dim - 2 i_0 of q over the function field of the step.
inline ExtensionIndex extend_and_index(const QForm& q, const FunctionFieldStep& step) {
  if (!(q.tower() == step.base)) throw MixedField("form is not defined over the step's base field");
  ExtensionIndex out;
  out.i0 = isotropy_index(q.extended_to(step.tower));
  out.d = static_cast<long>(q.dim()) - 2 * static_cast<long>(out.i0);
  if (out.d < 0 && q.dim() >= 2 && is_anisotropic(q)) {
    throw InternalError("anisotropic form became more than half isotropic over a function field");
  }
  return out;
}

struct SplittingStep {
  FieldTower tower;
  QForm form;
  std::size_t dim = 0;
  /// Zero at r = 0.
  std::size_t i = 0;
  std::size_t d = 0;
  std::size_t lndeg = 0;
  bool similar_to_quasi_pfister = false;
};

enum class TowerStatus { complete, partial };

struct SplittingTowerRecord {
  std::vector<SplittingStep> steps;
  TowerStatus status = TowerStatus::complete;
  std::string partial_reason;
  /// h when complete, otherwise the number of steps taken.
  std::size_t height = 0;
  std::optional<std::size_t> h_qp;
  std::optional<bool> maximal_splitting;
  bool neighbour = false;
  int s = 0;
  bool has_divisibility = true;
};

/// Knebusch splitting tower: F_r = F_{r-1}[phi_{r-1}], phi_r the anisotropic part over F_r.
///
/// Stops with a partial status, not an error, once the next step would push the number of
/// transcendentals past `variable_budget`.
inline SplittingTowerRecord knebusch_tower(const QForm& phi,
                                           std::size_t variable_budget = kDefaultVariableBudget,
                                           bool with_divisibility = true) {
  if (phi.dim() < 2) throw SplitForm("splitting tower needs dimension at least 2");
  if (!is_anisotropic(phi)) throw IsotropicInput("splitting tower needs an anisotropic form");
  SplittingTowerRecord rec;
  rec.s = dimension_exponent(phi.dim());
  rec.has_divisibility = with_divisibility;

  const auto record = [&](const FieldTower& t, QForm form, std::size_t i) {
    SplittingStep st{t, form, form.dim(), i, 0, lndeg(form), false};
    st.similar_to_quasi_pfister = (std::size_t{1} << st.lndeg) == st.dim;
    if (with_divisibility) {
      st.d = st.similar_to_quasi_pfister ? st.lndeg : similarity_field(form).log_dim;
    }
    rec.steps.push_back(std::move(st));
  };
  record(phi.tower(), phi, 0);
  rec.neighbour = static_cast<int>(rec.steps[0].lndeg) == rec.s + 1;

  while (rec.steps.back().dim >= 2) {
    const SplittingStep& prev = rec.steps.back();
    const std::size_t needed = prev.tower.num_variables() + prev.dim - 1;
    if (needed > variable_budget) {
      rec.status = TowerStatus::partial;
      rec.partial_reason = "step " + std::to_string(rec.steps.size()) + " needs " +
                           std::to_string(needed) + " variables, budget is " +
                           std::to_string(variable_budget);
      break;
    }
    const FunctionFieldStep ff = affine_function_field(prev.form);
    QForm next = anisotropic_part(prev.form.extended_to(ff.tower));
    const std::size_t i = prev.dim - next.dim();
    if (i == 0) throw InternalError("form stayed anisotropic over its own function field");
    record(ff.tower, std::move(next), i);
    check_deadline();
  }

  rec.height = rec.steps.size() - 1;
  for (std::size_t r = 0; r < rec.steps.size(); ++r) {
    if (rec.steps[r].similar_to_quasi_pfister) {
      rec.h_qp = r;
      break;
    }
  }
  if (rec.steps.size() > 1) {
    rec.maximal_splitting = rec.steps[1].i == phi.dim() - (std::size_t{1} << rec.s);
  }
  return rec;
}

struct InvariantCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// Known relations along a splitting tower, each reported with the step that broke it.
inline std::vector<InvariantCheck> check_tower_invariants(const SplittingTowerRecord& rec) {
  std::vector<InvariantCheck> out;
  const auto& st = rec.steps;
  const auto fail = [](InvariantCheck& c, std::size_t r, const std::string& what) {
    if (!c.passed) return;
    c.passed = false;
    c.detail = "step " + std::to_string(r) + ": " + what;
  };

  InvariantCheck dims{"dims_decreasing", true, ""};
  InvariantCheck positive{"isotropy_positive", true, ""};
  InvariantCheck drop{"lndeg_drop", true, ""};
  InvariantCheck bound{"i_r_bounded_by_divisibility", true, ""};
  InvariantCheck divisible{"i_r_divisible", true, ""};
  for (std::size_t r = 1; r < st.size(); ++r) {
    const auto& a = st[r - 1];
    const auto& b = st[r];
    if (b.dim >= a.dim) fail(dims, r, "dimension " + std::to_string(b.dim) + " did not drop");
    if (b.i < 1) fail(positive, r, "i_r = 0");
    if (b.lndeg + 1 != a.lndeg) {
      fail(drop, r, "lndeg " + std::to_string(a.lndeg) + " -> " + std::to_string(b.lndeg));
    }
    if (rec.has_divisibility && b.i > (std::size_t{1} << b.d)) {
      fail(bound, r, "i_r = " + std::to_string(b.i) + " > 2^" + std::to_string(b.d));
    }
    if (rec.has_divisibility && !a.similar_to_quasi_pfister && b.i % (std::size_t{1} << a.d) != 0) {
      fail(divisible, r, "i_r = " + std::to_string(b.i) + " not divisible by 2^" +
                             std::to_string(a.d));
    }
  }
  if (rec.status == TowerStatus::complete && st.back().dim > 1) {
    fail(dims, st.size() - 1, "last form is not split");
  }
  out.push_back(dims);
  out.push_back(positive);

  InvariantCheck sum{"isotropy_sum", true, ""};
  std::size_t total = 0;
  for (std::size_t r = 1; r < st.size(); ++r) total += st[r].i;
  if (total != st.front().dim - st.back().dim) {
    fail(sum, st.size() - 1, "sum of i_r is " + std::to_string(total));
  }
  out.push_back(sum);
  out.push_back(drop);
  if (rec.has_divisibility) {
    out.push_back(bound);
    out.push_back(divisible);
  }

  if (st.size() > 1) {
    const std::size_t dim = st[0].dim;
    const std::size_t pow_s = std::size_t{1} << rec.s;
    InvariantCheck first{"first_isotropy_bound", true, ""};
    if (st[1].i > dim - pow_s) fail(first, 1, "i_1 = " + std::to_string(st[1].i));
    out.push_back(first);

    InvariantCheck criterion{"neighbour_criterion", true, ""};
    if (rec.neighbour != st[1].similar_to_quasi_pfister) {
      fail(criterion, 1, rec.neighbour ? "neighbour but phi_1 is not similar to quasi-Pfister"
                                       : "phi_1 is similar to quasi-Pfister for a non-neighbour");
    }
    out.push_back(criterion);

    InvariantCheck maximal{"maximal_splitting_neighbour", true, ""};
    // dim > 2^s + 2^(s-2), scaled by 4 to stay integral for small s.
    if (rec.maximal_splitting.value_or(false) && 4 * dim > 5 * pow_s && !rec.neighbour) {
      fail(maximal, 1, "maximal splitting without being a neighbour");
    }
    out.push_back(maximal);
  }
  return out;
}

}  // namespace quasilin
