#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "quasilin/deadline.hpp"
#include "quasilin/errors.hpp"
#include "quasilin/qform.hpp"
#include "quasilin/splitting.hpp"

namespace quasilin {

/// d(q) = dim(q) - 2 i_0(q); negative for sufficiently degenerate forms.
inline long defect(const QForm& q) {
  return static_cast<long>(q.dim()) - 2 * static_cast<long>(isotropy_index(q));
}

enum class Verdict { pass, fail, not_applicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "n/a";
  }
  return "?";
}

/// dim = a * modulus + epsilon with a >= 0 and |epsilon| <= k.
struct Decomposition {
  long a = 0;
  long epsilon = 0;
};

inline std::optional<Decomposition> find_decomposition(long dim, long modulus, long k) {
  if (k < 0) return std::nullopt;
  const long lo = dim / modulus;
  for (const long a : {lo, lo + 1}) {
    const long eps = dim - a * modulus;
    if (a >= 0 && eps >= -k && eps <= k) return Decomposition{a, eps};
  }
  return std::nullopt;
}

/// Statements whose literal hypothesis admits counterexamples; their failures are reported but
/// kept apart from the proven-statement failure signal.
inline bool is_disputed_statement(const std::string& name) { return name == "refined_min_bound"; }

struct ConjectureReport {
  std::size_t dim_p = 0;
  std::size_t dim_q = 0;
  int s = 0;
  std::size_t lndeg_p = 0;
  std::size_t i0 = 0;
  long k = 0;
  std::size_t d0_q = 0;
  bool p_neighbour = false;
  std::optional<Decomposition> conjecture;
  std::optional<Decomposition> refined;
  std::map<std::string, Verdict> verdicts;
  /// k strictly between 2^(s-1) and 2^s with no proven statement covering the pair.
  bool open_region = false;

  bool any_failure() const {
    return std::any_of(verdicts.begin(), verdicts.end(), [](const auto& kv) {
      return kv.second == Verdict::fail && !is_disputed_statement(kv.first);
    });
  }
};

/// Evaluates the conjecture, its refinement and every proven statement that applies to (p, q).
inline ConjectureReport check_conjecture(const QForm& p, const QForm& q) {
  if (!(p.tower() == q.tower())) throw MixedField("p and q belong to different towers");
  if (p.dim() < 2 || q.dim() < 2) throw InvalidOperand("p and q need dimension at least 2");
  if (!is_anisotropic(p) || !is_anisotropic(q)) throw IsotropicInput("p and q must be anisotropic");

  ConjectureReport r;
  r.dim_p = p.dim();
  r.dim_q = q.dim();
  r.s = dimension_exponent(p.dim());
  const PfisterForm np = norm_form(p);
  r.lndeg_p = np.fold();
  r.p_neighbour = static_cast<int>(r.lndeg_p) == r.s + 1;
  const FunctionFieldStep step = affine_function_field(p);
  r.i0 = extend_and_index(q, step).i0;
  r.k = static_cast<long>(r.dim_q) - 2 * static_cast<long>(r.i0);
  r.d0_q = divisibility_index(q).index;

  const long dq = static_cast<long>(r.dim_q);
  const long dp = static_cast<long>(r.dim_p);
  const long pow_s = 1L << r.s;
  r.conjecture = find_decomposition(dq, 2 * pow_s, r.k);
  r.refined = find_decomposition(dq, 1L << r.lndeg_p, r.k);
  const bool conj = r.conjecture.has_value();
  const bool refined = r.refined.has_value();

  auto& v = r.verdicts;
  const auto implies = [](bool hypothesis, bool conclusion) {
    if (!hypothesis) return Verdict::not_applicable;
    return conclusion ? Verdict::pass : Verdict::fail;
  };
  v["k_nonnegative"] = r.k >= 0 ? Verdict::pass : Verdict::fail;
  v["separation_bound"] =
      static_cast<long>(r.i0) <= std::max(0L, dq - pow_s) ? Verdict::pass : Verdict::fail;
  v["separation_theorem"] = implies(dq <= pow_s, r.i0 == 0);
  v["k_divisible_by_divisibility_index"] =
      r.k >= 0 && r.k % (1L << r.d0_q) == 0 ? Verdict::pass : Verdict::fail;
  if (2 * r.i0 == r.dim_q) {
    bool divisible = dq % (1L << r.lndeg_p) == 0;
    if (divisible) {
      try {
        divide_by_quasi_pfister(q, PfisterForm(q.tower(), np.slots()));
      } catch (const PreconditionError&) {
        divisible = false;
      }
    }
    v["half_isotropy_divisible_by_norm_form"] = divisible ? Verdict::pass : Verdict::fail;
  } else {
    v["half_isotropy_divisible_by_norm_form"] = Verdict::not_applicable;
  }

  // Refined statement under the hypotheses of the proven results; 2^(s-1), 2^(s-2) scaled by 4.
  v["refined_small_k"] = implies(2 * r.k <= pow_s, refined);
  v["refined_neighbour"] = implies(r.p_neighbour, refined);
  v["refined_min_bound"] =
      implies(4 * r.k <= 4 * dp - 3 * pow_s + 4 && r.k <= pow_s - 1, refined);
  v["conjecture_large_k"] = implies(r.k >= pow_s - 1, conj);
  v["conjecture_high_dim_p"] = implies(4 * dp >= 7 * pow_s - 12, conj);
  v["conjecture_dim_p_at_most_8"] = implies(dp <= 8, conj);
  v["conjecture_low_dim_q"] = implies(dq <= 2 * pow_s + r.k, conj);
  bool window = false;
  for (long n = 1; (1L << n) <= dq; ++n) window = window || dq <= (1L << n) + 2 * pow_s;
  v["conjecture_dim_q_window"] = implies(window, conj);
  v["conjecture_small_dim_q"] = implies(dq <= 4 * pow_s + 2 * pow_s, conj);
  if (d_equal(p, q) && p.dim() == q.dim()) {
    v["refined_q_equals_p"] = refined == r.p_neighbour ? Verdict::pass : Verdict::fail;
  } else {
    v["refined_q_equals_p"] = Verdict::not_applicable;
  }

  bool covered = false;
  for (const auto& [name, verdict] : v) {
    if (name.rfind("conjecture_", 0) == 0 || name.rfind("refined_", 0) == 0) {
      covered = covered || verdict != Verdict::not_applicable;
    }
  }
  r.open_region = 2 * r.k > pow_s && r.k < pow_s && !covered;
  return r;
}

struct OptimalityExample {
  FieldTower field;
  QForm p;
  QForm q;
  QForm tau;
  QForm sigma;
  long epsilon = 0;
  std::size_t predicted_i0 = 0;
  long predicted_k = 0;
};

/// q = n_p (x) <X_1..X_{a-1}> + X_a sigma + <X_{a+1}..X_{a+eps+l}> with d(q over F(p)) = k.
///
/// tau is the greedy selection of norm-form coefficients that stay independent over E[p], and
/// sigma adds the first 2^(lndeg-1) - l of the remaining coefficients to it.
inline OptimalityExample build_optimality_example(const QForm& p, long a, long k, long l) {
  if (p.dim() < 2 || !is_anisotropic(p)) {
    throw PreconditionError("p must be anisotropic of dimension at least 2");
  }
  const FieldTower& e = p.tower();
  const QForm n = norm_form(p).expand();
  const long full = static_cast<long>(n.dim());
  if (a < 1) throw PreconditionError("a must be at least 1");
  if (k < 0 || k >= full) throw PreconditionError("k must satisfy 0 <= k < 2^lndeg(p)");
  if (l < 0 || 2 * l > k) throw PreconditionError("l must satisfy 0 <= l <= k/2");
  const long eps = k - 2 * l;

  const FunctionFieldStep ep = affine_function_field(p);
  const auto mask = detail::dependent_mask(ep.tower, n.extended_to(ep.tower).coeffs());
  std::vector<TowerElement> tau_c, rest;
  for (std::size_t i = 0; i < n.dim(); ++i) (mask[i] ? rest : tau_c).push_back(n[i]);
  if (2 * tau_c.size() != n.dim()) throw InternalError("norm form did not halve over E(p)");
  std::vector<TowerElement> sigma_c = tau_c;
  sigma_c.insert(sigma_c.end(), rest.begin(), rest.end() - l);

  const auto names = e.fresh_names("X", static_cast<std::size_t>(a + eps + l));
  const FieldTower f = e.adjoin_transcendentals(names);
  const auto x = [&](long i) { return f.variable(e.num_variables() + static_cast<std::size_t>(i - 1)); };
  std::vector<TowerElement> qc;
  const QForm nf = n.extended_to(f);
  for (long i = 1; i <= a - 1; ++i) {
    for (const auto& c : nf.coeffs()) qc.push_back(c * x(i));
  }
  for (const auto& c : sigma_c) qc.push_back(f.embed(c) * x(a));
  for (long i = a + 1; i <= a + eps + l; ++i) qc.push_back(x(i));

  OptimalityExample out{f, p.extended_to(f), QForm(f, std::move(qc)), QForm(e, tau_c),
                        QForm(e, sigma_c), eps, 0, k};
  out.predicted_i0 = static_cast<std::size_t>((static_cast<long>(out.q.dim()) - k) / 2);
  return out;
}

struct InterpolationResult {
  FieldTower k_field;
  FieldTower l_field;
  TowerElement radicand;
  QForm sigma;
  QForm phi;
  QForm tau;
  std::size_t i = 0;
  std::size_t l = 0;
  long d_sigma = 0;
  long d_phi = 0;
  long d_tau = 0;
};

/// Over K = F(X), grows tau from sigma_K until nu'(X) D(tau) is contained in D(tau).
///
/// nu is normalized to <1, c_1 c_2, ..., c_1 c_n>, phi is the anisotropic part of sigma (x) nu,
/// and each appended value nu'(X) b is checked to stay in D(phi_K). With i = dim(tau) - dim(sigma)
/// the result satisfies d(sigma_L) <= i and d(phi_L) <= l - i over L = K(sqrt(nu'(X))).
inline InterpolationResult construct_interpolating_form(const QForm& sigma, const QForm& nu) {
  if (!(sigma.tower() == nu.tower())) throw MixedField("sigma and nu belong to different towers");
  if (nu.dim() < 2) throw PreconditionError("nu needs dimension at least 2");
  if (sigma.dim() == 0 || !is_anisotropic(sigma) || !is_anisotropic(nu)) {
    throw PreconditionError("sigma and nu must be anisotropic and nonzero");
  }
  const FieldTower& f = sigma.tower();
  std::vector<TowerElement> nc{f.one()};
  for (std::size_t j = 1; j < nu.dim(); ++j) nc.push_back(nu[0] * nu[j]);
  const QForm nu1(f, nc);
  const QForm phi = anisotropic_part(tensor(sigma, nu1));

  const std::size_t n = nu.dim() - 1;
  const FieldTower k = f.adjoin_transcendentals(f.fresh_names("X", n));
  TowerElement rad = k.zero();
  for (std::size_t j = 1; j <= n; ++j) {
    rad += k.embed(nc[j]) * k.variable(k.num_variables() - n + j - 1).squared();
  }
  const QForm sigma_k = sigma.extended_to(k);
  const QForm phi_k = phi.extended_to(k);

  QForm tau = sigma_k;
  for (std::size_t idx = 0; idx < tau.dim(); ++idx) {
    const TowerElement b = rad * tau[idx];
    const QForm single(k, {b});
    if (is_subform_of(single, tau)) continue;
    if (!is_subform_of(single, phi_k)) {
      throw InternalError("interpolating step left D(phi): " + b.to_string());
    }
    tau = perp(tau, single);
    check_deadline();
  }

  const FieldTower lf = adjoin_sqrt(k, k.fresh_names("r", 1).front(), rad);
  InterpolationResult out{k, lf, rad, sigma_k, phi_k, tau, 0, phi.dim() - sigma.dim(), 0, 0, 0};
  out.i = tau.dim() - sigma.dim();
  out.d_sigma = defect(sigma.extended_to(lf));
  out.d_phi = defect(phi.extended_to(lf));
  out.d_tau = defect(tau.extended_to(lf));
  if (!is_subform_of(sigma_k, tau) || !is_subform_of(tau, phi_k)) {
    throw InternalError("interpolating form is not between sigma and phi");
  }
  if (out.d_tau != 0) throw InternalError("interpolating form is not half isotropic over L");
  return out;
}

struct InstanceSpec {
  std::uint64_t seed = 0;
  std::size_t instances = 50;
  std::size_t variable_budget = kDefaultVariableBudget;
  std::size_t base_variables = 3;
  std::size_t min_dim_p = 2, max_dim_p = 4;
  std::size_t min_dim_q = 2, max_dim_q = 4;
  std::size_t max_terms = 3;
  unsigned max_degree = 2;
  double item_timeout_s = 30.0;
  unsigned threads = 1;
};

struct StatementCounters {
  std::size_t pass = 0, fail = 0, skipped = 0, not_applicable = 0;
};

struct FuzzFailure {
  std::size_t item = 0;
  std::string statement;
  std::string reproducer;
};

struct FuzzReport {
  std::size_t instances = 0;
  std::size_t completed = 0;
  std::size_t skipped = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::map<std::string, StatementCounters> statements;
  std::size_t open_region = 0;
  std::size_t open_region_conjecture_held = 0;
  std::vector<FuzzFailure> failures;
  std::vector<FuzzFailure> disputed;

  bool any_failure() const { return !failures.empty(); }
};

namespace detail {

struct FuzzItem {
  bool skipped = false;
  std::string skip_reason;
  std::map<std::string, Verdict> verdicts;
  bool open_region = false;
  bool conjecture_held = false;
  std::string reproducer;
};

inline TowerElement random_coefficient(std::mt19937_64& rng, const FieldTower& t,
                                       const InstanceSpec& spec) {
  std::vector<Monomial> ms;
  const std::size_t terms = 1 + rng() % spec.max_terms;
  for (std::size_t k = 0; k < terms; ++k) {
    Monomial m;
    for (std::size_t v = 0; v < t.num_variables(); ++v) {
      m.set_exponent(v, static_cast<unsigned>(rng() % (spec.max_degree + 1)));
    }
    ms.push_back(m);
  }
  Poly2 p = Poly2::from_terms(ms);
  if (p.is_zero()) p = Poly2::one();
  return t.constant(RatFunc(p));
}

inline QForm random_form(std::mt19937_64& rng, const FieldTower& t, const InstanceSpec& spec,
                         std::size_t lo, std::size_t hi) {
  const std::size_t dim = lo + rng() % (hi - lo + 1);
  std::vector<TowerElement> c;
  for (std::size_t i = 0; i < dim; ++i) c.push_back(random_coefficient(rng, t, spec));
  return QForm(t, std::move(c));
}

inline FuzzItem run_fuzz_item(const InstanceSpec& spec, std::uint64_t item_seed) {
  FuzzItem out;
  std::mt19937_64 rng(item_seed);
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= spec.base_variables; ++i) names.push_back("t" + std::to_string(i));
  const FieldTower f = FieldTower::rational(names);
  const QForm p = anisotropic_part(random_form(rng, f, spec, spec.min_dim_p, spec.max_dim_p));
  const QForm q = anisotropic_part(random_form(rng, f, spec, spec.min_dim_q, spec.max_dim_q));
  out.reproducer = f.descriptor() + "form p = " + p.to_string() + "\nform q = " + q.to_string() + "\n";
  if (p.dim() < 2 || q.dim() < 2) {
    out.skipped = true;
    out.skip_reason = "anisotropic part below dimension 2";
    return out;
  }
  if (f.num_variables() + p.dim() - 1 > spec.variable_budget) {
    out.skipped = true;
    out.skip_reason = "variable budget";
    return out;
  }
  try {
    ScopedDeadline guard(std::chrono::duration<double>(spec.item_timeout_s));
    const ConjectureReport r = check_conjecture(p, q);
    out.verdicts = r.verdicts;
    out.open_region = r.open_region;
    out.conjecture_held = r.conjecture.has_value();
    const SplittingTowerRecord rec = knebusch_tower(p, spec.variable_budget);
    for (const auto& c : check_tower_invariants(rec)) {
      out.verdicts["tower." + c.name] = c.passed ? Verdict::pass : Verdict::fail;
    }
  } catch (const ResourceLimit&) {
    out = FuzzItem{true, "time limit", {}, false, false, out.reproducer};
  }
  return out;
}

}  // namespace detail

/// Seeded random campaign over check_conjecture and the splitting tower invariants of p.
///
/// Item seeds come from one generator seeded with spec.seed, so the report depends only on the
/// spec; worker threads change nothing but wall time.
inline FuzzReport fuzz_campaign(const InstanceSpec& spec) {
  std::mt19937_64 seeder(spec.seed);
  std::vector<std::uint64_t> seeds(spec.instances);
  for (auto& s : seeds) s = seeder();

  std::vector<detail::FuzzItem> items(spec.instances);
  const unsigned workers = std::max(1U, std::min<unsigned>(spec.threads, static_cast<unsigned>(std::max<std::size_t>(1, spec.instances))));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < spec.instances; i += workers) {
        items[i] = detail::run_fuzz_item(spec, seeds[i]);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  FuzzReport rep;
  rep.instances = spec.instances;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.skipped) {
      ++rep.skipped;
      ++rep.skip_reasons[it.skip_reason];
      continue;
    }
    ++rep.completed;
    for (const auto& [name, v] : it.verdicts) {
      auto& c = rep.statements[name];
      if (v == Verdict::pass) ++c.pass;
      if (v == Verdict::not_applicable) ++c.not_applicable;
      if (v == Verdict::fail) {
        ++c.fail;
        (is_disputed_statement(name) ? rep.disputed : rep.failures).push_back({i, name, it.reproducer});
      }
    }
    if (it.open_region) {
      ++rep.open_region;
      rep.open_region_conjecture_held += it.conjecture_held;
    }
  }
  for (auto& [name, c] : rep.statements) c.skipped = rep.skipped;
  return rep;
}

}  // namespace quasilin
