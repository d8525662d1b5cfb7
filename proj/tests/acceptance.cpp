#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "quasilin/harness.hpp"

using namespace quasilin;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

QForm form(const FieldTower& t, std::vector<TowerElement> c) { return QForm(t, std::move(c)); }

Poly2 random_poly(std::mt19937_64& rng, std::size_t vars, std::size_t max_terms, unsigned max_degree) {
  std::vector<Monomial> ms;
  const std::size_t terms = 1 + rng() % max_terms;
  for (std::size_t k = 0; k < terms; ++k) {
    Monomial m;
    for (std::size_t v = 0; v < vars; ++v) m.set_exponent(v, static_cast<unsigned>(rng() % (max_degree + 1)));
    ms.push_back(m);
  }
  Poly2 p = Poly2::from_terms(ms);
  return p.is_zero() ? Poly2::one() : p;
}

QForm random_anisotropic(std::mt19937_64& rng, const FieldTower& k, std::size_t lo, std::size_t hi) {
  while (true) {
    const std::size_t dim = lo + rng() % (hi - lo + 1);
    std::vector<TowerElement> c;
    for (std::size_t i = 0; i < dim; ++i) c.push_back(k.constant(RatFunc(random_poly(rng, k.num_variables(), 3, 2))));
    QForm an = anisotropic_part(form(k, c));
    if (an.dim() >= 2) return an;
  }
}

std::vector<TowerElement> vars_of(const FieldTower& k) {
  std::vector<TowerElement> out;
  for (std::size_t i = 0; i < k.num_variables(); ++i) out.push_back(k.variable(i));
  return out;
}

/// <<a>> divides phi, decided by greedy construction of the quotient.
bool binary_divides(const TowerElement& a, const QForm& phi) {
  const FieldTower& t = phi.tower();
  std::vector<TowerElement> psi;
  const auto product = [&] {
    std::vector<TowerElement> c;
    for (const auto& x : psi) {
      c.push_back(x);
      c.push_back(x * a);
    }
    return form(t, c);
  };
  for (const auto& c : phi.coeffs()) {
    if (psi.empty() || !represents(product(), c)) psi.push_back(c);
  }
  const QForm prod = product();
  return prod.dim() == phi.dim() && is_anisotropic(prod) && d_equal(prod, phi);
}

Outcome generic_norm_degree() {
  Outcome o;
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i <= n; ++i) names.push_back("X" + std::to_string(i));
    const FieldTower k = FieldTower::rational(names);
    const auto start = std::chrono::steady_clock::now();
    const std::size_t d = lndeg(form(k, vars_of(k)));
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail += "n=" + std::to_string(n) + ": lndeg " + std::to_string(d) + " ";
    o.passed = o.passed && d == n && s < 1.0;
  }
  return o;
}

Outcome separation() {
  Outcome o;
  const FieldTower k = FieldTower::rational({"t0", "t1", "t2"});
  const auto v = vars_of(k);
  const TowerElement one = k.one();
  const QForm p = form(k, v);
  const std::vector<std::pair<TowerElement, TowerElement>> pairs{
      {one, v[0]},          {v[0], v[1]},        {one, v[0] * v[1]},         {v[1], v[2] + one},
      {one, v[0] + v[1]},   {v[2], v[0] * v[1]}, {one, v[0] * v[1] * v[2]},  {v[0] + one, v[1] * v[2]},
      {v[0], v[0] * v[2]},  {one + v[1], v[0] * v[0] * v[2]}};
  const FunctionFieldStep step = affine_function_field(p);
  std::size_t zero = 0;
  for (const auto& [a, b] : pairs) {
    const QForm q = form(k, {a, b});
    if (!is_anisotropic(q)) return {false, "sample " + q.to_string() + " is isotropic"};
    const auto r = extend_and_index(q, step);
    if (r.i0 == 0) ++zero;
  }
  o.passed = zero == pairs.size();
  o.detail = std::to_string(zero) + "/" + std::to_string(pairs.size()) + " with i0 = 0";
  return o;
}

Outcome quasi_pfister_splitting() {
  const FieldTower k = FieldTower::rational({"t1", "t2"});
  const QForm pf = PfisterForm(k, {k.variable(0), k.variable(1)}).expand();
  const auto rec = knebusch_tower(pf);
  const auto own = extend_and_index(pf, affine_function_field(pf));
  Outcome o;
  o.passed = rec.status == TowerStatus::complete && rec.height == 2 && rec.steps[1].i == 2 &&
             rec.steps[2].i == 1 && rec.h_qp == std::optional<std::size_t>(0) && own.i0 == 2;
  o.detail = "h=" + std::to_string(rec.height) + " i=(" + std::to_string(rec.steps[1].i) + "," +
             std::to_string(rec.steps.size() > 2 ? rec.steps[2].i : 0) + ") hqp=" +
             (rec.h_qp ? std::to_string(*rec.h_qp) : "none") + " i0(own)=" + std::to_string(own.i0);
  return o;
}

Outcome tower_invariants() {
  std::mt19937_64 rng(4);
  const FieldTower k = FieldTower::rational({"t1", "t2", "t3"});
  std::size_t complete = 0, partial = 0, failures = 0, max_height = 0;
  std::string first;
  for (int n = 0; n < 50; ++n) {
    const QForm phi = random_anisotropic(rng, k, 2, 6);
    const auto rec = knebusch_tower(phi);
    (rec.status == TowerStatus::complete ? complete : partial)++;
    max_height = std::max(max_height, rec.height);
    for (const auto& c : check_tower_invariants(rec)) {
      if (!c.passed) {
        ++failures;
        if (first.empty()) first = phi.to_string() + " " + c.name + ": " + c.detail;
      }
    }
    for (std::size_t r = 1; r < rec.steps.size(); ++r) {
      const QForm lifted = rec.steps[r - 1].form.extended_to(rec.steps[r].tower);
      if (rec.steps[r].dim != lifted.dim() - isotropy_index(lifted)) {
        ++failures;
        if (first.empty()) first = phi.to_string() + " anisotropic dimension at step " + std::to_string(r);
      }
    }
  }
  Outcome o;
  o.passed = failures == 0;
  o.detail = std::to_string(complete) + " complete, " + std::to_string(partial) + " partial, max height " +
             std::to_string(max_height) + ", " + std::to_string(failures) + " failures" +
             (first.empty() ? "" : " (" + first + ")");
  return o;
}

Outcome conjecture_suite() {
  std::mt19937_64 rng(5);
  const FieldTower k = FieldTower::rational({"t1", "t2", "t3"});
  std::size_t failures = 0, refined_checked = 0, disputed = 0;
  std::string first;
  for (int n = 0; n < 50; ++n) {
    const QForm p = random_anisotropic(rng, k, 2, 6);
    const QForm q = random_anisotropic(rng, k, 2, 6);
    const auto r = check_conjecture(p, q);
    const bool base_needed = r.verdicts.at("conjecture_dim_p_at_most_8") != Verdict::pass;
    const bool refined_hyp = 2 * r.k <= (1L << r.s) || r.p_neighbour;
    const bool bad = r.any_failure() || base_needed || !r.conjecture || (refined_hyp && !r.refined) ||
                     r.k < 0 || r.k % (1L << r.d0_q) != 0;
    refined_checked += refined_hyp;
    for (const auto& [name, v] : r.verdicts) disputed += v == Verdict::fail && is_disputed_statement(name);
    if (bad) {
      ++failures;
      if (first.empty()) first = "p = " + p.to_string() + ", q = " + q.to_string();
    }
  }
  Outcome o;
  o.passed = failures == 0;
  o.detail = "50 pairs, refined hypothesis met in " + std::to_string(refined_checked) + ", " +
             std::to_string(failures) + " failures, " + std::to_string(disputed) + " disputed" +
             (first.empty() ? "" : " (" + first + ")");
  return o;
}

Outcome optimality() {
  const FieldTower e = FieldTower::rational({"e1", "e2"});
  const QForm p = PfisterForm(e, {e.variable(0), e.variable(1)}).expand();
  std::size_t cases = 0, exact = 0;
  std::string bad;
  for (long a = 1; a <= 2; ++a) {
    for (long k = 0; k <= 3; ++k) {
      for (long l = 0; 2 * l <= k; ++l) {
        const auto ex = build_optimality_example(p, a, k, l);
        const auto m = extend_and_index(ex.q, affine_function_field(ex.p));
        ++cases;
        if (m.d == k) {
          ++exact;
        } else if (bad.empty()) {
          bad = " (a=" + std::to_string(a) + " k=" + std::to_string(k) + " l=" + std::to_string(l) +
                " measured " + std::to_string(m.d) + ")";
        }
      }
    }
  }
  return {exact == cases, std::to_string(exact) + "/" + std::to_string(cases) + " exact" + bad};
}

Outcome similarity_equivalence() {
  std::mt19937_64 rng(6);
  const FieldTower k = FieldTower::rational({"t1", "t2", "t3"});
  const auto v = vars_of(k);
  std::size_t samples = 0, factors = 0, disagreements = 0;
  std::string first;
  while (samples < 20) {
    const TowerElement b = v[rng() % 3] * k.constant(RatFunc(random_poly(rng, 3, 2, 1))).squared() +
                           (rng() % 2 ? v[(rng() % 2) + 1] : k.zero());
    const QForm psi = random_anisotropic(rng, k, 1 + rng() % 2, 3);
    const QForm phi = anisotropic_part(tensor(PfisterForm(k, {b}).expand(), psi));
    if (phi.dim() < 2) continue;
    std::vector<TowerElement> candidates{b, b * phi[0] * phi[phi.dim() - 1], v[rng() % 3] + k.one()};
    for (const auto& g : similarity_field(phi).generators) candidates.push_back(g * b);
    const TowerElement a = candidates[rng() % candidates.size()];
    if (a.is_zero() || is_square(a)) continue;
    ++samples;
    const bool stable = is_similarity_factor(a, phi);
    const bool divides = binary_divides(a, phi);
    const FieldTower ext = adjoin_sqrt(k, "ra", a);
    const bool halves = 2 * isotropy_index(phi.extended_to(ext)) == phi.dim();
    factors += stable;
    if (stable != divides || stable != halves) {
      ++disagreements;
      if (first.empty()) first = "a = " + a.to_string() + ", phi = " + phi.to_string();
    }
  }
  Outcome o;
  o.passed = disagreements == 0 && factors > 0 && factors < samples;
  o.detail = std::to_string(samples) + " samples, " + std::to_string(factors) + " similarity factors, " +
             std::to_string(disagreements) + " disagreements" + (first.empty() ? "" : " (" + first + ")");
  return o;
}

Outcome q_equals_p() {
  std::mt19937_64 rng(7);
  const FieldTower k = FieldTower::rational({"t1", "t2", "t3"});
  const auto v = vars_of(k);
  const QForm big = PfisterForm(k, {v[0], v[1], v[2]}).expand();
  std::vector<QForm> forms;
  for (int n = 0; n < 10; ++n) forms.push_back(random_anisotropic(rng, k, 2, 6));
  for (int n = 0; n < 10; ++n) {
    std::vector<TowerElement> c = big.coeffs();
    for (std::size_t i = c.size() - 1; i > 0; --i) std::swap(c[i], c[rng() % (i + 1)]);
    c.erase(c.begin() + static_cast<std::ptrdiff_t>(5 + rng() % 3), c.end());
    const TowerElement factor = k.constant(RatFunc(random_poly(rng, 3, 2, 1)));
    forms.push_back(scale(factor, form(k, c)));
  }
  std::size_t neighbours = 0, disagreements = 0;
  std::string first;
  for (const auto& p : forms) {
    const auto r = check_conjecture(p, p);
    const bool qpn = is_quasi_pfister_neighbour(p);
    neighbours += qpn;
    if (r.refined.has_value() != qpn || r.verdicts.at("refined_q_equals_p") != Verdict::pass) {
      ++disagreements;
      if (first.empty()) first = p.to_string();
    }
  }
  Outcome o;
  o.passed = disagreements == 0;
  o.detail = std::to_string(forms.size()) + " forms, " + std::to_string(neighbours) + " neighbours, " +
             std::to_string(disagreements) + " disagreements" + (first.empty() ? "" : " (" + first + ")");
  return o;
}

Outcome oracle_agreement() {
  std::mt19937_64 rng(8);
  std::size_t cases = 0, oracle_hits = 0, isotropic = 0, disagreements = 0, witnesses = 0, bad_witnesses = 0;
  std::string first;
  const auto note = [&](const std::string& s) {
    if (first.empty()) first = s;
  };
  for (; cases < 240; ++cases) {
    const std::size_t nv = 1 + rng() % 3;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < nv; ++i) names.push_back("t" + std::to_string(i + 1));
    const FieldTower k = FieldTower::rational(names);
    const std::size_t dim = 2 + rng() % 3;
    std::vector<Poly2> a;
    std::vector<TowerElement> c;
    for (std::size_t i = 0; i < dim; ++i) {
      a.push_back(random_poly(rng, nv, 2, 2));
      c.push_back(k.constant(RatFunc(a.back())));
    }
    const QForm q = form(k, c);
    const std::size_t i0 = isotropy_index(q);
    isotropic += i0 > 0;
    for (const auto& w : isotropic_vectors(q)) {
      ++witnesses;
      const bool nonzero = std::any_of(w.begin(), w.end(), [](const TowerElement& x) { return !x.is_zero(); });
      if (!nonzero || !q.evaluate(w).is_zero()) {
        ++bad_witnesses;
        note("isotropy witness fails for " + q.to_string());
      }
    }
    const TowerElement target = k.constant(RatFunc(random_poly(rng, nv, 2, 2)));
    if (const auto w = represents(q, target)) {
      ++witnesses;
      if (!(q.evaluate(*w) == target)) {
        ++bad_witnesses;
        note("representation witness fails for " + q.to_string());
      }
    }
    if (const auto x = oracle::low_degree_isotropy(a, nv, 2)) {
      ++oracle_hits;
      Poly2 sum;
      for (std::size_t i = 0; i < dim; ++i) sum = sum + a[i] * (*x)[i].squared();
      if (!sum.is_zero() || i0 == 0) {
        ++disagreements;
        note("oracle witness for " + q.to_string() + " but i0 = " + std::to_string(i0));
      }
    }
  }
  Outcome o;
  o.passed = disagreements == 0 && bad_witnesses == 0 && oracle_hits > 0;
  o.detail = std::to_string(cases) + " cases, " + std::to_string(isotropic) + " isotropic, oracle witnesses " +
             std::to_string(oracle_hits) + ", " + std::to_string(witnesses) + " artifact witnesses checked, " +
             std::to_string(disagreements + bad_witnesses) + " disagreements" +
             (first.empty() ? "" : " (" + first + ")");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"generic norm degree", 3.0, generic_norm_degree},
      {"separation instance", 5.0, separation},
      {"quasi-Pfister splitting", 10.0, quasi_pfister_splitting},
      {"tower invariants on 50 random forms", 600.0, tower_invariants},
      {"conjecture suite on 50 random pairs", 900.0, conjecture_suite},
      {"optimality construction", 600.0, optimality},
      {"similarity factor equivalence", 600.0, similarity_equivalence},
      {"q = p diagnostic", 600.0, q_equals_p},
      {"low-degree oracle agreement", 600.0, oracle_agreement},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s > criteria[i].limit_s) {
      o.passed = false;
      o.detail += " (over the " + std::to_string(static_cast<int>(criteria[i].limit_s)) + " s limit)";
    }
    failed += !o.passed;
    std::printf("[%s] %zu %s (%.2f s): %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].name, s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
