#pragma once

#include <chrono>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "quasilin/deadline.hpp"
#include "quasilin/harness.hpp"
#include "quasilin/script.hpp"
#include "quasilin/splitting.hpp"

namespace quasilin::cli {

using nlohmann::ordered_json;

inline constexpr const char* kSchema = "quasilin/1";

enum ExitCode : int { ok = 0, statement_failure = 1, parse_error = 2, resource_limit = 3 };

struct Options {
  bool json = false;
  std::uint64_t seed = 0;
  std::size_t var_budget = kDefaultVariableBudget;
  /// Wall-clock limit for the whole script; zero disables it.
  double timeout_s = 600.0;
};

struct RunResult {
  int exit_code = ok;
  ordered_json document;
  std::string text;
};

namespace detail {

inline void require_budget(const FieldTower& t, std::size_t extra, std::size_t budget, const std::string& what) {
  if (t.num_variables() + extra > budget) {
    throw ResourceLimit(what + " needs " + std::to_string(t.num_variables() + extra) +
                        " variables, budget is " + std::to_string(budget));
  }
}

inline ordered_json decomposition(const std::optional<Decomposition>& d, long modulus) {
  ordered_json j{{"modulus", modulus}};
  if (d) {
    j["a"] = d->a;
    j["epsilon"] = d->epsilon;
  } else {
    j["a"] = nullptr;
    j["epsilon"] = nullptr;
  }
  return j;
}

inline ordered_json invariants(const std::string& name, const QForm& q) {
  const QForm an = anisotropic_part(q);
  ordered_json j{{"command", "invariants"},  {"form", name},          {"literal", q.to_string()},
                 {"dim", q.dim()},           {"i0", q.dim() - an.dim()}, {"defect", defect(q)},
                 {"anisotropic_part", an.to_string()}};
  if (an.dim() == 0) {
    j["lndeg"] = nullptr;
    j["norm_form"] = nullptr;
    j["divisibility_index"] = nullptr;
    j["quasi_pfister_neighbour"] = false;
    return j;
  }
  const PfisterForm n = norm_form(an);
  j["lndeg"] = n.fold();
  j["norm_form"] = n.to_string();
  j["divisibility_index"] = divisibility_index(an).index;
  j["quasi_pfister_neighbour"] = is_quasi_pfister_neighbour(an);
  return j;
}

inline ordered_json tower(const std::string& name, const QForm& q, const Options& opt, bool& failed) {
  const QForm an = anisotropic_part(q);
  const SplittingTowerRecord rec = knebusch_tower(an, opt.var_budget);
  ordered_json j{{"command", "tower"}, {"form", name}, {"anisotropic_part", an.to_string()},
                 {"status", rec.status == TowerStatus::complete ? "complete" : "partial"}};
  if (rec.status == TowerStatus::partial) j["partial_reason"] = rec.partial_reason;
  ordered_json steps = ordered_json::array();
  for (const auto& st : rec.steps) {
    steps.push_back({{"dim", st.dim}, {"i_r", st.i}, {"d_r", st.d}, {"lndeg", st.lndeg},
                     {"similar_to_quasi_pfister", st.similar_to_quasi_pfister}});
  }
  j["steps"] = steps;
  j["height"] = rec.height;
  j["hqp"] = rec.h_qp ? ordered_json(*rec.h_qp) : ordered_json(nullptr);
  j["maximal_splitting"] = rec.maximal_splitting ? ordered_json(*rec.maximal_splitting) : ordered_json(nullptr);
  j["quasi_pfister_neighbour"] = rec.neighbour;
  ordered_json checks = ordered_json::object();
  for (const auto& c : check_tower_invariants(rec)) {
    checks[c.name] = c.passed ? "pass" : "fail: " + c.detail;
    failed = failed || !c.passed;
  }
  j["invariants"] = checks;
  return j;
}

inline ordered_json check(const std::string& pn, const QForm& p, const std::string& qn, const QForm& q,
                          const Options& opt, bool& failed) {
  require_budget(p.tower(), anisotropic_part(p).dim() - 1, opt.var_budget, "F(p)");
  const ConjectureReport r = check_conjecture(p, q);
  ordered_json j{{"command", "check"}, {"p", pn}, {"q", qn}, {"dim_p", r.dim_p}, {"dim_q", r.dim_q},
                 {"s", r.s}, {"lndeg_p", r.lndeg_p}, {"i0", r.i0}, {"k", r.k}, {"d0_q", r.d0_q},
                 {"p_quasi_pfister_neighbour", r.p_neighbour}};
  j["conjecture"] = decomposition(r.conjecture, 2L << r.s);
  j["refined"] = decomposition(r.refined, 1L << r.lndeg_p);
  ordered_json v = ordered_json::object();
  ordered_json disputed = ordered_json::array();
  for (const auto& [name, verdict] : r.verdicts) {
    v[name] = to_string(verdict);
    if (verdict == Verdict::fail && is_disputed_statement(name)) disputed.push_back(name);
  }
  j["verdicts"] = v;
  j["disputed_failures"] = disputed;
  j["open_region"] = r.open_region;
  failed = failed || r.any_failure();
  return j;
}

inline ordered_json example46(const std::string& pn, const QForm& p, long a, long k, long l, const Options& opt,
                              bool& failed) {
  const long extra = a + (k - 2 * l) + l;
  if (extra >= 0) {
    require_budget(p.tower(), static_cast<std::size_t>(extra) + anisotropic_part(p).dim() - 1, opt.var_budget,
                   "example46");
  }
  const OptimalityExample ex = build_optimality_example(p, a, k, l);
  const ExtensionIndex m = extend_and_index(ex.q, affine_function_field(ex.p));
  const bool holds = m.i0 == ex.predicted_i0 && m.d == ex.predicted_k;
  failed = failed || !holds;
  return ordered_json{{"command", "example46"}, {"p", pn}, {"a", a}, {"k", k}, {"l", l},
                      {"epsilon", ex.epsilon}, {"tau", ex.tau.to_string()}, {"sigma", ex.sigma.to_string()},
                      {"field", ex.field.descriptor()}, {"q", ex.q.to_string()}, {"dim_q", ex.q.dim()},
                      {"predicted_i0", ex.predicted_i0}, {"measured_i0", m.i0}, {"measured_k", m.d},
                      {"holds", holds}};
}

inline ordered_json fuzz(const script::Statement& st, const Options& opt, bool& failed) {
  InstanceSpec spec;
  spec.seed = opt.seed;
  spec.variable_budget = opt.var_budget;
  for (const auto& [key, v] : st.options) {
    const auto u = static_cast<std::size_t>(v);
    if (key == "instances") spec.instances = u;
    if (key == "seed") spec.seed = static_cast<std::uint64_t>(v);
    if (key == "base_variables") spec.base_variables = u;
    if (key == "min_dim_p") spec.min_dim_p = u;
    if (key == "max_dim_p") spec.max_dim_p = u;
    if (key == "min_dim_q") spec.min_dim_q = u;
    if (key == "max_dim_q") spec.max_dim_q = u;
    if (key == "max_terms") spec.max_terms = u;
    if (key == "max_degree") spec.max_degree = static_cast<unsigned>(v);
    if (key == "threads") spec.threads = static_cast<unsigned>(v);
  }
  if (spec.base_variables == 0 || spec.max_terms == 0 || spec.min_dim_p == 0 || spec.min_dim_q == 0 ||
      spec.min_dim_p > spec.max_dim_p || spec.min_dim_q > spec.max_dim_q) {
    throw PreconditionError("fuzz needs base_variables, max_terms and minimum dims >= 1 with min <= max");
  }
  const FuzzReport r = fuzz_campaign(spec);
  failed = failed || r.any_failure();
  ordered_json stats = ordered_json::object();
  for (const auto& [name, c] : r.statements) {
    stats[name] = {{"pass", c.pass}, {"fail", c.fail}, {"skipped", c.skipped}, {"n/a", c.not_applicable}};
  }
  const auto listing = [](const std::vector<FuzzFailure>& fs) {
    ordered_json out = ordered_json::array();
    for (const auto& f : fs) out.push_back({{"item", f.item}, {"statement", f.statement}, {"reproducer", f.reproducer}});
    return out;
  };
  ordered_json reasons = ordered_json::object();
  for (const auto& [why, n] : r.skip_reasons) reasons[why] = n;
  return ordered_json{{"command", "fuzz"},
                      {"seed", spec.seed},
                      {"instances", r.instances},
                      {"completed", r.completed},
                      {"skipped", r.skipped},
                      {"skip_reasons", reasons},
                      {"statements", stats},
                      {"open_region", {{"instances", r.open_region}, {"conjecture_held", r.open_region_conjecture_held}}},
                      {"failures", listing(r.failures)},
                      {"disputed_failures", listing(r.disputed)}};
}

inline std::string show(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "none";
  return v.dump();
}

/// Human-readable rendering of one command result.
inline std::string render(const ordered_json& j) {
  std::ostringstream os;
  const std::string cmd = j.at("command");
  if (cmd == "invariants") {
    os << "invariants " << show(j["form"]) << " = " << show(j["literal"]) << "\n";
    for (const char* key : {"dim", "i0", "defect", "anisotropic_part", "lndeg", "norm_form", "divisibility_index",
                            "quasi_pfister_neighbour"}) {
      os << "  " << key << ": " << show(j[key]) << "\n";
    }
  } else if (cmd == "tower") {
    os << "tower " << show(j["form"]) << " (" << show(j["status"]) << ")\n";
    if (j.contains("partial_reason")) os << "  partial: " << show(j["partial_reason"]) << "\n";
    std::size_t r = 0;
    for (const auto& st : j["steps"]) {
      os << "  r=" << r++ << " dim=" << st["dim"] << " i_r=" << st["i_r"] << " d_r=" << st["d_r"]
         << " lndeg=" << st["lndeg"] << "\n";
    }
    os << "  height: " << show(j["height"]) << "\n  hqp: " << show(j["hqp"])
       << "\n  maximal_splitting: " << show(j["maximal_splitting"]) << "\n";
    for (const auto& [name, v] : j["invariants"].items()) os << "  [" << show(v) << "] " << name << "\n";
  } else if (cmd == "check") {
    os << "check " << show(j["p"]) << " " << show(j["q"]) << "\n";
    os << "  dim_p=" << j["dim_p"] << " dim_q=" << j["dim_q"] << " s=" << j["s"] << " lndeg_p=" << j["lndeg_p"]
       << " i0=" << j["i0"] << " k=" << j["k"] << "\n";
    for (const char* key : {"conjecture", "refined"}) {
      const auto& d = j[key];
      os << "  " << key << " (mod " << d["modulus"] << "): ";
      if (d["a"].is_null()) {
        os << "no decomposition\n";
      } else {
        os << "a=" << d["a"] << " epsilon=" << d["epsilon"] << "\n";
      }
    }
    for (const auto& [name, v] : j["verdicts"].items()) os << "  [" << show(v) << "] " << name << "\n";
    for (const auto& name : j["disputed_failures"]) os << "  disputed statement failed: " << show(name) << "\n";
    if (j["open_region"].get<bool>()) os << "  open region instance\n";
  } else if (cmd == "example46") {
    os << "example46 " << show(j["p"]) << " a=" << j["a"] << " k=" << j["k"] << " l=" << j["l"] << "\n";
    os << "  q = " << show(j["q"]) << "\n";
    os << "  dim_q=" << j["dim_q"] << " predicted_i0=" << j["predicted_i0"] << " measured_i0=" << j["measured_i0"]
       << " measured_k=" << j["measured_k"] << " [" << (j["holds"].get<bool>() ? "pass" : "fail") << "]\n";
  } else if (cmd == "fuzz") {
    os << "fuzz seed=" << j["seed"] << " instances=" << j["instances"] << " completed=" << j["completed"]
       << " skipped=" << j["skipped"] << "\n";
    for (const auto& [name, c] : j["statements"].items()) {
      os << "  " << name << ": pass=" << c["pass"] << " fail=" << c["fail"] << " skipped=" << c["skipped"]
         << " n/a=" << c["n/a"] << "\n";
    }
    os << "  open region: " << j["open_region"]["instances"] << " instances, conjecture held in "
       << j["open_region"]["conjecture_held"] << "\n";
    for (const auto& f : j["failures"]) {
      os << "  FAILED " << show(f["statement"]) << " (item " << f["item"] << ")\n" << show(f["reproducer"]);
    }
    for (const auto& f : j["disputed_failures"]) {
      os << "  disputed " << show(f["statement"]) << " (item " << f["item"] << ")\n";
    }
  }
  return os.str();
}

}  // namespace detail

/// Parses and executes a script; errors become exit codes and an "error" entry in the document.
inline RunResult run(std::string_view text, const Options& opt) {
  RunResult out;
  out.document = {{"schema", kSchema}, {"results", ordered_json::array()}};
  bool failed = false;
  const auto error = [&](int code, const std::string& kind, const std::string& message) {
    out.exit_code = code;
    out.document["error"] = {{"kind", kind}, {"message", message}};
    out.text += "error (" + kind + "): " + message + "\n";
  };
  try {
    const script::SessionScript s = script::parse(text);
    std::optional<ScopedDeadline> guard;
    if (opt.timeout_s > 0) guard.emplace(std::chrono::duration<double>(opt.timeout_s));
    script::Session session;
    for (const auto& st : s.statements) {
      if (st.kind != script::Statement::Kind::command) {
        session.apply(st);
        continue;
      }
      ordered_json r;
      const auto arg = [&](std::size_t i) { return session.form(st.names.at(i)); };
      if (st.name == "invariants") r = detail::invariants(st.names[0], arg(0));
      if (st.name == "tower") r = detail::tower(st.names[0], arg(0), opt, failed);
      if (st.name == "check") r = detail::check(st.names[0], arg(0), st.names[1], arg(1), opt, failed);
      if (st.name == "example46") {
        r = detail::example46(st.names[0], arg(0), st.options[0].second, st.options[1].second,
                              st.options[2].second, opt, failed);
      }
      if (st.name == "fuzz") r = detail::fuzz(st, opt, failed);
      out.text += detail::render(r);
      out.document["results"].push_back(std::move(r));
    }
    out.exit_code = failed ? statement_failure : ok;
  } catch (const ParseError& e) {
    error(parse_error, "parse", e.what());
    out.document["error"]["line"] = e.line();
    out.document["error"]["column"] = e.column();
  } catch (const ResourceLimit& e) {
    error(resource_limit, "resource", e.what());
  } catch (const InternalError& e) {
    error(statement_failure, "internal", e.what());
  } catch (const Error& e) {
    error(parse_error, "invalid input", e.what());
  }
  return out;
}

}  // namespace quasilin::cli
