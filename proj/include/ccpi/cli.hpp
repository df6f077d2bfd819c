#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "axioms.hpp"
#include "csystem.hpp"
#include "error.hpp"
#include "functor.hpp"
#include "json_io.hpp"
#include "pilambda.hpp"
#include "report.hpp"
#include "universe.hpp"

namespace ccpi::cli {

inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

struct RunConfig {
  std::string command;
  std::string path;
  std::size_t max_ctx_len = 2;
  std::uint64_t budget = 10'000'000;
  std::string format = "text";
};

// Collects CHECK lines and auxiliary rows; renders text or one JSON document.
class Printer {
 public:
  explicit Printer(bool json) : json_(json) { doc_["checks"] = Json::array(); }

  void check(const std::string& name, bool ok, Json detail = nullptr) {
    failed_ = failed_ || !ok;
    if (json_) {
      Json c = Json::object();
      c["name"] = name;
      c["status"] = ok ? "PASS" : "FAIL";
      if (!detail.is_null()) c["detail"] = std::move(detail);
      doc_["checks"].push_back(std::move(c));
    } else {
      text_ += "CHECK " + name + (ok ? " PASS" : " FAIL");
      if (!detail.is_null()) text_ += " " + detail.dump();
      text_ += "\n";
    }
  }

  void check(const std::string& name, const Verdict& v, Json extra = nullptr) {
    Json detail = nullptr;
    if (!v.ok) {
      detail = Json::object();
      detail["reason"] = v.reason;
      detail["witness"] = witness_to_json(v.witness);
    }
    if (!extra.is_null()) {
      if (detail.is_null()) detail = Json::object();
      for (auto& [k, x] : extra.items()) detail[k] = x;
    }
    check(name, v.ok, std::move(detail));
  }

  void check(const CheckResult& c) {
    Json detail = nullptr;
    if (json_ || !c.ok) {
      detail = Json::object();
      detail["cases"] = c.cases;
      detail["exhaustive"] = c.exhaustive;
      if (!c.ok) {
        detail["reason"] = c.reason;
        detail["witness"] = witness_to_json(c.witness);
      }
    }
    check(c.name, c.ok, std::move(detail));
  }

  void report(const Report& r) {
    for (const auto& c : r.checks) check(c);
  }

  // A text-only line and the same datum under a JSON key.
  void row(const std::string& text, const std::string& key, Json value) {
    if (json_) {
      if (!doc_.contains(key)) doc_[key] = std::move(value);
      else if (doc_[key].is_array()) doc_[key].push_back(std::move(value));
      else doc_[key] = std::move(value);
    } else {
      text_ += text + "\n";
    }
  }

  void array(const std::string& key) {
    if (json_) doc_[key] = Json::array();
  }

  bool failed() const { return failed_; }

  int finish(std::ostream& out, const std::string& command) {
    const int code = failed_ ? kFail : kPass;
    if (json_) {
      Json full = Json::object();
      full["command"] = command;
      for (auto& [k, v] : doc_.items()) full[k] = v;
      full["exit"] = code;
      out << full.dump(2) << "\n";
    } else {
      out << text_;
    }
    return code;
  }

 private:
  bool json_;
  bool failed_ = false;
  Json doc_ = Json::object();
  std::string text_;
};

inline Json obstruction_json(const Obstruction& o) {
  Json j = Json::object();
  j["element"] = val_to_json(o.element);
  j["fiber_size"] = o.fiber_size;
  return j;
}

inline Json structure_json(const PStructure& s) {
  Json j = Json::object();
  j["table"] = fun_to_json(s.P);
  j["table_tilde"] = fun_to_json(s.P_tilde);
  return j;
}

// The structure named by "P", or a FAIL line when none can be produced.
inline std::optional<PStructure> require_structure(const UniverseFile& uf, Printer& p, const std::string& what) {
  if (uf.p_kind.empty()) throw SchemaError(what + ": the universe must carry a \"P\" field");
  if (!uf.structure) {
    const StructureCounts counts = count_p_structures(uf.universe);
    Json detail = Json::object();
    detail["reason"] = "no canonical structure: some I_p(U) element needs an El size that no code has";
    if (counts.obstruction) detail["obstruction"] = obstruction_json(*counts.obstruction);
    p.check("p-structure", false, std::move(detail));
    return std::nullopt;
  }
  return uf.structure;
}

inline void guard_pullback_work(const CSystem& cs, const std::vector<Context>& contexts, std::uint64_t budget) {
  std::uint64_t work = 0;
  for (const auto& g : contexts) {
    const auto c = extension_counts(cs, g.int_obj().size());
    work = sat_add(work, sat_add(sat_mul(c.ob2, c.tob1), c.tob2));
  }
  if (work > budget) {
    throw BudgetExceeded("pullback checks need " + std::to_string(work) + " evaluations, budget is " +
                         std::to_string(budget));
  }
}

inline int cmd_check_universe(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const UniverseFile uf = load_universe(cfg.path);
  p.check("schema", true);
  p.row("universe " + universe_to_json(uf.universe).dump(), "universe", universe_to_json(uf.universe));
  if (!uf.p_kind.empty()) {
    if (auto s = require_structure(uf, p, "check")) {
      const PolyData poly(uf.universe);
      p.check("pre-p-structure", verify_pre_p_structure(uf.universe, poly, *s));
      p.check("p-structure", verify_p_structure(uf.universe, poly, *s));
    }
  }
  return p.finish(out, "check");
}

inline int cmd_derive_pi(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const UniverseFile uf = load_universe(cfg.path);
  const auto s = require_structure(uf, p, "derive-pi");
  if (!s) return p.finish(out, "derive-pi");
  const CSystem cs(uf.universe);
  const Verdict pre = verify_pre_p_structure(uf.universe, cs.poly(), *s);
  p.check("pre-p-structure", pre);
  if (!pre) return p.finish(out, "derive-pi");

  const PiLambda e(cs, *s);
  const auto contexts = cs.contexts_up_to(cfg.max_ctx_len, cfg.budget);
  guard_pullback_work(cs, contexts, cfg.budget);
  p.report(check_pre_pi_lambda(e, cfg.max_ctx_len, cfg.budget));
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    p.check("pi-lambda-pullback@" + std::to_string(i),
            verify_pi_lambda_pullback(cs, e.pi_eval(), e.lambda_eval(), contexts[i]),
            Json{{"context", val_to_json(to_val(contexts[i]))}});
  }

  // Π and λ at the empty context, through μ: rows are I_p(U) -> U and I_p(Ũ) -> Ũ.
  const Context root = cs.empty();
  p.array("pi_table");
  for (const auto& t : cs.enum_ob(root, 2)) {
    const Val in = cs.mu(root, t).image_at(0);
    const Val res = cs.mu(root, e.pi(root, t)).image_at(0);
    p.row("PI " + val_to_json(in).dump() + " " + val_to_json(res).dump(), "pi_table",
          Json{{"T", val_to_json(in)}, {"pi", val_to_json(res)}});
  }
  p.array("lambda_table");
  for (const auto& o : cs.enum_tob(root, 2)) {
    const Val in = cs.mu_tilde(root, o).image_at(0);
    const Val res = cs.mu_tilde(root, e.lambda(root, o)).image_at(0);
    p.row("LAMBDA " + val_to_json(in).dump() + " " + val_to_json(res).dump(), "lambda_table",
          Json{{"o", val_to_json(in)}, {"lambda", val_to_json(res)}});
  }
  return p.finish(out, "derive-pi");
}

inline int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const UniverseFile uf = load_universe(cfg.path);
  const PolyData poly(uf.universe);
  const StructureCounts counts = count_p_structures(uf.universe, poly);
  const auto found = find_p_structures(uf.universe, poly, cfg.budget);
  p.row("pre=" + std::to_string(counts.pre) + " structures=" + std::to_string(counts.full), "counts",
        Json{{"pre", counts.pre}, {"structures", counts.full}});
  if (counts.pre <= cfg.budget) {
    const auto all = enumerate_p_structures(uf.universe, poly, cfg.budget);
    const bool same = all.pre_structures.size() == counts.pre && all.structures == found;
    p.check("enumeration-consistency", same);
  }
  p.array("structures");
  for (const auto& s : found) p.row("STRUCTURE " + structure_json(s).dump(), "structures", structure_json(s));
  if (counts.obstruction) {
    p.row("OBSTRUCTION " + obstruction_json(*counts.obstruction).dump(), "obstruction",
          obstruction_json(*counts.obstruction));
  }
  return p.finish(out, "enumerate");
}

inline int cmd_recover(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const UniverseFile uf = load_universe(cfg.path);
  const auto s = require_structure(uf, p, "recover");
  if (!s) return p.finish(out, "recover");
  const CSystem cs(uf.universe);
  const PiLambda e(cs, *s);
  const auto tests = cs.contexts_up_to(cfg.max_ctx_len, cfg.budget);
  const RecoverySearch rs = search_p_structure(cs, e.pi_eval(), e.lambda_eval(), tests, cfg.budget);
  const bool ambiguous = rs.p_candidates.size() > 1 || rs.p_tilde_candidates.size() > 1;
  const bool none = rs.p_candidates.empty() || rs.p_tilde_candidates.empty();
  Json status{{"test_contexts", tests.size()},
              {"p_examined", rs.p_examined},
              {"p_tilde_examined", rs.p_tilde_examined},
              {"ambiguous", ambiguous}};
  p.row("RECOVERY " + status.dump(), "recovery", status);
  if (ambiguous) {
    p.check("recover", false, Json{{"reason", "test contexts do not separate candidate structures"}, {"ambiguous", true}});
  } else if (none) {
    p.check("recover", false, Json{{"reason", "no (P, P̃) reproduces the evaluators"}});
  } else {
    const PStructure got{rs.p_candidates.front(), rs.p_tilde_candidates.front()};
    const bool match = got == *s;
    p.check("recover", match, match ? Json(nullptr) : Json{{"reason", "recovered a different structure"}, {"recovered", structure_json(got)}});
    p.row("RECOVERED " + structure_json(got).dump(), "recovered", structure_json(got));
  }
  return p.finish(out, "recover");
}

inline int cmd_check_functor(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const FunctorFile ff = load_functor(cfg.path);
  const auto s = require_structure(ff.source, p, "check-functor source");
  const auto s2 = require_structure(ff.target, p, "check-functor target");
  if (!s || !s2) return p.finish(out, "check-functor");
  const CSystem src(ff.source.universe);
  const CSystem dst(ff.target.universe);
  const Homomorphism h(ff.functor, src, dst);
  p.report(check_homomorphism_laws(h, cfg.max_ctx_len, cfg.budget));
  try {
    build_psi_xi(h, cfg.max_ctx_len, cfg.budget);
    p.check("psi-xi", true);
  } catch (const ValidationError& e) {
    p.check("psi-xi", false, Json{{"reason", e.what()}});
  }
  p.report(check_pi_lambda_homomorphism(h, *s, *s2, cfg.max_ctx_len, cfg.budget));
  return p.finish(out, "check-functor");
}

inline int cmd_axioms(const RunConfig& cfg, std::ostream& out) {
  Printer p(cfg.format == "json");
  const UniverseFile uf = load_universe(cfg.path);
  const CSystem cs(uf.universe);
  AxiomOptions opt;
  opt.max_len = cfg.max_ctx_len;
  opt.context_budget = cfg.budget;
  const Report r = check_csystem_axioms(cs, opt);
  const bool exhaustive = std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.exhaustive; });
  Json frag{{"max_len", opt.max_len},
            {"contexts", cs.contexts_up_to(opt.max_len, opt.context_budget).size()},
            {"mode", exhaustive ? "exhaustive" : "sampled"}};
  if (!exhaustive) {
    frag["samples"] = opt.samples;
    frag["seed"] = opt.seed;
  }
  p.row("FRAGMENT " + frag.dump(), "fragment", frag);
  p.report(r);
  return p.finish(out, "axioms");
}

inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "check") return cmd_check_universe(cfg, out);
    if (cfg.command == "derive-pi") return cmd_derive_pi(cfg, out);
    if (cfg.command == "enumerate") return cmd_enumerate(cfg, out);
    if (cfg.command == "recover") return cmd_recover(cfg, out);
    if (cfg.command == "check-functor") return cmd_check_functor(cfg, out);
    if (cfg.command == "axioms") return cmd_axioms(cfg, out);
    err << "error: unknown command " << cfg.command << "\n";
  } catch (const BudgetExceeded& e) {
    err << "error: budget exceeded: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsage;
}

// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Finite (P, P~)-structures, derived (Pi, lambda)-structures and C-system checks", "ccpi"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--max-ctx-len", cfg.max_ctx_len, "Largest context length examined")
      ->check(CLI::Range(0, 64))
      ->capture_default_str();
  app.add_option("--budget", cfg.budget, "Search budget (candidate evaluations)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> commands{
      {"check", "Validate a universe file and its P, if any"},
      {"derive-pi", "Derive (Pi, lambda) from P and check it on all short contexts"},
      {"enumerate", "Count (pre-)structures and list the structures"},
      {"recover", "Recover P from its derived (Pi, lambda) by finite search"},
      {"check-functor", "Check a universe functor and the induced homomorphism"},
      {"axioms", "Check the C-system laws on all short contexts"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("path", cfg.path, name == "check-functor" ? "Functor JSON file" : "Universe JSON file")->required();
    sub->callback([&cfg, n = name] { cfg.command = n; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }
  if (cfg.command == "axioms" && cfg.max_ctx_len < 1) {
    err << "error: axioms needs --max-ctx-len of at least 1\n";
    return kUsage;
  }
  return dispatch(cfg, out, err);
}

}  // namespace ccpi::cli
