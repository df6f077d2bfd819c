#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "csystem.hpp"
#include "error.hpp"
#include "finset.hpp"
#include "report.hpp"
#include "universe.hpp"

namespace ccpi {

// Pointwise presentations of Π : Ob_2 -> Ob_1 and λ : Õb_2 -> Õb_1.
using PiEval = std::function<ObN(const Context&, const ObN&)>;
using LambdaEval = std::function<TObN(const Context&, const TObN&)>;

// (Π, λ) derived from (P, P̃). Yoneda followed by restriction along int acts on
// a map g : int(Γ) -> X by post-composition, so
//   Π_Γ(T) = μ1⁻¹(μ2(T) ; P),   λ_Γ(o) = μ̃1⁻¹(μ̃2(o) ; P̃).
// The structure is not required to be a pre-structure; the checks below find
// out whether the result is one.
class PiLambda {
 public:
  PiLambda(const CSystem& cs, PStructure s) : cs_(&cs), s_(std::move(s)) {
    const PolyData& poly = cs.poly();
    if (!(s_.P.dom() == poly.ip_u) || !(s_.P.cod() == cs.universe().codes()) ||
        !(s_.P_tilde.dom() == poly.ip_ut) || !(s_.P_tilde.cod() == cs.universe().total())) {
      throw CompositionError("PiLambda: (P, P_tilde) endpoints do not match the universe");
    }
  }

  const CSystem& csystem() const { return *cs_; }
  const PStructure& structure() const { return s_; }

  ObN pi(const Context& g, const ObN& t) const {
    if (t.n != 2) throw DomainError("pi: expects an element of Ob_2");
    return cs_->mu_inv(g, 1, compose(cs_->mu(g, t), s_.P));
  }

  TObN lambda(const Context& g, const TObN& o) const {
    if (o.type.n != 2) throw DomainError("lambda: expects an element of Õb_2");
    return cs_->mu_tilde_inv(g, 1, compose(cs_->mu_tilde(g, o), s_.P_tilde));
  }

  PiEval pi_eval() const {
    return [self = *this](const Context& g, const ObN& t) { return self.pi(g, t); };
  }
  LambdaEval lambda_eval() const {
    return [self = *this](const Context& g, const TObN& o) { return self.lambda(g, o); };
  }

 private:
  const CSystem* cs_;
  PStructure s_;
};

inline ObN pi_op(const PiLambda& e, const Context& g, const ObN& t) { return e.pi(g, t); }
inline TObN lambda_op(const PiLambda& e, const Context& g, const TObN& o) { return e.lambda(g, o); }

namespace detail {

struct Fiberwise {
  Context ctx;
  std::vector<ObN> ob2;
  std::vector<TObN> tob2;
};

inline std::vector<Fiberwise> tabulate_contexts(const CSystem& cs, std::size_t max_len, std::uint64_t budget) {
  std::vector<Fiberwise> out;
  for (auto& g : cs.contexts_up_to(max_len, budget)) {
    Fiberwise f{g, cs.enum_ob(g, 2), cs.enum_tob(g, 2)};
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

// The commuting square ∂λ = Π∂ and naturality of Π and λ, over all contexts of
// length <= max_len and all morphisms between them.
inline Report check_pre_pi_lambda(const CSystem& cs, const PiEval& pi, const LambdaEval& lambda,
                                  std::size_t max_len, std::uint64_t budget) {
  const auto table = detail::tabulate_contexts(cs, max_len, budget);

  std::uint64_t work = 0;
  for (const auto& src : table) {
    for (const auto& dst : table) {
      work = sat_add(work, sat_mul(cs.hom_count(src.ctx, dst.ctx), dst.ob2.size() + dst.tob2.size()));
    }
  }
  if (work > budget) {
    throw BudgetExceeded("check_pre_pi_lambda: " + (work == kSaturated ? std::string("too many") : std::to_string(work)) +
                         " naturality instances exceed the budget of " + std::to_string(budget));
  }

  Report report;
  CheckResult& square = report.add("pi-lambda-square");
  CheckResult& pi_nat = report.add("pi-naturality");
  CheckResult& lambda_nat = report.add("lambda-naturality");

  std::vector<std::vector<ObN>> pi_values(table.size());
  std::vector<std::vector<TObN>> lambda_values(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& fw = table[i];
    for (const auto& t : fw.ob2) pi_values[i].push_back(pi(fw.ctx, t));
    for (const auto& o : fw.tob2) {
      lambda_values[i].push_back(lambda(fw.ctx, o));
      ++square.cases;
      if (!(boundary(lambda_values[i].back()) == pi(fw.ctx, boundary(o)))) {
        square.fail("boundary of lambda differs from pi of the boundary",
                    {{"context", to_val(fw.ctx)}, {"o", to_val(o)}, {"lambda", to_val(lambda_values[i].back())}});
      }
    }
  }

  for (const auto& src : table) {
    for (std::size_t j = 0; j < table.size(); ++j) {
      const auto& dst = table[j];
      cs.for_each_hom(src.ctx, dst.ctx, [&](const CtxMor& f) {
        for (std::size_t k = 0; k < dst.ob2.size(); ++k) {
          ++pi_nat.cases;
          if (!pi_nat.ok) continue;
          const ObN lhs = pi(src.ctx, cs.f_star(f, dst.ob2[k]));
          const ObN rhs = cs.f_star(f, pi_values[j][k]);
          if (!(lhs == rhs)) {
            pi_nat.fail("pi does not commute with restriction",
                        {{"morphism", to_val(f)}, {"T", to_val(dst.ob2[k])}, {"pi_of_restriction", to_val(lhs)},
                         {"restriction_of_pi", to_val(rhs)}});
          }
        }
        for (std::size_t k = 0; k < dst.tob2.size(); ++k) {
          ++lambda_nat.cases;
          if (!lambda_nat.ok) continue;
          const TObN lhs = lambda(src.ctx, cs.restrict(f, dst.tob2[k]));
          const TObN rhs = cs.restrict(f, lambda_values[j][k]);
          if (!(lhs == rhs)) {
            lambda_nat.fail("lambda does not commute with restriction",
                            {{"morphism", to_val(f)}, {"o", to_val(dst.tob2[k])}, {"lambda_of_restriction", to_val(lhs)},
                             {"restriction_of_lambda", to_val(rhs)}});
          }
        }
      });
    }
  }
  return report;
}

inline Report check_pre_pi_lambda(const PiLambda& e, std::size_t max_len, std::uint64_t budget) {
  return check_pre_pi_lambda(e.csystem(), e.pi_eval(), e.lambda_eval(), max_len, budget);
}

// The square of presheaves is a pullback at Γ: o -> (∂o, λ(o)) is a bijection
// from Õb_2(Γ) onto {(T, s) in Ob_2(Γ) x Õb_1(Γ) | Π(T) = ∂s}.
inline Verdict verify_pi_lambda_pullback(const CSystem& cs, const PiEval& pi, const LambdaEval& lambda, const Context& g) {
  std::set<std::pair<ObN, TObN>> target;
  const auto tob1 = cs.enum_tob(g, 1);
  for (const auto& t : cs.enum_ob(g, 2)) {
    const ObN pt = pi(g, t);
    for (const auto& s : tob1) {
      if (boundary(s) == pt) target.emplace(t, s);
    }
  }
  std::map<std::pair<ObN, TObN>, TObN> seen;
  for (const auto& o : cs.enum_tob(g, 2)) {
    std::pair<ObN, TObN> image{boundary(o), lambda(g, o)};
    if (!target.count(image)) {
      return Verdict::fail("image of o is not in the pullback (square does not commute)",
                           {{"context", to_val(g)}, {"o", to_val(o)}});
    }
    auto [it, fresh] = seen.emplace(image, o);
    if (!fresh) {
      return Verdict::fail("two sections have the same boundary and lambda",
                           {{"context", to_val(g)}, {"first", to_val(it->second)}, {"second", to_val(o)}});
    }
  }
  for (const auto& pt : target) {
    if (!seen.count(pt)) {
      return Verdict::fail("pair (T, s) with pi(T) = boundary(s) has no preimage",
                           {{"context", to_val(g)}, {"T", to_val(pt.first)}, {"s", to_val(pt.second)}});
    }
  }
  return Verdict::pass();
}

inline bool check_pi_lambda_pullback(const PiLambda& e, const Context& g) {
  return verify_pi_lambda_pullback(e.csystem(), e.pi_eval(), e.lambda_eval(), g).ok;
}

// Survivors of the search for P (resp. P̃) whose post-composition reproduces
// the evaluators on every test context. At most two are kept per side.
struct RecoverySearch {
  std::vector<FinFun> p_candidates;
  std::vector<FinFun> p_tilde_candidates;
  std::uint64_t p_examined = 0;
  std::uint64_t p_tilde_examined = 0;
};

namespace detail {

// Constraint (domain position, required codomain position); an unsatisfiable
// observation is recorded as a codomain position that cannot occur.
using Constraint = std::pair<std::uint32_t, std::uint32_t>;
inline constexpr std::uint32_t kImpossible = 0xffffffffu;

inline std::vector<FinFun> survivors(const FinSet& dom, const FinSet& cod, const std::vector<Constraint>& constraints,
                                     std::uint64_t budget, std::uint64_t& examined) {
  if (function_count(dom, cod) > budget) {
    throw BudgetExceeded("recover_p_structure: candidate space exceeds the budget of " + std::to_string(budget));
  }
  std::vector<FinFun> out;
  for_each_function(dom, cod, [&](const FinFun& cand) {
    ++examined;
    for (const auto& [c, v] : constraints) {
      if (cand.indices()[c] != v) return true;
    }
    out.push_back(cand);
    return out.size() < 2;
  });
  return out;
}

}  // namespace detail

inline RecoverySearch search_p_structure(const CSystem& cs, const PiEval& pi, const LambdaEval& lambda,
                                         const std::vector<Context>& test_contexts, std::uint64_t budget) {
  const PolyData& poly = cs.poly();
  const Universe& u = cs.universe();
  std::vector<detail::Constraint> on_p;
  std::vector<detail::Constraint> on_pt;
  for (const auto& g : test_contexts) {
    for (const auto& t : cs.enum_ob(g, 2)) {
      const FinFun lhs = cs.mu(g, t);
      FinFun rhs;
      try {
        rhs = cs.mu(g, pi(g, t));
      } catch (const Error&) {
        on_p.emplace_back(0, detail::kImpossible);
        continue;
      }
      for (std::size_t x = 0; x < lhs.dom().size(); ++x) {
        on_p.emplace_back(poly.ip_u.index_or_throw(lhs.image_at(x)), u.codes().index_or_throw(rhs.image_at(x)));
      }
    }
    for (const auto& o : cs.enum_tob(g, 2)) {
      const FinFun lhs = cs.mu_tilde(g, o);
      FinFun rhs;
      try {
        rhs = cs.mu_tilde(g, lambda(g, o));
      } catch (const Error&) {
        on_pt.emplace_back(0, detail::kImpossible);
        continue;
      }
      for (std::size_t x = 0; x < lhs.dom().size(); ++x) {
        on_pt.emplace_back(poly.ip_ut.index_or_throw(lhs.image_at(x)), u.total().index_or_throw(rhs.image_at(x)));
      }
    }
  }
  RecoverySearch out;
  out.p_candidates = detail::survivors(poly.ip_u, u.codes(), on_p, budget, out.p_examined);
  out.p_tilde_candidates = detail::survivors(poly.ip_ut, u.total(), on_pt, budget, out.p_tilde_examined);
  return out;
}

// Inverts the construction by finite search. Nothing if no (P, P̃) explains
// the evaluators; AmbiguousRecovery if the test contexts do not separate
// candidates.
inline std::optional<PStructure> recover_p_structure(const CSystem& cs, const PiEval& pi, const LambdaEval& lambda,
                                                     const std::vector<Context>& test_contexts, std::uint64_t budget) {
  const RecoverySearch found = search_p_structure(cs, pi, lambda, test_contexts, budget);
  if (found.p_candidates.empty() || found.p_tilde_candidates.empty()) return std::nullopt;
  if (found.p_candidates.size() > 1 || found.p_tilde_candidates.size() > 1) {
    throw AmbiguousRecovery("recover_p_structure: test contexts do not separate candidate structures");
  }
  return PStructure{found.p_candidates.front(), found.p_tilde_candidates.front()};
}

struct StructureAudit {
  PStructure structure;
  bool pre_pi_lambda = false;
  bool pi_lambda_pullback = false;
};

struct Classification {
  StructureCounts counts;
  std::vector<StructureAudit> structures;
  std::size_t max_len = 0;
};

// Counts (pre-)structures, lists the structures, and re-verifies that each
// derived (Π, λ) is a (Π, λ)-structure on every context of length <= max_len.
inline Classification classify_universe(const CSystem& cs, std::size_t max_len, std::uint64_t budget) {
  Classification out;
  out.max_len = max_len;
  out.counts = count_p_structures(cs.universe(), cs.poly());
  const auto contexts = cs.contexts_up_to(max_len, budget);
  for (auto& s : find_p_structures(cs.universe(), cs.poly(), budget)) {
    PiLambda e(cs, s);
    StructureAudit audit{s};
    audit.pre_pi_lambda = check_pre_pi_lambda(e, max_len, budget).ok();
    audit.pi_lambda_pullback = true;
    for (const auto& g : contexts) {
      if (!check_pi_lambda_pullback(e, g)) {
        audit.pi_lambda_pullback = false;
        break;
      }
    }
    out.structures.push_back(std::move(audit));
  }
  return out;
}

}  // namespace ccpi
