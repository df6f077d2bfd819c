#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "csystem.hpp"
#include "error.hpp"
#include "finset.hpp"
#include "pilambda.hpp"
#include "report.hpp"
#include "universe.hpp"

namespace ccpi {

// A universe-category functor (Φ, φ, φ̃) whose object map is an injective
// relabeling of atoms, extended structurally over tuples. Atoms absent from
// the relabeling are fixed. Φ acts on maps by conjugating graphs.
class ElementwiseFunctor {
 public:
  ElementwiseFunctor(std::map<std::string, std::string> relabel, Universe source, Universe target, FinFun phi,
                     FinFun phi_tilde)
      : relabel_(std::move(relabel)),
        source_(std::move(source)),
        target_(std::move(target)),
        phi_(std::move(phi)),
        phi_tilde_(std::move(phi_tilde)) {
    const FinSet fu = apply(source_.codes());
    const FinSet fut = apply(source_.total());
    if (!(phi_.dom() == fu) || !(phi_.cod() == target_.codes())) {
      throw ValidationError("phi must be a map Φ(U) -> U'");
    }
    if (!(phi_tilde_.dom() == fut) || !(phi_tilde_.cod() == target_.total())) {
      throw ValidationError("phi_tilde must be a map Φ(Ũ) -> Ũ'");
    }
    if (apply(terminal()).size() != 1) throw ValidationError("Φ does not preserve the final object");
    const FinFun fp = apply(source_.p());
    if (Verdict v = check_pullback_square(Square::make(phi_tilde_, fp, target_.p(), phi_)); !v) {
      throw ValidationError("(Φ(p), phi, phi_tilde, p') is not a pullback square: " + v.reason);
    }
    for (std::size_t i = 0; i < fut.size(); ++i) {
      lift_.emplace(std::make_pair(fp.image_at(i), phi_tilde_.image_at(i)), fut[i]);
    }
  }

  // Φ with φ, φ̃ the inclusions Φ(U) ⊆ U', Φ(Ũ) ⊆ Ũ'.
  static ElementwiseFunctor inclusion(std::map<std::string, std::string> relabel, Universe source, Universe target) {
    ElementwiseFunctor probe_map{relabel};
    const FinSet fu = probe_map.apply(source.codes());
    const FinSet fut = probe_map.apply(source.total());
    FinFun phi = FinFun::tabulate(fu, target.codes(), [](const Val& x) { return x; });
    FinFun phi_tilde = FinFun::tabulate(fut, target.total(), [](const Val& x) { return x; });
    return ElementwiseFunctor(std::move(relabel), std::move(source), std::move(target), std::move(phi),
                              std::move(phi_tilde));
  }

  static ElementwiseFunctor identity(const Universe& u) { return inclusion({}, u, u); }

  // Φ(s) for a relabeling alone, before φ and φ̃ are known.
  static FinSet image_of(const std::map<std::string, std::string>& relabel, const FinSet& s) {
    return ElementwiseFunctor{relabel}.apply(s);
  }

  const std::map<std::string, std::string>& relabel() const { return relabel_; }
  const Universe& source() const { return source_; }
  const Universe& target() const { return target_; }
  const FinFun& phi() const { return phi_; }
  const FinFun& phi_tilde() const { return phi_tilde_; }

  Val apply(const Val& v) const {
    if (v.is_atom()) {
      auto it = relabel_.find(v.name());
      return it == relabel_.end() ? v : atom(it->second);
    }
    Val::Items items;
    items.reserve(v.size());
    for (const auto& x : v.items()) items.push_back(apply(x));
    return Val::tuple(std::move(items));
  }

  FinSet apply(const FinSet& s) const {
    std::vector<Val> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(apply(x));
    FinSet image(std::move(out));
    if (image.size() != s.size()) throw ValidationError("relabeling is not injective on a set it is applied to");
    return image;
  }

  FinFun apply(const FinFun& f) const {
    const FinSet dom = apply(f.dom());
    const FinSet cod = apply(f.cod());
    std::vector<std::uint32_t> idx(dom.size());
    for (std::size_t i = 0; i < f.dom().size(); ++i) {
      idx[dom.index_or_throw(apply(f.dom()[i]))] = static_cast<std::uint32_t>(cod.index_or_throw(apply(f.image_at(i))));
    }
    return FinFun(dom, cod, std::move(idx));
  }

  // The unique w in Φ(Ũ) with Φ(p)(w) = code and φ̃(w) = element.
  const Val& lift(const Val& code, const Val& element) const {
    auto it = lift_.find(std::make_pair(code, element));
    if (it == lift_.end()) throw DomainError("lift: no element of Φ(Ũ) over " + to_string(code) + " and " + to_string(element));
    return it->second;
  }

 private:
  explicit ElementwiseFunctor(std::map<std::string, std::string> relabel) : relabel_(std::move(relabel)) {}

  std::map<std::string, std::string> relabel_;
  Universe source_;
  Universe target_;
  FinFun phi_;
  FinFun phi_tilde_;
  std::map<std::pair<Val, Val>, Val> lift_;
};

// The comparison maps ξ0 = φ, ξ1 : Φ(I_p(U)) -> I_p'(U') and
// ξ̃1 : Φ(I_p(Ũ)) -> I_p'(Ũ').
struct PsiXi {
  FinFun xi0;
  FinFun xi1;
  FinFun xi1_tilde;
};

// The homomorphism H : CC(C, p) -> CC(C', p') induced by an elementwise
// functor, with the isomorphisms ψ(Γ) : int'(H Γ) -> Φ(int Γ) built alongside.
class Homomorphism {
 public:
  Homomorphism(const ElementwiseFunctor& functor, const CSystem& source, const CSystem& target)
      : f_(&functor), src_(&source), dst_(&target) {
    if (!(functor.source() == source.universe()) || !(functor.target() == target.universe())) {
      throw DomainError("Homomorphism: functor universes do not match the C-systems");
    }
    xi1_ = make_xi(source.poly().ip_u, target.poly().ip_u, functor.phi());
    xi1_tilde_ = make_xi(source.poly().ip_ut, target.poly().ip_ut, functor.phi_tilde());
  }

  const ElementwiseFunctor& functor() const { return *f_; }
  const CSystem& source() const { return *src_; }
  const CSystem& target() const { return *dst_; }

  // H(Γ) together with ψ of every prefix.
  struct Image {
    Context ctx;
    std::vector<FinFun> psi;
  };

  Image image(const Context& g) const {
    Image out{dst_->empty(), {}};
    out.psi.push_back(FinFun(terminal(), f_->apply(terminal()), std::vector<std::uint32_t>{0}));
    for (std::size_t k = 0; k < g.length(); ++k) {
      const FinFun& psi_k = out.psi.back();
      const FinFun phi_f = f_->apply(g.classifier(k));
      const FinFun next = compose(compose(psi_k, phi_f), f_->phi());
      out.ctx = dst_->ext(out.ctx, next);
      const FinSet image_int = f_->apply(g.int_at(k + 1));
      out.psi.push_back(FinFun::tabulate(out.ctx.int_obj(), image_int, [&](const Val& xu) {
        const Val& x = psi_k(xu[0]);
        return pair(x, f_->lift(phi_f(x), xu[1]));
      }));
    }
    return out;
  }

  Context on_context(const Context& g) const { return image(g).ctx; }
  FinFun psi(const Context& g) const { return image(g).psi.back(); }

  CtxMor on_morphism(const CtxMor& m) const {
    const Image s = image(m.src);
    const Image d = image(m.dst);
    FinFun carrier = compose(compose(s.psi.back(), f_->apply(m.carrier)), inverse(d.psi.back()));
    return CtxMor{s.ctx, d.ctx, std::move(carrier)};
  }

  ObN on_ob(const ObN& t) const { return ObN{on_context(t.whole), t.n}; }

  TObN on_tob(const TObN& o) const {
    const Context below = o.type.whole.prefix(o.type.whole.length() - 1);
    const CtxMor s = on_morphism(CtxMor{below, o.type.whole, o.section});
    return TObN{ObN{s.dst, o.type.n}, s.carrier};
  }

  const FinFun& xi0() const { return f_->phi(); }
  const FinFun& xi1() const { return xi1_; }
  const FinFun& xi1_tilde() const { return xi1_tilde_; }

 private:
  // Φ(a, s) -> (φ(Φa), e' -> value(Φ(s(e)))) where Φ(a, e) is the lift of e'.
  FinFun make_xi(const FinSet& ip_src, const FinSet& ip_dst, const FinFun& value) const {
    const Universe& tu = f_->target();
    std::vector<Val> dom;
    std::vector<Val> images;
    for (const auto& c : ip_src) {
      const Val fc = f_->apply(c);
      const Val& fa = ip_code(fc);
      const Val& a2 = f_->phi()(fa);
      Val::Items assoc;
      for (const auto& e2 : tu.el(a2)) {
        const Val& w = f_->lift(fa, pair(a2, e2));
        assoc.push_back(pair(e2, value(ip_value(fc, w[1]))));
      }
      dom.push_back(fc);
      images.push_back(ip_element(a2, std::move(assoc)));
    }
    // Sort the graph by the relabeled domain.
    std::vector<std::size_t> order(dom.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return dom[i] < dom[j]; });
    std::vector<Val> sorted_dom, sorted_images;
    for (auto i : order) {
      sorted_dom.push_back(dom[i]);
      sorted_images.push_back(images[i]);
    }
    return FinFun(FinSet::from_sorted(std::move(sorted_dom)), ip_dst, sorted_images);
  }

  const ElementwiseFunctor* f_;
  const CSystem* src_;
  const CSystem* dst_;
  FinFun xi1_;
  FinFun xi1_tilde_;
};

inline Context h_on_contexts(const Homomorphism& h, const Context& g) { return h.on_context(g); }
inline CtxMor h_on_morphisms(const Homomorphism& h, const CtxMor& f) { return h.on_morphism(f); }
inline ObN h_on_ob(const Homomorphism& h, const ObN& t) { return h.on_ob(t); }
inline TObN h_on_tob(const Homomorphism& h, const TObN& o) { return h.on_tob(o); }

// Builds ξ and validates, on every context of length <= max_len, that each
// ψ(Γ) is a bijection and that
//   ψ(Γ) ; Φ(μ_n(T)) ; ξ_{n-1} = μ'_n(H T),  ψ(Γ) ; Φ(μ̃_n(o)) ; ξ̃_{n-1} = μ̃'_n(H o)
// for n in {1, 2}, with ξ̃0 = φ̃.
inline PsiXi build_psi_xi(const Homomorphism& h, std::size_t max_len, std::uint64_t budget) {
  const CSystem& src = h.source();
  const CSystem& dst = h.target();
  const ElementwiseFunctor& f = h.functor();
  const FinFun* xis[] = {&f.phi(), &h.xi1()};
  const FinFun* xi_tildes[] = {&f.phi_tilde(), &h.xi1_tilde()};
  for (const auto& g : src.contexts_up_to(max_len, budget)) {
    const Homomorphism::Image img = h.image(g);
    const FinFun& psi = img.psi.back();
    if (!psi.is_bijective()) throw ValidationError("psi is not a bijection at context " + to_string(to_val(g)));
    for (std::size_t n = 1; n <= 2; ++n) {
      for (const auto& t : src.enum_ob(g, n)) {
        if (!(compose(compose(psi, f.apply(src.mu(g, t))), *xis[n - 1]) == dst.mu(img.ctx, h.on_ob(t)))) {
          throw ValidationError("xi" + std::to_string(n - 1) + " fails its characterizing equation at " + to_string(to_val(t)));
        }
      }
      for (const auto& o : src.enum_tob(g, n)) {
        if (!(compose(compose(psi, f.apply(src.mu_tilde(g, o))), *xi_tildes[n - 1]) == dst.mu_tilde(img.ctx, h.on_tob(o)))) {
          throw ValidationError("xi_tilde" + std::to_string(n - 1) + " fails its characterizing equation at " +
                                to_string(to_val(o)));
        }
      }
    }
  }
  return PsiXi{f.phi(), h.xi1(), h.xi1_tilde()};
}

// Commutativity of  Φ(P) ; φ = ξ1 ; P'  and  Φ(P̃) ; φ̃ = ξ̃1 ; P̃'.
inline Verdict verify_pre_p_functor(const Homomorphism& h, const PStructure& s, const PStructure& s2) {
  const ElementwiseFunctor& f = h.functor();
  const FinFun lhs = compose(f.apply(s.P), f.phi());
  const FinFun rhs = compose(h.xi1(), s2.P);
  for (std::size_t i = 0; i < lhs.dom().size(); ++i) {
    if (lhs.indices()[i] != rhs.indices()[i]) {
      return Verdict::fail("Φ(P);phi differs from xi1;P'",
                           {{"element", lhs.dom()[i]}, {"via_P", lhs.image_at(i)}, {"via_P_prime", rhs.image_at(i)}});
    }
  }
  const FinFun lhs_t = compose(f.apply(s.P_tilde), f.phi_tilde());
  const FinFun rhs_t = compose(h.xi1_tilde(), s2.P_tilde);
  for (std::size_t i = 0; i < lhs_t.dom().size(); ++i) {
    if (lhs_t.indices()[i] != rhs_t.indices()[i]) {
      return Verdict::fail("Φ(P_tilde);phi_tilde differs from xi1_tilde;P_tilde'",
                           {{"element", lhs_t.dom()[i]}, {"via_P_tilde", lhs_t.image_at(i)},
                            {"via_P_tilde_prime", rhs_t.image_at(i)}});
    }
  }
  return Verdict::pass();
}

inline bool check_pre_p_functor(const Homomorphism& h, const PStructure& s, const PStructure& s2) {
  return verify_pre_p_functor(h, s, s2).ok;
}

// H(Π_Γ(T)) = Π'_{HΓ}(H T) and H(λ_Γ(o)) = λ'_{HΓ}(H o) on every context of
// length <= max_len, plus each step of the chain
//   H(Π T) = H(μ1⁻¹(μ2 T;P)) = μ1⁻¹(ψ;Φ(μ2 T;P);ξ0) = μ1⁻¹(ψ;Φ(μ2 T);Φ(P);φ)
//          = μ1⁻¹(ψ;Φ(μ2 T);ξ1;P') = μ1⁻¹(μ2(H T);P') = Π'(H T)
// and its λ counterpart. The first check records whether the pre-(P, P̃)-functor
// hypothesis holds; the equalities are evaluated either way.
inline Report check_pi_lambda_homomorphism(const Homomorphism& h, const PStructure& s, const PStructure& s2,
                                           std::size_t max_len, std::uint64_t budget) {
  const CSystem& src = h.source();
  const CSystem& dst = h.target();
  const ElementwiseFunctor& f = h.functor();
  const PiLambda e(src, s);
  const PiLambda e2(dst, s2);

  Report report;
  CheckResult& hyp = report.add("pre-p-functor");
  CheckResult& pi_eq = report.add("pi-homomorphism");
  CheckResult& lambda_eq = report.add("lambda-homomorphism");
  CheckResult& pi_chain = report.add("pi-proof-chain");
  CheckResult& lambda_chain = report.add("lambda-proof-chain");

  hyp.cases = 1;
  if (Verdict v = verify_pre_p_functor(h, s, s2); !v) hyp.fail(v);

  for (const auto& g : src.contexts_up_to(max_len, budget)) {
    const Homomorphism::Image img = h.image(g);
    const FinFun& psi = img.psi.back();
    for (const auto& t : src.enum_ob(g, 2)) {
      const ObN ht = h.on_ob(t);
      const FinFun mu2 = src.mu(g, t);
      const ObN lhs = h.on_ob(e.pi(g, t));
      const ObN rhs = e2.pi(img.ctx, ht);
      ++pi_eq.cases;
      if (!(lhs == rhs)) {
        pi_eq.fail("H(Pi(T)) differs from Pi'(H(T))",
                   {{"context", to_val(g)}, {"T", to_val(t)}, {"H_of_Pi", to_val(lhs)}, {"Pi_prime_of_H", to_val(rhs)}});
      }
      const ObN chain[] = {
          lhs,
          h.on_ob(src.mu_inv(g, 1, compose(mu2, s.P))),
          dst.mu_inv(img.ctx, 1, compose(compose(psi, f.apply(compose(mu2, s.P))), h.xi0())),
          dst.mu_inv(img.ctx, 1, compose(compose(compose(psi, f.apply(mu2)), f.apply(s.P)), f.phi())),
          dst.mu_inv(img.ctx, 1, compose(compose(compose(psi, f.apply(mu2)), h.xi1()), s2.P)),
          dst.mu_inv(img.ctx, 1, compose(dst.mu(img.ctx, ht), s2.P)),
          rhs,
      };
      for (std::size_t step = 0; step + 1 < std::size(chain); ++step) {
        ++pi_chain.cases;
        if (!(chain[step] == chain[step + 1])) {
          pi_chain.fail("equality " + std::to_string(step + 1) + " of the chain fails",
                        {{"context", to_val(g)}, {"T", to_val(t)}, {"before", to_val(chain[step])},
                         {"after", to_val(chain[step + 1])}});
        }
      }
    }
    for (const auto& o : src.enum_tob(g, 2)) {
      const TObN ho = h.on_tob(o);
      const FinFun mu2 = src.mu_tilde(g, o);
      const TObN lhs = h.on_tob(e.lambda(g, o));
      const TObN rhs = e2.lambda(img.ctx, ho);
      ++lambda_eq.cases;
      if (!(lhs == rhs)) {
        lambda_eq.fail("H(lambda(o)) differs from lambda'(H(o))",
                       {{"context", to_val(g)}, {"o", to_val(o)}, {"H_of_lambda", to_val(lhs)},
                        {"lambda_prime_of_H", to_val(rhs)}});
      }
      const TObN chain[] = {
          lhs,
          h.on_tob(src.mu_tilde_inv(g, 1, compose(mu2, s.P_tilde))),
          dst.mu_tilde_inv(img.ctx, 1, compose(compose(psi, f.apply(compose(mu2, s.P_tilde))), f.phi_tilde())),
          dst.mu_tilde_inv(img.ctx, 1, compose(compose(compose(psi, f.apply(mu2)), f.apply(s.P_tilde)), f.phi_tilde())),
          dst.mu_tilde_inv(img.ctx, 1, compose(compose(compose(psi, f.apply(mu2)), h.xi1_tilde()), s2.P_tilde)),
          dst.mu_tilde_inv(img.ctx, 1, compose(dst.mu_tilde(img.ctx, ho), s2.P_tilde)),
          rhs,
      };
      for (std::size_t step = 0; step + 1 < std::size(chain); ++step) {
        ++lambda_chain.cases;
        if (!(chain[step] == chain[step + 1])) {
          lambda_chain.fail("equality " + std::to_string(step + 1) + " of the chain fails",
                            {{"context", to_val(g)}, {"o", to_val(o)}, {"before", to_val(chain[step])},
                             {"after", to_val(chain[step + 1])}});
        }
      }
    }
  }
  return report;
}

// H as a C-system homomorphism on the enumerated fragment: lengths, ft, proj,
// identities, composition, q-morphisms, and compatibility of HOb / HÕb with ∂
// and restriction.
inline Report check_homomorphism_laws(const Homomorphism& h, std::size_t max_len, std::uint64_t budget) {
  const CSystem& src = h.source();
  const CSystem& dst = h.target();
  Report report;
  CheckResult& ctx_laws = report.add("h-ft-proj");
  CheckResult& mor_laws = report.add("h-identity-composition");
  CheckResult& q_laws = report.add("h-q-morphisms");
  CheckResult& nat = report.add("h-ob-naturality");

  const auto contexts = src.contexts_up_to(max_len, budget);
  for (const auto& g : contexts) {
    const Context hg = h.on_context(g);
    ++ctx_laws.cases;
    if (hg.length() != g.length()) ctx_laws.fail("length not preserved", {{"context", to_val(g)}});
    if (g.length() > 0) {
      if (!(dst.ft(hg) == h.on_context(src.ft(g)))) ctx_laws.fail("ft not preserved", {{"context", to_val(g)}});
      if (!(dst.proj(hg) == h.on_morphism(src.proj(g)))) ctx_laws.fail("proj not preserved", {{"context", to_val(g)}});
    }
    ++mor_laws.cases;
    if (!(h.on_morphism(src.identity(g)) == dst.identity(hg))) {
      mor_laws.fail("identity not preserved", {{"context", to_val(g)}});
    }
  }
  std::uint64_t work = 0;
  for (const auto& a : contexts) {
    for (const auto& b : contexts) work = sat_add(work, src.hom_count(a, b));
  }
  if (work > budget) throw BudgetExceeded("check_homomorphism_laws: too many morphisms");

  for (const auto& a : contexts) {
    for (const auto& b : contexts) {
      src.for_each_hom(a, b, [&](const CtxMor& f) {
        const CtxMor hf = h.on_morphism(f);
        for (const auto& t : src.enum_ob(b, 1)) {
          ++q_laws.cases;
          const CtxMor q = src.q_mor(f, t.whole.last());
          if (!(h.on_morphism(q) == dst.q_mor(hf, h.on_context(t.whole).last()))) {
            q_laws.fail("H(q(f, F)) differs from q(H f, H F)", {{"morphism", to_val(f)}, {"F", to_val(t)}});
          }
        }
        for (std::size_t n = 1; n <= 2; ++n) {
          for (const auto& t : src.enum_ob(b, n)) {
            ++nat.cases;
            if (!(h.on_ob(src.f_star(f, t)) == dst.f_star(hf, h.on_ob(t)))) {
              nat.fail("HOb does not commute with restriction", {{"morphism", to_val(f)}, {"T", to_val(t)}});
            }
          }
          for (const auto& o : src.enum_tob(b, n)) {
            ++nat.cases;
            if (!(boundary(h.on_tob(o)) == h.on_ob(boundary(o)))) {
              nat.fail("HÕb does not commute with the boundary", {{"o", to_val(o)}});
            }
            if (!(h.on_tob(src.restrict(f, o)) == dst.restrict(hf, h.on_tob(o)))) {
              nat.fail("HÕb does not commute with restriction", {{"morphism", to_val(f)}, {"o", to_val(o)}});
            }
          }
        }
        for (const auto& c : contexts) {
          src.for_each_hom(b, c, [&](const CtxMor& g2) {
            ++mor_laws.cases;
            if (!(h.on_morphism(src.compose(f, g2)) == dst.compose(hf, h.on_morphism(g2)))) {
              mor_laws.fail("composition not preserved", {{"first", to_val(f)}, {"second", to_val(g2)}});
            }
          });
        }
      });
    }
  }
  return report;
}

}  // namespace ccpi
