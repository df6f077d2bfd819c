#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "csystem.hpp"
#include "error.hpp"
#include "report.hpp"

namespace ccpi {

struct AxiomOptions {
  std::size_t max_len = 2;
  // Above this many elementary checks the pair/triple laws are sampled.
  std::uint64_t exhaustive_limit = 200000;
  std::uint64_t samples = 2000;
  std::size_t per_probe = 3;
  std::uint64_t seed = 20150317;
  std::uint64_t context_budget = 100000;
};

// Replaceable q-morphism and Ob_n restriction, for mutation testing.
struct AxiomHooks {
  std::function<CtxMor(const CSystem&, const CtxMor&, const FinFun&)> q_mor;
  std::function<ObN(const CSystem&, const CtxMor&, const ObN&)> f_star;
};

// |Ob_1|, |Ob_2|, |Õb_1|, |Õb_2| at a context whose int has k elements.
struct ExtensionCounts {
  std::uint64_t ob1, ob2, tob1, tob2;
};

inline ExtensionCounts extension_counts(const CSystem& cs, std::size_t k) {
  return ExtensionCounts{sat_pow(cs.universe().codes().size(), k), sat_pow(cs.poly().ip_u.size(), k),
                         sat_pow(cs.universe().total().size(), k), sat_pow(cs.poly().ip_ut.size(), k)};
}

namespace detail {

struct Extensions {
  std::vector<ObN> ob1, ob2;
  std::vector<TObN> tob1, tob2;
};

class AxiomRun {
 public:
  AxiomRun(const CSystem& cs, const AxiomOptions& opt, const AxiomHooks& hooks)
      : cs_(cs), opt_(opt), rng_(opt.seed) {
    q_ = hooks.q_mor ? hooks.q_mor : [](const CSystem& c, const CtxMor& f, const FinFun& F) { return c.q_mor(f, F); };
    fs_ = hooks.f_star ? hooks.f_star : [](const CSystem& c, const CtxMor& f, const ObN& t) { return c.f_star(f, t); };
  }

  Report run() {
    const auto contexts = cs_.contexts_up_to(opt_.max_len, opt_.context_budget);

    std::uint64_t work = 0;
    std::vector<std::uint64_t> ext_size(contexts.size());
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      const auto c = extension_counts(cs_, contexts[i].int_obj().size());
      ext_size[i] = sat_add(sat_add(c.ob1, c.ob2), sat_add(c.tob1, c.tob2));
    }
    for (std::size_t j = 0; j < contexts.size(); ++j) {
      std::uint64_t into_j = 0;
      for (const auto& d : contexts) into_j = sat_add(into_j, cs_.hom_count(d, contexts[j]));
      std::uint64_t paths = 0;
      for (const auto& d : contexts) {
        std::uint64_t into_d = 0;
        for (const auto& e : contexts) into_d = sat_add(into_d, cs_.hom_count(e, d));
        paths = sat_add(paths, sat_mul(into_d, cs_.hom_count(d, contexts[j])));
      }
      work = sat_add(work, sat_mul(sat_add(into_j, paths), ext_size[j]));
    }
    const bool exhaustive = work <= opt_.exhaustive_limit;
    for (auto* c : {&ctx_, &ident_, &q_sq_, &restr_}) c->exhaustive = exhaustive;

    for (const auto& g : contexts) check_context(g, extensions(g, exhaustive));

    if (exhaustive) {
      for (const auto& g : contexts) {
        const Extensions ext = extensions(g, true);
        for (const auto& d : contexts) {
          cs_.for_each_hom(d, g, [&](const CtxMor& f) {
            check_pair(f, ext);
            for (const auto& d2 : contexts) {
              cs_.for_each_hom(d2, d, [&](const CtxMor& h) { check_triple(h, f, ext); });
            }
          });
        }
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, contexts.size() - 1);
      for (std::uint64_t s = 0; s < opt_.samples; ++s) {
        for (int attempt = 0; attempt < 64; ++attempt) {
          const Context& g = contexts[pick(rng_)];
          const Context& d = contexts[pick(rng_)];
          const Context& d2 = contexts[pick(rng_)];
          if (cs_.hom_count(d, g) == 0 || cs_.hom_count(d2, d) == 0) continue;
          const CtxMor f = random_hom(d, g);
          const CtxMor h = random_hom(d2, d);
          const Extensions ext = extensions(g, false);
          check_pair(f, ext);
          check_triple(h, f, ext);
          break;
        }
      }
    }
    Report report;
    report.checks.push_back(ctx_);
    report.checks.push_back(ident_);
    report.checks.push_back(q_sq_);
    report.checks.push_back(restr_);
    return report;
  }

 private:
  using Witness = std::vector<std::pair<std::string, Val>>;

  template <class Body>
  void guarded(CheckResult& check, const Witness& where, Body&& body) {
    ++check.cases;
    if (!check.ok) return;
    try {
      body();
    } catch (const Error& e) {
      check.fail(std::string("operation raised: ") + e.what(), where);
    }
  }

  CtxMor random_hom(const Context& src, const Context& dst) {
    std::vector<std::uint32_t> idx(src.int_obj().size());
    std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(dst.int_obj().size() - 1));
    for (auto& i : idx) i = d(rng_);
    return CtxMor{src, dst, FinFun(src.int_obj(), dst.int_obj(), std::move(idx))};
  }

  FinFun random_classifier(const FinSet& dom) {
    std::vector<std::uint32_t> idx(dom.size());
    std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(cs_.universe().codes().size() - 1));
    for (auto& i : idx) i = d(rng_);
    return FinFun(dom, cs_.universe().codes(), std::move(idx));
  }

  std::optional<TObN> random_section(const ObN& t) {
    const CtxMor pr = cs_.proj(t.whole);
    std::vector<std::vector<std::uint32_t>> over(pr.dst.int_obj().size());
    for (std::size_t j = 0; j < pr.carrier.dom().size(); ++j) over[pr.carrier.indices()[j]].push_back(static_cast<std::uint32_t>(j));
    std::vector<std::uint32_t> pick;
    for (const auto& o : over) {
      if (o.empty()) return std::nullopt;
      std::uniform_int_distribution<std::size_t> d(0, o.size() - 1);
      pick.push_back(o[d(rng_)]);
    }
    return TObN{t, FinFun(pr.dst.int_obj(), t.whole.int_obj(), std::move(pick))};
  }

  Extensions extensions(const Context& g, bool exhaustive) {
    if (exhaustive) return Extensions{cs_.enum_ob(g, 1), cs_.enum_ob(g, 2), cs_.enum_tob(g, 1), cs_.enum_tob(g, 2)};
    Extensions out;
    for (std::size_t i = 0; i < opt_.per_probe; ++i) {
      ObN t1 = cs_.ob(g, {random_classifier(g.int_obj())});
      Context gf = t1.whole;
      ObN t2 = cs_.ob(g, {gf.last(), random_classifier(gf.int_obj())});
      if (auto s = random_section(t1)) out.tob1.push_back(*s);
      if (auto s = random_section(t2)) out.tob2.push_back(*s);
      out.ob1.push_back(std::move(t1));
      out.ob2.push_back(std::move(t2));
    }
    return out;
  }

  Square q_square(const CtxMor& f, const CtxMor& q) {
    return Square::make(q.carrier, cs_.proj(q.src).carrier, cs_.proj(q.dst).carrier, f.carrier);
  }

  void check_context(const Context& g, const Extensions& ext) {
    guarded(ctx_, {{"context", to_val(g)}}, [&] {
      if (g.length() > 0) {
        const Context base = cs_.ft(g);
        if (base.length() + 1 != g.length()) ctx_.fail("ft does not drop exactly one classifier", {{"context", to_val(g)}});
        if (!(cs_.ext(base, g.last()) == g)) ctx_.fail("ext(ft Γ, last) differs from Γ", {{"context", to_val(g)}});
        if (!(pullback(g.last(), cs_.universe().p()).apex == g.int_obj())) {
          ctx_.fail("int(Γ) is not the chosen pullback over int(ft Γ)", {{"context", to_val(g)}});
        }
        const CtxMor pr = cs_.proj(g);
        for (std::size_t i = 0; i < g.int_obj().size(); ++i) {
          if (!(pr.carrier.image_at(i) == g.int_obj()[i][0])) {
            ctx_.fail("proj is not the first projection", {{"context", to_val(g)}, {"element", g.int_obj()[i]}});
          }
        }
      }
    });
    const CtxMor id = cs_.identity(g);
    guarded(ident_, {{"context", to_val(g)}}, [&] {
      if (!(cs_.compose(id, id) == id)) ident_.fail("id;id differs from id", {{"context", to_val(g)}});
    });
    for (const auto& t : ext.ob1) {
      guarded(q_sq_, {{"context", to_val(g)}, {"F", to_val(t)}}, [&] {
        if (!(q_(cs_, id, t.whole.last()) == cs_.identity(t.whole))) {
          q_sq_.fail("q(id, F) is not the identity", {{"context", to_val(g)}, {"F", to_val(t)}});
        }
      });
    }
    for (const auto* list : {&ext.ob1, &ext.ob2}) {
      for (const auto& t : *list) {
        guarded(restr_, {{"T", to_val(t)}}, [&] {
          if (!(fs_(cs_, id, t) == t)) restr_.fail("restriction along id changes T", {{"T", to_val(t)}});
        });
      }
    }
    for (const auto* list : {&ext.tob1, &ext.tob2}) {
      for (const auto& o : *list) {
        guarded(restr_, {{"o", to_val(o)}}, [&] {
          if (!(cs_.restrict(id, o) == o)) restr_.fail("restriction along id changes o", {{"o", to_val(o)}});
        });
      }
    }
  }

  void check_pair(const CtxMor& f, const Extensions& ext) {
    const Witness at_f{{"morphism", to_val(f)}};
    guarded(ident_, at_f, [&] {
      if (!(cs_.compose(cs_.identity(f.src), f) == f) || !(cs_.compose(f, cs_.identity(f.dst)) == f)) {
        ident_.fail("identity law fails", at_f);
      }
    });
    for (const auto& t : ext.ob1) {
      const Witness w{{"morphism", to_val(f)}, {"F", to_val(t)}};
      guarded(q_sq_, w, [&] {
        const FinFun& F = t.whole.last();
        const CtxMor q = q_(cs_, f, F);
        if (!(q.dst == t.whole) || !(q.src == cs_.ext(f.src, compose(f.carrier, F)))) {
          q_sq_.fail("q(f, F) has the wrong endpoints", w);
          return;
        }
        if (Verdict v = check_pullback_square(q_square(f, q)); !v) {
          Witness ww = w;
          ww.insert(ww.end(), v.witness.begin(), v.witness.end());
          q_sq_.fail("q-square: " + v.reason, ww);
        }
      });
    }
    for (const auto* list : {&ext.ob1, &ext.ob2}) {
      for (const auto& t : *list) {
        const Witness w{{"morphism", to_val(f)}, {"T", to_val(t)}};
        guarded(restr_, w, [&] {
          const ObN r = fs_(cs_, f, t);
          if (r.n != t.n || !(r.base() == f.src)) {
            restr_.fail("restriction is not based at the source of the morphism", w);
          } else if (t.n > 1 && !(fs_(cs_, f, ObN{t.whole.prefix(t.whole.length() - 1), t.n - 1}).whole ==
                                   r.whole.prefix(r.whole.length() - 1))) {
            restr_.fail("restriction does not commute with ft", w);
          }
        });
      }
    }
    for (const auto* list : {&ext.tob1, &ext.tob2}) {
      for (const auto& o : *list) {
        const Witness w{{"morphism", to_val(f)}, {"o", to_val(o)}};
        guarded(restr_, w, [&] {
          if (!(boundary(cs_.restrict(f, o)) == fs_(cs_, f, boundary(o)))) {
            restr_.fail("boundary does not commute with restriction", w);
          }
        });
      }
    }
  }

  void check_triple(const CtxMor& h, const CtxMor& f, const Extensions& ext) {
    const CtxMor hf = cs_.compose(h, f);
    const Witness at{{"first", to_val(h)}, {"second", to_val(f)}};
    guarded(ident_, at, [&] {
      if (f.dst.length() > 0) {
        const CtxMor pr = cs_.proj(f.dst);
        if (!(cs_.compose(hf, pr) == cs_.compose(h, cs_.compose(f, pr)))) ident_.fail("composition is not associative", at);
      }
    });
    for (const auto& t : ext.ob1) {
      Witness w = at;
      w.emplace_back("F", to_val(t));
      guarded(q_sq_, w, [&] {
        const FinFun& F = t.whole.last();
        const CtxMor qg = q_(cs_, f, F);
        const CtxMor qh = q_(cs_, h, compose(f.carrier, F));
        if (!(q_(cs_, hf, F) == cs_.compose(qh, qg))) q_sq_.fail("q(h;f, F) differs from q(h, f*F);q(f, F)", w);
      });
    }
    for (const auto* list : {&ext.ob1, &ext.ob2}) {
      for (const auto& t : *list) {
        Witness w = at;
        w.emplace_back("T", to_val(t));
        guarded(restr_, w, [&] {
          if (!(fs_(cs_, hf, t) == fs_(cs_, h, fs_(cs_, f, t)))) {
            restr_.fail("restriction along a composite differs from iterated restriction", w);
          }
        });
      }
    }
    for (const auto* list : {&ext.tob1, &ext.tob2}) {
      for (const auto& o : *list) {
        Witness w = at;
        w.emplace_back("o", to_val(o));
        guarded(restr_, w, [&] {
          if (!(cs_.restrict(hf, o) == cs_.restrict(h, cs_.restrict(f, o)))) {
            restr_.fail("section restriction along a composite differs from iterated restriction", w);
          }
        });
      }
    }
  }

  const CSystem& cs_;
  const AxiomOptions& opt_;
  std::mt19937_64 rng_;
  std::function<CtxMor(const CSystem&, const CtxMor&, const FinFun&)> q_;
  std::function<ObN(const CSystem&, const CtxMor&, const ObN&)> fs_;
  CheckResult ctx_{"ft-proj"};
  CheckResult ident_{"identity-composition"};
  CheckResult q_sq_{"q-squares"};
  CheckResult restr_{"restriction"};
};

}  // namespace detail

// Checks the C-system laws on all contexts of length <= max_len. Per-context
// laws are always exhaustive; laws over morphisms and pairs of composable
// morphisms are exhaustive when the fragment is small enough and otherwise
// checked on a seeded sample (recorded in each CheckResult).
inline Report check_csystem_axioms(const CSystem& cs, const AxiomOptions& opt, const AxiomHooks& hooks = {}) {
  if (opt.max_len < 1) throw DomainError("check_csystem_axioms: max_len must be at least 1");
  return detail::AxiomRun(cs, opt, hooks).run();
}

}  // namespace ccpi
