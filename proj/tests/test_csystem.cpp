#include <catch_amalgamated.hpp>

#include <ccpi/axioms.hpp>
#include <ccpi/csystem.hpp>
#include <ccpi/error.hpp>

#include "oracles.hpp"

using namespace ccpi;

namespace {

const CSystem& csB() {
  static const CSystem cs(oracle::to_universe(oracle::boolean()));
  return cs;
}
const CSystem& csV2() {
  static const CSystem cs(oracle::to_universe(oracle::v2()));
  return cs;
}

// q(f, F) with every point sent to the first point of the target.
CtxMor collapsed_q(const CSystem& cs, const CtxMor& f, const FinFun& F) {
  const CtxMor q = cs.q_mor(f, F);
  std::vector<std::uint32_t> idx(q.src.int_obj().size(), 0);
  if (q.dst.int_obj().empty()) return q;
  return CtxMor{q.src, q.dst, FinFun(q.src.int_obj(), q.dst.int_obj(), idx)};
}

// q(f, F) with the components of each point swapped.
CtxMor swapped_q(const CSystem& cs, const CtxMor& f, const FinFun& F) {
  const CtxMor q = cs.q_mor(f, F);
  return CtxMor{q.src, q.dst, FinFun::tabulate(q.src.int_obj(), q.dst.int_obj(), [&](const Val& xu) {
                  return pair(xu[1], f.carrier(xu[0]));
                })};
}

// Restriction that also resets the top classifier of a length-2 extension.
ObN flattened_restriction(const CSystem& cs, const CtxMor& f, const ObN& t) {
  const ObN r = cs.f_star(f, t);
  if (r.n < 2) return r;
  const Context below = r.whole.prefix(r.whole.length() - 1);
  const FinFun flat = FinFun::tabulate(below.int_obj(), cs.universe().codes(),
                                       [&](const Val&) { return cs.universe().codes()[0]; });
  return ObN{cs.ext(below, flat), r.n};
}

}  // namespace

TEST_CASE("context counts agree with the oracle") {
  const auto b = oracle::context_counts(oracle::boolean(), 4);
  std::uint64_t b_total = 0;
  for (auto c : b) b_total += c;
  CHECK(csB().contexts_up_to(4, 100000).size() == b_total);
  CHECK(b_total == 15);
  const auto v = oracle::context_counts(oracle::v2(), 3);
  std::uint64_t v_total = 0;
  for (auto c : v) v_total += c;
  CHECK(csV2().contexts_up_to(3, 100000).size() == v_total);
  CHECK(v_total == 200);
  CHECK_THROWS_AS(csV2().contexts_up_to(3, 10), BudgetExceeded);
}

TEST_CASE("contexts: int is the chosen pullback, ft and proj") {
  for (const auto& g : csV2().contexts_up_to(3, 100000)) {
    if (g.length() == 0) {
      CHECK(g.int_obj() == terminal());
      CHECK_THROWS(csV2().ft(g));
      continue;
    }
    const Context base = csV2().ft(g);
    CHECK(base == g.prefix(g.length() - 1));
    CHECK(g.int_obj() == pullback(g.last(), csV2().universe().p()).apex);
    const CtxMor pr = csV2().proj(g);
    CHECK(pr.dst == base);
    for (const auto& xu : g.int_obj()) CHECK(pr.carrier(xu) == xu[0]);
  }
}

TEST_CASE("Ob and Õb cardinalities agree with enumeration by the oracle") {
  struct Case {
    const CSystem* cs;
    oracle::Fam fam;
    std::size_t len;
  };
  for (const auto& c : {Case{&csB(), oracle::boolean(), 3}, Case{&csV2(), oracle::v2(), 1}}) {
    for (const auto& g : c.cs->contexts_up_to(c.len, 100000)) {
      const auto ref = oracle::extension_counts(c.fam, static_cast<int>(g.int_obj().size()));
      CHECK(c.cs->enum_ob(g, 1).size() == ref.ob1);
      CHECK(c.cs->enum_ob(g, 2).size() == ref.ob2);
      CHECK(c.cs->enum_tob(g, 1).size() == ref.tob1);
      CHECK(c.cs->enum_tob(g, 2).size() == ref.tob2);
      const auto counts = extension_counts(*c.cs, g.int_obj().size());
      CHECK(counts.ob1 == ref.ob1);
      CHECK(counts.ob2 == ref.ob2);
      CHECK(counts.tob1 == ref.tob1);
      CHECK(counts.tob2 == ref.tob2);
    }
  }
}

TEST_CASE("mu and mu-tilde are bijections") {
  for (const CSystem* cs : {&csB(), &csV2()}) {
    for (const auto& g : cs->contexts_up_to(cs == &csB() ? 3 : 1, 100000)) {
      for (std::size_t n : {1u, 2u}) {
        const auto obs = cs->enum_ob(g, n);
        std::set<FinFun> images;
        for (const auto& t : obs) {
          const FinFun a = cs->mu(g, t);
          CHECK(cs->mu_inv(g, n, a) == t);
          images.insert(a);
        }
        CHECK(images.size() == obs.size());
        CHECK(images.size() == function_count(g.int_obj(), cs->ip_power_u(n)));

        const auto tobs = cs->enum_tob(g, n);
        std::set<FinFun> timages;
        for (const auto& o : tobs) {
          const FinFun b = cs->mu_tilde(g, o);
          CHECK(cs->mu_tilde_inv(g, n, b) == o);
          timages.insert(b);
        }
        CHECK(timages.size() == tobs.size());
        CHECK(timages.size() == function_count(g.int_obj(), cs->ip_power_ut(n)));
      }
    }
  }
}

TEST_CASE("mu and mu-tilde are natural") {
  for (const CSystem* cs : {&csB(), &csV2()}) {
    const auto contexts = cs->contexts_up_to(cs == &csB() ? 3 : 1, 100000);
    std::size_t checked = 0;
    for (const auto& g : contexts) {
      for (const auto& d : contexts) {
        if (cs->hom_count(d, g) > 64) continue;
        cs->for_each_hom(d, g, [&](const CtxMor& f) {
          for (std::size_t n : {1u, 2u}) {
            for (const auto& t : cs->enum_ob(g, n)) {
              CHECK(cs->mu(d, cs->f_star(f, t)) == compose(f.carrier, cs->mu(g, t)));
              ++checked;
            }
            for (const auto& o : cs->enum_tob(g, n)) {
              CHECK(cs->mu_tilde(d, cs->restrict(f, o)) == compose(f.carrier, cs->mu_tilde(g, o)));
            }
          }
        });
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("malformed inputs are rejected") {
  const CSystem& cs = csB();
  const Context g = cs.ext(cs.empty(), FinFun(terminal(), cs.universe().codes(), std::vector<std::uint32_t>{1}));
  CHECK_THROWS_AS(cs.ext(g, FinFun(terminal(), cs.universe().codes(), std::vector<std::uint32_t>{1})),
                  CompositionError);
  CHECK_THROWS(cs.morphism(g, cs.empty(), identity(g.int_obj())));
  const ObN t = cs.ob(g, {FinFun(g.int_obj(), cs.universe().codes(), std::vector<std::uint32_t>{0})});
  // int(T) is empty here, so no map out of the nonempty int(g) is a section.
  CHECK(cs.sections(t).empty());
  const CtxMor id = cs.identity(g);
  CHECK_THROWS(cs.f_star(id, cs.ob(cs.empty(), {g.last()})));
}

TEST_CASE("C-system laws hold on B exhaustively and on V2 by sampling") {
  AxiomOptions opt;
  opt.max_len = 3;
  const Report rb = check_csystem_axioms(csB(), opt);
  CHECK(rb.ok());
  for (const auto& c : rb.checks) {
    CHECK(c.exhaustive);
    CHECK(c.cases > 0);
  }
  const Report rv = check_csystem_axioms(csV2(), opt);
  CHECK(rv.ok());
  for (const auto& c : rv.checks) CHECK(c.cases > 0);

  // Same seed, same report.
  const Report again = check_csystem_axioms(csV2(), opt);
  for (std::size_t i = 0; i < rv.checks.size(); ++i) CHECK(rv.checks[i].cases == again.checks[i].cases);
}

TEST_CASE("exhaustive mode is chosen exactly when the work estimate fits") {
  AxiomOptions opt;
  opt.max_len = 1;
  const Report small = check_csystem_axioms(csV2(), opt);
  CHECK(small.ok());
  for (const auto& c : small.checks) CHECK(c.exhaustive);
  opt.exhaustive_limit = 1;
  const Report sampled = check_csystem_axioms(csV2(), opt);
  CHECK(sampled.ok());
  for (const auto& c : sampled.checks) CHECK_FALSE(c.exhaustive);
}

TEST_CASE("corrupted q-morphisms and restrictions are caught with witnesses") {
  AxiomOptions opt;
  opt.max_len = 3;
  struct Mutation {
    const char* what;
    const CSystem* cs;
    AxiomHooks hooks;
    const char* law;
  };
  const std::vector<Mutation> mutations{
      {"collapsed q on V2", &csV2(), AxiomHooks{collapsed_q, {}}, "q-squares"},
      {"swapped q on B", &csB(), AxiomHooks{swapped_q, {}}, "q-squares"},
      {"swapped q on V2", &csV2(), AxiomHooks{swapped_q, {}}, "q-squares"},
      {"flattened restriction on B", &csB(), AxiomHooks{{}, flattened_restriction}, "restriction"},
      {"flattened restriction on V2", &csV2(), AxiomHooks{{}, flattened_restriction}, "restriction"},
  };
  for (const auto& m : mutations) {
    INFO(m.what);
    const Report r = check_csystem_axioms(*m.cs, opt, m.hooks);
    CHECK_FALSE(r.ok());
    const CheckResult* c = r.find(m.law);
    REQUIRE(c);
    CHECK_FALSE(c->ok);
    CHECK_FALSE(c->reason.empty());
    CHECK_FALSE(c->witness.empty());
  }
}
