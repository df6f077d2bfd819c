#include <catch_amalgamated.hpp>

#include <ccpi/error.hpp>
#include <ccpi/universe.hpp>

#include "oracles.hpp"

using namespace ccpi;

namespace {

const Universe& B() {
  static const Universe u = oracle::to_universe(oracle::boolean());
  return u;
}
const Universe& B2() {
  static const Universe u = oracle::to_universe(oracle::b2());
  return u;
}
const Universe& V2() {
  static const Universe u = oracle::to_universe(oracle::v2());
  return u;
}

std::set<std::string> rendered(const FinSet& s) {
  std::set<std::string> out;
  for (const auto& x : s) out.insert(to_string(x));
  return out;
}

}  // namespace

TEST_CASE("universe basics") {
  CHECK(B().codes().size() == 2);
  CHECK(B().total() == FinSet{pair(atom("1"), atom("*"))});
  CHECK(B().p()(pair(atom("1"), atom("*"))) == atom("1"));
  CHECK(B().fiber(atom("0")).empty());
  CHECK_THROWS_AS(B().el(atom("7")), DomainError);
  CHECK(V2().total().size() == 3);
}

TEST_CASE("I_p(X) matches the naive construction") {
  gen::Gen g(31);
  for (int round = 0; round < 40; ++round) {
    const oracle::Fam fam = g.fam(1 + g.below(3), 2);
    const Universe u = oracle::to_universe(fam);
    const int n = g.below(4);
    const FinSet x = g.set(n, "x");
    std::vector<std::string> xs;
    for (const auto& v : x) xs.push_back(to_string(v));
    std::set<std::string> ref;
    for (const auto& c : oracle::ip(fam, n)) ref.insert(oracle::render(fam, c, xs));
    CHECK(rendered(ip_obj(u, x)) == ref);
  }
}

TEST_CASE("ip_mor is a functor") {
  gen::Gen g(37);
  for (int round = 0; round < 60; ++round) {
    const Universe u = oracle::to_universe(g.fam(1 + g.below(3), 2));
    const FinSet x = g.set(1 + g.below(3), "x"), y = g.set(1 + g.below(3), "y"), z = g.set(1 + g.below(3), "z");
    const FinFun f = g.fun(x, y), h = g.fun(y, z);
    CHECK(ip_mor(u, identity(x)) == identity(ip_obj(u, x)));
    CHECK(ip_mor(u, compose(f, h)) == compose(ip_mor(u, f), ip_mor(u, h)));
  }
}

// Maps X -> I_p(Y) correspond to pairs (f : X -> U, g : X x_U Ũ -> Y).
TEST_CASE("I_p characterizing bijection") {
  gen::Gen g(41);
  for (int round = 0; round < 25; ++round) {
    const Universe u = oracle::to_universe(g.fam(1 + g.below(3), 2));
    const FinSet x = g.set(g.below(3), "x"), y = g.set(1 + g.below(2), "y");
    const FinSet ipy = ip_obj(u, y);
    if (function_count(x, ipy) > 5000) continue;

    std::set<std::pair<FinFun, FinFun>> seen;
    std::uint64_t pairs_expected = 0;
    for (const auto& f : all_functions(x, u.codes())) {
      pairs_expected += function_count(pullback(f, u.p()).apex, y);
    }
    for (const auto& h : all_functions(x, ipy)) {
      const FinFun f = FinFun::tabulate(x, u.codes(), [&](const Val& v) { return ip_code(h(v)); });
      const FinSet xu = pullback(f, u.p()).apex;
      const FinFun gg = FinFun::tabulate(xu, y, [&](const Val& v) { return ip_value(h(v[0]), v[1][1]); });
      // Rebuild h from (f, g).
      const FinFun back = FinFun::tabulate(x, ipy, [&](const Val& v) {
        Val::Items assoc;
        for (const auto& e : u.el(f(v))) assoc.push_back(pair(e, gg(pair(v, pair(f(v), e)))));
        return ip_element(f(v), std::move(assoc));
      });
      CHECK(back == h);
      seen.emplace(f, gg);
    }
    CHECK(seen.size() == function_count(x, ipy));
    CHECK(seen.size() == pairs_expected);
  }
}

TEST_CASE("B: exhaustive search over all 8 x 1 candidate pairs") {
  const auto naive = oracle::naive_structures(oracle::boolean());
  REQUIRE(naive.candidates == 8);
  REQUIRE(naive.pre.size() == 2);
  REQUIRE(naive.full.size() == 1);

  const auto en = enumerate_p_structures(B(), 1000);
  CHECK(en.pre_structures.size() == 2);
  CHECK(en.structures.size() == 1);
  CHECK(oracle::graphs(en.pre_structures) == oracle::graphs(naive.pre));
  CHECK(oracle::graphs(en.structures) == oracle::graphs(naive.full));
  CHECK(oracle::graphs(find_p_structures(B(), 1000)) == oracle::graphs(naive.full));

  const StructureCounts c = count_p_structures(B());
  CHECK(c.pre == 2);
  CHECK(c.full == 1);
  CHECK_FALSE(c.obstruction);
}

TEST_CASE("B: canonical structure") {
  const auto s = canonical_p_structure(B());
  REQUIRE(s);
  const Val one = atom("1"), zero = atom("0"), star = atom("*");
  CHECK(s->P(ip_element(zero, {})) == one);
  CHECK(s->P(ip_element(one, {pair(star, zero)})) == zero);
  CHECK(s->P(ip_element(one, {pair(star, one)})) == one);
  CHECK(check_p_structure(B(), *s));
  CHECK(*s == enumerate_p_structures(B(), 10).structures.front());
}

TEST_CASE("B2: enumeration agrees with the naive search") {
  const auto naive = oracle::naive_structures(oracle::b2());
  REQUIRE(naive.pre.size() == 288);
  REQUIRE(naive.full.size() == 32);
  const auto en = enumerate_p_structures(B2(), 10000);
  CHECK(oracle::graphs(en.pre_structures) == oracle::graphs(naive.pre));
  CHECK(oracle::graphs(en.structures) == oracle::graphs(naive.full));
  CHECK(find_p_structures(B2(), 10000) == en.structures);
  CHECK(std::is_sorted(en.pre_structures.begin(), en.pre_structures.end()));
}

TEST_CASE("structures are exactly the pre-structures passing the pullback check") {
  for (const Universe* u : {&B(), &B2()}) {
    const PolyData poly(*u);
    const auto en = enumerate_p_structures(*u, poly, 10000);
    std::vector<PStructure> filtered;
    for (const auto& s : en.pre_structures) {
      CHECK(check_pre_p_structure(*u, s));
      if (is_pullback_square(Square::make(s.P_tilde, poly.ip_p, u->p(), s.P))) filtered.push_back(s);
    }
    CHECK(filtered == en.structures);
    // Counting law forced by the pullback condition.
    for (const auto& s : en.structures) {
      for (const auto& c : poly.ip_u) {
        std::size_t prod = 1;
        for (const auto& kv : ip_assignment(c)) prod *= u->el(kv[1]).size();
        CHECK(u->el(s.P(c)).size() == prod);
      }
    }
  }
}

TEST_CASE("random universes: counts agree with the naive search") {
  gen::Gen g(43);
  int tried = 0;
  for (int round = 0; round < 200 && tried < 25; ++round) {
    const oracle::Fam fam = g.fam(1 + g.below(3), 2);
    const Universe u = oracle::to_universe(fam);
    const PolyData poly(u);
    const double cand = std::pow(double(u.codes().size()), double(poly.ip_u.size())) *
                        std::pow(double(u.total().size()), double(poly.ip_ut.size()));
    if (cand > 300000) continue;
    ++tried;
    const auto naive = oracle::naive_structures(fam);
    const StructureCounts c = count_p_structures(u, poly);
    CHECK(c.pre == naive.pre.size());
    CHECK(c.full == naive.full.size());
    CHECK(oracle::graphs(find_p_structures(u, poly, 1000000)) == oracle::graphs(naive.full));
    CHECK(c.obstruction.has_value() == naive.full.empty());
  }
  CHECK(tried >= 10);
}

TEST_CASE("V2 has no structure and a counting obstruction") {
  const oracle::Fam fam = oracle::v2();
  const PolyData poly(V2());
  CHECK(poly.ip_u.size() == 13);
  CHECK(poly.ip_ut.size() == 13);
  const StructureCounts c = count_p_structures(V2(), poly);
  CHECK(c.pre == oracle::pre_count(fam));
  CHECK(c.pre == 41826375u);
  CHECK(c.full == 0);
  REQUIRE(c.obstruction);
  const auto local = oracle::local_obstructions(fam);
  const auto it = local.find(to_string(c.obstruction->element));
  REQUIRE(it != local.end());
  CHECK(it->second == c.obstruction->fiber_size);
  CHECK(c.obstruction->fiber_size == 4);
  CHECK(find_p_structures(V2(), poly, 1000).empty());
  CHECK_FALSE(canonical_p_structure(V2()));
  CHECK_THROWS_AS(enumerate_p_structures(V2(), poly, 10000000), BudgetExceeded);
}

TEST_CASE("explicit all-to-2 table on V2 is a pre-structure but not a structure") {
  const PolyData poly(V2());
  const PStructure s{FinFun::tabulate(poly.ip_u, V2().codes(), [](const Val&) { return atom("2"); }),
                     FinFun::tabulate(poly.ip_ut, V2().total(), [](const Val&) { return pair(atom("2"), atom("0")); })};
  CHECK(check_pre_p_structure(V2(), s));
  const Verdict v = verify_p_structure(V2(), poly, s);
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.witness.empty());
}

TEST_CASE("wrong endpoints are rejected") {
  const PolyData poly(B());
  const PStructure bad{identity(B().codes()), identity(B().total())};
  CHECK_THROWS_AS(verify_pre_p_structure(B(), poly, bad), CompositionError);
}

TEST_CASE("mixed structure (B, V2, V2)") {
  const auto m = tarski_mixed_p_structure(B(), V2(), V2(), least_code_of_size(V2()));
  REQUIRE(m);
  CHECK(check_mixed_p_structure(*m));
  MixedPStructure bad = *m;
  bad.P_tilde = FinFun::tabulate(m->P_tilde.dom(), V2().total(), [](const Val&) { return pair(atom("2"), atom("0")); });
  const Verdict v = verify_mixed_p_structure(bad);
  CHECK_FALSE(v.ok);
  CHECK_FALSE(v.witness.empty());
  // A mixed structure on (p, p, p) is an ordinary structure.
  const auto same = tarski_mixed_p_structure(B(), B(), B(), least_code_of_size(B()));
  REQUIRE(same);
  CHECK(check_p_structure(B(), PStructure{same->P, same->P_tilde}));
}
