#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "finset.hpp"
#include "universe.hpp"
#include "val.hpp"

namespace ccpi {

// An object of CC(C, p): a tower of classifiers F1 : int0 -> U, ...,
// Fn : int(n-1) -> U where int0 is the terminal set and int(i) is the chosen
// pullback of (Fi, p), with elements (x, u) for x in int(i-1), u in Ũ.
// Contexts are equal iff their classifier sequences are equal.
class Context {
 public:
  Context() : ints_{terminal()} {}

  std::size_t length() const { return classifiers_.size(); }
  const std::vector<FinFun>& classifiers() const { return classifiers_; }
  const FinFun& classifier(std::size_t i) const { return classifiers_.at(i); }
  const FinFun& last() const { return classifiers_.back(); }

  const FinSet& int_obj() const { return ints_.back(); }
  // int of the prefix of length k.
  const FinSet& int_at(std::size_t k) const { return ints_.at(k); }

  Context prefix(std::size_t k) const {
    if (k > length()) throw DomainError("Context::prefix: longer than the context");
    Context out;
    out.classifiers_.assign(classifiers_.begin(), classifiers_.begin() + static_cast<std::ptrdiff_t>(k));
    out.ints_.assign(ints_.begin(), ints_.begin() + static_cast<std::ptrdiff_t>(k + 1));
    return out;
  }

  friend bool operator==(const Context& a, const Context& b) { return a.classifiers_ == b.classifiers_; }
  friend std::strong_ordering operator<=>(const Context& a, const Context& b) {
    return a.classifiers_ <=> b.classifiers_;
  }

 private:
  friend class CSystem;
  std::vector<FinFun> classifiers_;
  std::vector<FinSet> ints_;
};

struct CtxMor {
  Context src;
  Context dst;
  FinFun carrier;

  friend bool operator==(const CtxMor&, const CtxMor&) = default;
};

// Ob_n(Γ): an extension of Γ by n classifiers, stored as the whole context.
struct ObN {
  Context whole;
  std::size_t n = 0;

  Context base() const { return whole.prefix(whole.length() - n); }
  std::size_t base_length() const { return whole.length() - n; }

  friend bool operator==(const ObN&, const ObN&) = default;
  friend std::strong_ordering operator<=>(const ObN& a, const ObN& b) {
    if (auto c = a.n <=> b.n; c != 0) return c;
    return a.whole <=> b.whole;
  }
};

// Õb_n(Γ): an element T of Ob_n(Γ) with a section of int(T) -> int(ft T).
struct TObN {
  ObN type;
  FinFun section;

  friend bool operator==(const TObN&, const TObN&) = default;
  friend std::strong_ordering operator<=>(const TObN& a, const TObN& b) {
    if (auto c = a.type <=> b.type; c != 0) return c;
    return a.section <=> b.section;
  }
};

inline const ObN& boundary(const TObN& o) { return o.type; }

inline Val to_val(const Context& g) {
  Val::Items items;
  for (const auto& f : g.classifiers()) items.push_back(to_val(f));
  return Val::tuple(std::move(items));
}

// (base, extension classifiers)
inline Val to_val(const ObN& t) {
  Val::Items ext;
  for (std::size_t i = t.base_length(); i < t.whole.length(); ++i) ext.push_back(to_val(t.whole.classifier(i)));
  return pair(to_val(t.base()), Val::tuple(std::move(ext)));
}

inline Val to_val(const TObN& o) { return pair(to_val(o.type), to_val(o.section)); }

inline Val to_val(const CtxMor& f) { return Val::tuple({to_val(f.src), to_val(f.dst), to_val(f.carrier)}); }

// CC(C, p) over a finite universe.
class CSystem {
 public:
  explicit CSystem(Universe u) : u_(std::move(u)), poly_(u_) {}

  const Universe& universe() const { return u_; }
  const PolyData& poly() const { return poly_; }

  Context empty() const { return Context(); }

  Context ext(const Context& g, const FinFun& f) const {
    if (!(f.dom() == g.int_obj()) || !(f.cod() == u_.codes())) {
      throw CompositionError("ext: classifier must be a map int(Γ) -> U");
    }
    Context out = g;
    out.ints_.push_back(pullback(f, u_.p()).apex);
    out.classifiers_.push_back(f);
    return out;
  }

  Context ft(const Context& g) const {
    if (g.length() == 0) throw DomainError("ft: empty context");
    return g.prefix(g.length() - 1);
  }

  CtxMor identity(const Context& g) const { return CtxMor{g, g, ccpi::identity(g.int_obj())}; }

  CtxMor morphism(const Context& src, const Context& dst, FinFun carrier) const {
    if (!(carrier.dom() == src.int_obj()) || !(carrier.cod() == dst.int_obj())) {
      throw CompositionError("morphism: carrier must be a map int(src) -> int(dst)");
    }
    return CtxMor{src, dst, std::move(carrier)};
  }

  CtxMor compose(const CtxMor& f, const CtxMor& g) const {
    if (!(f.dst == g.src)) throw CompositionError("compose: target of the first morphism is not the source of the second");
    return CtxMor{f.src, g.dst, ccpi::compose(f.carrier, g.carrier)};
  }

  // Γ -> ft(Γ), (x, u) -> x
  CtxMor proj(const Context& g) const {
    if (g.length() == 0) throw DomainError("proj: empty context");
    Context base = ft(g);
    const FinSet& top = g.int_obj();
    std::vector<std::uint32_t> idx;
    idx.reserve(top.size());
    for (const auto& xu : top) idx.push_back(static_cast<std::uint32_t>(base.int_obj().index_or_throw(xu[0])));
    FinFun carrier(top, base.int_obj(), std::move(idx));
    return CtxMor{g, std::move(base), std::move(carrier)};
  }

  // q(f, F) : ext(Δ, f;F) -> ext(Γ, F), (x, u) -> (f(x), u)
  CtxMor q_mor(const CtxMor& f, const FinFun& classifier) const {
    return q_into(f, classifier, ext(f.dst, classifier));
  }

  ObN ob(const Context& base, const std::vector<FinFun>& classifiers) const {
    Context whole = base;
    for (const auto& f : classifiers) whole = ext(whole, f);
    return ObN{std::move(whole), classifiers.size()};
  }

  TObN tob(const ObN& t, FinFun section) const {
    if (t.n == 0) throw DomainError("tob: need n >= 1");
    const CtxMor pr = proj(t.whole);
    if (!(section.dom() == pr.dst.int_obj()) || !(section.cod() == t.whole.int_obj())) {
      throw CompositionError("tob: section must be a map int(ft T) -> int(T)");
    }
    if (!(ccpi::compose(section, pr.carrier) == ccpi::identity(pr.dst.int_obj()))) {
      throw DomainError("tob: map is not a section of the projection");
    }
    return TObN{t, std::move(section)};
  }

  // The q-morphisms along T: tower[k] : Δ.f*F1...f*Fk -> Γ.F1...Fk, k = 0..n.
  std::vector<CtxMor> q_tower(const CtxMor& f, const ObN& t) const {
    if (!(t.base() == f.dst)) throw DomainError("restriction: extension is not based at the target of the morphism");
    std::vector<CtxMor> tower{f};
    const std::size_t b = t.base_length();
    for (std::size_t i = 0; i < t.n; ++i) {
      tower.push_back(q_into(tower.back(), t.whole.classifier(b + i), t.whole.prefix(b + i + 1)));
    }
    return tower;
  }

  // Restriction of Ob_n along f : Δ -> Γ.
  ObN f_star(const CtxMor& f, const ObN& t) const { return ObN{q_tower(f, t).back().src, t.n}; }

  // Restriction of Õb_n along f: the section s(y) = (y, h(y)) becomes
  // y' -> (y', h(Q(y'))) with Q the (n-1)-st q-morphism.
  TObN restrict(const CtxMor& f, const TObN& o) const {
    const auto tower = q_tower(f, o.type);
    const CtxMor& below = tower[o.type.n - 1];
    const Context& top = tower.back().src;
    FinFun section = FinFun::tabulate(below.src.int_obj(), top.int_obj(), [&](const Val& y) {
      return pair(y, o.section(below.carrier(y))[1]);
    });
    return TObN{ObN{top, o.type.n}, std::move(section)};
  }

  std::uint64_t hom_count(const Context& src, const Context& dst) const {
    return function_count(src.int_obj(), dst.int_obj());
  }

  template <class Visit>
  void for_each_hom(const Context& src, const Context& dst, Visit&& visit) const {
    for_each_function(src.int_obj(), dst.int_obj(), [&](const FinFun& c) { visit(CtxMor{src, dst, c}); });
  }

  CtxMor nth_hom(const Context& src, const Context& dst, std::uint64_t k) const {
    return CtxMor{src, dst, nth_function(src.int_obj(), dst.int_obj(), k)};
  }

  // All contexts of length <= max_len, by length, each level in lexicographic order.
  std::vector<Context> contexts_up_to(std::size_t max_len, std::uint64_t budget) const {
    std::vector<Context> out{empty()};
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
      const std::size_t level_end = out.size();
      for (std::size_t i = level_begin; i < level_end; ++i) {
        const Context g = out[i];
        if (sat_add(out.size(), function_count(g.int_obj(), u_.codes())) > budget) {
          throw BudgetExceeded("contexts_up_to: more than " + std::to_string(budget) + " contexts");
        }
        for_each_function(g.int_obj(), u_.codes(), [&](const FinFun& f) { out.push_back(ext(g, f)); });
      }
      level_begin = level_end;
    }
    return out;
  }

  std::vector<ObN> enum_ob(const Context& g, std::size_t n) const {
    if (n == 0) throw DomainError("enum_ob: n must be positive");
    std::vector<Context> level{g};
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Context> next;
      for (const auto& c : level) {
        for_each_function(c.int_obj(), u_.codes(), [&](const FinFun& f) { next.push_back(ext(c, f)); });
      }
      level = std::move(next);
    }
    std::vector<ObN> out;
    out.reserve(level.size());
    for (auto& c : level) out.push_back(ObN{std::move(c), n});
    return out;
  }

  // Sections of the last projection of T, in lexicographic order.
  std::vector<TObN> sections(const ObN& t) const {
    const CtxMor pr = proj(t.whole);
    const FinSet& below = pr.dst.int_obj();
    std::vector<std::vector<std::uint32_t>> options(below.size());
    for (std::size_t j = 0; j < pr.carrier.dom().size(); ++j) options[pr.carrier.indices()[j]].push_back(static_cast<std::uint32_t>(j));
    std::vector<TObN> out;
    detail::for_each_choice(options, [&](const std::vector<std::uint32_t>& pick) {
      out.push_back(TObN{t, FinFun(below, t.whole.int_obj(), pick)});
    });
    return out;
  }

  std::vector<TObN> enum_tob(const Context& g, std::size_t n) const {
    std::vector<TObN> out;
    for (const auto& t : enum_ob(g, n)) {
      auto s = sections(t);
      out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
    return out;
  }

  // I_p^{n-1}(U) and I_p^{n-1}(Ũ) for n in {1, 2}.
  const FinSet& ip_power_u(std::size_t n) const { return n == 1 ? u_.codes() : poly_.ip_u; }
  const FinSet& ip_power_ut(std::size_t n) const { return n == 1 ? u_.total() : poly_.ip_ut; }

  // μ_n : Ob_n(Γ) -> Hom(int Γ, I_p^{n-1}(U)), n in {1, 2}.
  FinFun mu(const Context& g, const ObN& t) const {
    require_base(g, t);
    const Context& w = t.whole;
    if (t.n == 1) return w.last();
    const FinFun& f = w.classifier(w.length() - 2);
    const FinFun& gg = w.last();
    return FinFun::tabulate(g.int_obj(), poly_.ip_u, [&](const Val& x) {
      const Val& a = f(x);
      Val::Items assoc;
      for (const auto& e : u_.el(a)) assoc.push_back(pair(e, gg(pair(x, pair(a, e)))));
      return ip_element(a, std::move(assoc));
    });
  }

  ObN mu_inv(const Context& g, std::size_t n, const FinFun& a) const {
    require_n(n);
    if (!(a.dom() == g.int_obj()) || !(a.cod() == ip_power_u(n))) {
      throw CompositionError("mu_inv: map must be int(Γ) -> I_p^{n-1}(U)");
    }
    if (n == 1) return ObN{ext(g, a), 1};
    FinFun f = FinFun::tabulate(g.int_obj(), u_.codes(), [&](const Val& x) { return ip_code(a(x)); });
    Context gf = ext(g, f);
    FinFun gg = FinFun::tabulate(gf.int_obj(), u_.codes(), [&](const Val& xu) { return ip_value(a(xu[0]), xu[1][1]); });
    return ObN{ext(gf, gg), 2};
  }

  // μ̃_n : Õb_n(Γ) -> Hom(int Γ, I_p^{n-1}(Ũ)), n in {1, 2}.
  FinFun mu_tilde(const Context& g, const TObN& o) const {
    require_base(g, o.type);
    if (o.type.n == 1) {
      return FinFun::tabulate(g.int_obj(), u_.total(), [&](const Val& x) { return o.section(x)[1]; });
    }
    const Context& w = o.type.whole;
    const FinFun& f = w.classifier(w.length() - 2);
    return FinFun::tabulate(g.int_obj(), poly_.ip_ut, [&](const Val& x) {
      const Val& a = f(x);
      Val::Items assoc;
      for (const auto& e : u_.el(a)) assoc.push_back(pair(e, o.section(pair(x, pair(a, e)))[1]));
      return ip_element(a, std::move(assoc));
    });
  }

  TObN mu_tilde_inv(const Context& g, std::size_t n, const FinFun& b) const {
    require_n(n);
    if (!(b.dom() == g.int_obj()) || !(b.cod() == ip_power_ut(n))) {
      throw CompositionError("mu_tilde_inv: map must be int(Γ) -> I_p^{n-1}(Ũ)");
    }
    if (n == 1) {
      Context gf = ext(g, ccpi::compose(b, u_.p()));
      FinFun s = FinFun::tabulate(g.int_obj(), gf.int_obj(), [&](const Val& x) { return pair(x, b(x)); });
      return TObN{ObN{std::move(gf), 1}, std::move(s)};
    }
    FinFun f = FinFun::tabulate(g.int_obj(), u_.codes(), [&](const Val& x) { return ip_code(b(x)); });
    Context gf = ext(g, f);
    auto h = [&](const Val& xu) -> const Val& { return ip_value(b(xu[0]), xu[1][1]); };
    FinFun gg = FinFun::tabulate(gf.int_obj(), u_.codes(), [&](const Val& xu) { return h(xu)[0]; });
    Context gfg = ext(gf, gg);
    FinFun s = FinFun::tabulate(gf.int_obj(), gfg.int_obj(), [&](const Val& xu) { return pair(xu, h(xu)); });
    return TObN{ObN{std::move(gfg), 2}, std::move(s)};
  }

 private:
  CtxMor q_into(const CtxMor& f, const FinFun& classifier, const Context& dst) const {
    Context src = ext(f.src, ccpi::compose(f.carrier, classifier));
    FinFun carrier = FinFun::tabulate(src.int_obj(), dst.int_obj(), [&](const Val& xu) {
      return pair(f.carrier(xu[0]), xu[1]);
    });
    return CtxMor{std::move(src), dst, std::move(carrier)};
  }

  static void require_n(std::size_t n) {
    if (n != 1 && n != 2) throw DomainError("mu: only n = 1 and n = 2 are supported");
  }

  static void require_base(const Context& g, const ObN& t) {
    require_n(t.n);
    if (!(t.base() == g)) throw DomainError("extension is not based at the given context");
  }

  Universe u_;
  PolyData poly_;
};

}  // namespace ccpi
