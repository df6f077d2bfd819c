#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "finset.hpp"
#include "val.hpp"

namespace ccpi {

// A universe p : Ũ -> U presented by its element families: each code a in U
// has a finite set El(a). Ũ = {(a, e) | e in El(a)} and p is the first
// projection, so the fiber of p over a is El(a) tagged with a.
class Universe {
 public:
  Universe() = default;

  Universe(FinSet codes, std::map<Val, FinSet> el) : codes_(std::move(codes)), el_(std::move(el)) {
    for (const auto& [a, _] : el_) {
      if (!codes_.contains(a)) throw DomainError("Universe: El given for unknown code " + to_string(a));
    }
    std::vector<Val> total;
    std::vector<std::uint32_t> proj;
    for (std::size_t i = 0; i < codes_.size(); ++i) {
      auto it = el_.find(codes_[i]);
      if (it == el_.end()) throw DomainError("Universe: no El for code " + to_string(codes_[i]));
      for (const auto& e : it->second) {
        total.push_back(pair(codes_[i], e));
        proj.push_back(static_cast<std::uint32_t>(i));
      }
    }
    total_ = FinSet::from_sorted(std::move(total));
    p_ = FinFun(total_, codes_, std::move(proj));
  }

  // Convenience: codes and elements given by name.
  static Universe from_names(const std::vector<std::pair<std::string, std::vector<std::string>>>& table) {
    std::vector<Val> codes;
    std::map<Val, FinSet> el;
    for (const auto& [code, elems] : table) {
      std::vector<Val> es;
      for (const auto& e : elems) es.push_back(atom(e));
      codes.push_back(atom(code));
      el.emplace(atom(code), FinSet(std::move(es)));
    }
    return Universe(FinSet(std::move(codes)), std::move(el));
  }

  const FinSet& codes() const { return codes_; }
  const FinSet& total() const { return total_; }
  const FinFun& p() const { return p_; }
  const std::map<Val, FinSet>& families() const { return el_; }

  const FinSet& el(const Val& a) const {
    auto it = el_.find(a);
    if (it == el_.end()) throw DomainError("unknown code " + to_string(a));
    return it->second;
  }

  // {(a, e) | e in El(a)}
  FinSet fiber(const Val& a) const {
    std::vector<Val> out;
    for (const auto& e : el(a)) out.push_back(pair(a, e));
    return FinSet::from_sorted(std::move(out));
  }

  friend bool operator==(const Universe& x, const Universe& y) {
    return x.codes_ == y.codes_ && x.el_ == y.el_;
  }

 private:
  FinSet codes_;
  std::map<Val, FinSet> el_;
  FinSet total_;
  FinFun p_;
};

// Elements of I_p(X) are (a, ((e1, x1), ..., (ek, xk))) where e1 < ... < ek
// enumerates El(a) and each xi lies in X. Maps Y -> I_p(X) correspond to pairs
// (F : Y -> U, G : pullback(F, p) -> X).
inline Val ip_element(const Val& code, Val::Items assignment) {
  return pair(code, Val::tuple(std::move(assignment)));
}
inline const Val& ip_code(const Val& c) { return c[0]; }
inline const Val::Items& ip_assignment(const Val& c) { return c[1].items(); }

inline const Val& ip_value(const Val& c, const Val& e) {
  for (const auto& kv : ip_assignment(c)) {
    if (kv[0] == e) return kv[1];
  }
  throw DomainError("ip_value: " + to_string(e) + " is not in the fiber of " + to_string(ip_code(c)));
}

inline FinSet ip_obj(const Universe& u, const FinSet& x) {
  std::vector<Val> out;
  for (const auto& a : u.codes()) {
    const FinSet& es = u.el(a);
    for_each_function(es, x, [&](const FinFun& s) {
      Val::Items assoc;
      assoc.reserve(es.size());
      for (std::size_t i = 0; i < es.size(); ++i) assoc.push_back(pair(es[i], s.image_at(i)));
      out.push_back(ip_element(a, std::move(assoc)));
    });
  }
  return FinSet::from_sorted(std::move(out));
}

// (a, s) -> (a, s then f)
inline FinFun ip_mor(const Universe& u, const FinFun& f) {
  const FinSet dom = ip_obj(u, f.dom());
  const FinSet cod = ip_obj(u, f.cod());
  return FinFun::tabulate(dom, cod, [&](const Val& c) {
    Val::Items assoc;
    assoc.reserve(ip_assignment(c).size());
    for (const auto& kv : ip_assignment(c)) assoc.push_back(pair(kv[0], f(kv[1])));
    return ip_element(ip_code(c), std::move(assoc));
  });
}

// I_p(U), I_p(Ũ) and I_p(p) for a fixed universe.
struct PolyData {
  FinSet ip_u;
  FinSet ip_ut;
  FinFun ip_p;

  explicit PolyData(const Universe& u)
      : ip_u(ip_obj(u, u.codes())), ip_ut(ip_obj(u, u.total())), ip_p(ip_mor(u, u.p())) {}
};

// P : I_p(U) -> U and P̃ : I_p(Ũ) -> Ũ. Whether the pair is a (pre-)structure
// is checked, never assumed.
struct PStructure {
  FinFun P;
  FinFun P_tilde;

  friend bool operator==(const PStructure&, const PStructure&) = default;
  friend std::strong_ordering operator<=>(const PStructure& a, const PStructure& b) {
    if (auto c = a.P <=> b.P; c != 0) return c;
    return a.P_tilde <=> b.P_tilde;
  }
};

namespace detail {

inline void require_endpoints(const Universe& u, const PolyData& poly, const PStructure& s) {
  if (!(s.P.dom() == poly.ip_u) || !(s.P.cod() == u.codes())) {
    throw CompositionError("P must be a map I_p(U) -> U");
  }
  if (!(s.P_tilde.dom() == poly.ip_ut) || !(s.P_tilde.cod() == u.total())) {
    throw CompositionError("P_tilde must be a map I_p(Ũ) -> Ũ");
  }
}

inline Square structure_square(const Universe& u, const PolyData& poly, const PStructure& s) {
  return Square::make(s.P_tilde, poly.ip_p, u.p(), s.P);
}

}  // namespace detail

inline Verdict verify_pre_p_structure(const Universe& u, const PolyData& poly, const PStructure& s) {
  detail::require_endpoints(u, poly, s);
  return check_commutes(detail::structure_square(u, poly, s));
}

inline Verdict verify_p_structure(const Universe& u, const PolyData& poly, const PStructure& s) {
  detail::require_endpoints(u, poly, s);
  return check_pullback_square(detail::structure_square(u, poly, s));
}

inline bool check_pre_p_structure(const Universe& u, const PStructure& s) {
  return verify_pre_p_structure(u, PolyData(u), s).ok;
}

inline bool check_p_structure(const Universe& u, const PStructure& s) {
  return verify_p_structure(u, PolyData(u), s).ok;
}

// Three universes and a square I_{p1}(Ũ2) -> Ũ3 over I_{p1}(U2) -> U3.
struct MixedPStructure {
  Universe p1;
  Universe p2;
  Universe p3;
  FinFun P;
  FinFun P_tilde;
};

inline Verdict verify_mixed_p_structure(const MixedPStructure& m) {
  const FinFun left = ip_mor(m.p1, m.p2.p());
  if (!(m.P.dom() == left.cod()) || !(m.P.cod() == m.p3.codes())) {
    throw CompositionError("mixed structure: P must be a map I_p1(U2) -> U3");
  }
  if (!(m.P_tilde.dom() == left.dom()) || !(m.P_tilde.cod() == m.p3.total())) {
    throw CompositionError("mixed structure: P_tilde must be a map I_p1(Ũ2) -> Ũ3");
  }
  return check_pullback_square(Square::make(m.P_tilde, left, m.p3.p(), m.P));
}

inline bool check_mixed_p_structure(const MixedPStructure& m) { return verify_mixed_p_structure(m).ok; }

// An element c of I_p(U) whose I_p(p)-fiber has a size no code realizes.
struct Obstruction {
  Val element;
  std::uint64_t fiber_size = 0;
};

struct StructureCounts {
  std::uint64_t pre = 0;   // saturates at kSaturated
  std::uint64_t full = 0;
  std::optional<Obstruction> obstruction;
};

namespace detail {

// For each c in I_p(U), the positions of I_p(Ũ) lying over it.
inline std::vector<std::vector<std::uint32_t>> fibers_of(const FinFun& f) {
  std::vector<std::vector<std::uint32_t>> out(f.cod().size());
  for (std::size_t i = 0; i < f.dom().size(); ++i) out[f.indices()[i]].push_back(static_cast<std::uint32_t>(i));
  return out;
}

inline std::uint64_t factorial(std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 2; i <= k; ++i) r = sat_mul(r, i);
  return r;
}

// Positions in Ũ of the fiber of p over the code at position b.
inline std::vector<std::vector<std::uint32_t>> code_fibers(const Universe& u) { return fibers_of(u.p()); }

}  // namespace detail

// Exact counts. A pre-structure is a free choice, for every c in I_p(U), of a
// code P(c) and a map from the I_p(p)-fiber over c into the p-fiber over P(c);
// it is a structure exactly when each of those maps is a bijection.
inline StructureCounts count_p_structures(const Universe& u, const PolyData& poly) {
  const auto over_c = detail::fibers_of(poly.ip_p);
  StructureCounts counts{1, 1, std::nullopt};
  for (std::size_t c = 0; c < poly.ip_u.size(); ++c) {
    const std::uint64_t k = over_c[c].size();
    std::uint64_t pre_here = 0;
    std::uint64_t full_here = 0;
    for (const auto& b : u.codes()) {
      const std::uint64_t n = u.el(b).size();
      pre_here = sat_add(pre_here, sat_pow(n, k));
      if (n == k) full_here = sat_add(full_here, detail::factorial(k));
    }
    counts.pre = sat_mul(counts.pre, pre_here);
    counts.full = sat_mul(counts.full, full_here);
    if (full_here == 0 && !counts.obstruction) counts.obstruction = Obstruction{poly.ip_u[c], k};
  }
  return counts;
}

inline StructureCounts count_p_structures(const Universe& u) { return count_p_structures(u, PolyData(u)); }

struct StructureEnumeration {
  std::vector<PStructure> pre_structures;
  std::vector<PStructure> structures;
};

namespace detail {

// Odometer over per-position option lists, last position fastest.
template <class Visit>
void for_each_choice(const std::vector<std::vector<std::uint32_t>>& options, Visit&& visit) {
  for (const auto& o : options) {
    if (o.empty()) return;
  }
  std::vector<std::size_t> digit(options.size(), 0);
  std::vector<std::uint32_t> pick(options.size());
  while (true) {
    for (std::size_t k = 0; k < options.size(); ++k) pick[k] = options[k][digit[k]];
    visit(pick);
    bool done = true;
    for (std::size_t k = options.size(); k > 0; --k) {
      if (++digit[k - 1] < options[k - 1].size()) {
        done = false;
        break;
      }
      digit[k - 1] = 0;
    }
    if (done) return;
  }
}

}  // namespace detail

// All pre-structures in lexicographic order of (graph of P, graph of P̃), and
// the sub-list of those whose square is a pullback.
inline StructureEnumeration enumerate_p_structures(const Universe& u, const PolyData& poly, std::uint64_t budget) {
  const StructureCounts counts = count_p_structures(u, poly);
  if (counts.pre > budget) {
    throw BudgetExceeded("enumerate_p_structures: " +
                         (counts.pre == kSaturated ? std::string("too many") : std::to_string(counts.pre)) +
                         " pre-structures exceed the budget of " + std::to_string(budget));
  }
  const auto over_c = detail::fibers_of(poly.ip_p);
  const auto over_b = detail::code_fibers(u);

  // A code is usable at c unless c has a nonempty fiber and El(code) is empty.
  std::vector<std::vector<std::uint32_t>> p_options(poly.ip_u.size());
  for (std::size_t c = 0; c < poly.ip_u.size(); ++c) {
    for (std::uint32_t b = 0; b < u.codes().size(); ++b) {
      if (over_c[c].empty() || !over_b[b].empty()) p_options[c].push_back(b);
    }
  }

  StructureEnumeration out;
  detail::for_each_choice(p_options, [&](const std::vector<std::uint32_t>& p_pick) {
    FinFun P(poly.ip_u, u.codes(), p_pick);
    std::vector<std::vector<std::uint32_t>> t_options(poly.ip_ut.size());
    for (std::size_t t = 0; t < poly.ip_ut.size(); ++t) t_options[t] = over_b[p_pick[poly.ip_p.indices()[t]]];
    detail::for_each_choice(t_options, [&](const std::vector<std::uint32_t>& t_pick) {
      out.pre_structures.push_back(PStructure{P, FinFun(poly.ip_ut, u.total(), t_pick)});
    });
  });
  for (const auto& s : out.pre_structures) {
    if (verify_p_structure(u, poly, s)) out.structures.push_back(s);
  }
  return out;
}

inline StructureEnumeration enumerate_p_structures(const Universe& u, std::uint64_t budget) {
  return enumerate_p_structures(u, PolyData(u), budget);
}

// Structures only, generated directly: P(c) ranges over codes whose El has
// the size of the fiber over c, and P̃ over bijections of fibers. Same order
// as enumerate_p_structures(...).structures.
inline std::vector<PStructure> find_p_structures(const Universe& u, const PolyData& poly, std::uint64_t budget) {
  const StructureCounts counts = count_p_structures(u, poly);
  if (counts.full > budget) {
    throw BudgetExceeded("find_p_structures: structure count exceeds the budget of " + std::to_string(budget));
  }
  std::vector<PStructure> out;
  if (counts.full == 0) return out;
  const auto over_c = detail::fibers_of(poly.ip_p);
  const auto over_b = detail::code_fibers(u);

  std::vector<std::vector<std::uint32_t>> p_options(poly.ip_u.size());
  for (std::size_t c = 0; c < poly.ip_u.size(); ++c) {
    for (std::uint32_t b = 0; b < u.codes().size(); ++b) {
      if (over_b[b].size() == over_c[c].size()) p_options[c].push_back(b);
    }
  }

  const std::size_t n_t = poly.ip_ut.size();
  detail::for_each_choice(p_options, [&](const std::vector<std::uint32_t>& p_pick) {
    FinFun P(poly.ip_u, u.codes(), p_pick);
    std::vector<std::uint32_t> t_pick(n_t);
    // used[c][b]: some position over c already maps to b.
    std::vector<std::vector<bool>> used(poly.ip_u.size(), std::vector<bool>(u.total().size(), false));
    // Depth-first over positions of I_p(Ũ) in order, keeping each c-fiber injective.
    std::function<void(std::size_t)> place = [&](std::size_t t) {
      if (t == n_t) {
        out.push_back(PStructure{P, FinFun(poly.ip_ut, u.total(), t_pick)});
        return;
      }
      const std::uint32_t c = poly.ip_p.indices()[t];
      for (auto target : over_b[p_pick[c]]) {
        if (used[c][target]) continue;
        used[c][target] = true;
        t_pick[t] = target;
        place(t + 1);
        used[c][target] = false;
      }
    };
    place(0);
  });
  return out;
}

inline std::vector<PStructure> find_p_structures(const Universe& u, std::uint64_t budget) {
  return find_p_structures(u, PolyData(u), budget);
}

// Picks a code whose El has the requested cardinality, or nothing.
using CodeChooser = std::function<std::optional<Val>(std::uint64_t)>;

inline CodeChooser least_code_of_size(const Universe& u) {
  return [&u](std::uint64_t n) -> std::optional<Val> {
    for (const auto& a : u.codes()) {
      if (u.el(a).size() == n) return a;
    }
    return std::nullopt;
  };
}

// The cardinality-based structure: P(a, s) is a code of size prod |El(s(e))|,
// and P̃ transports the tuple of second components through the positional
// bijection of that product with El(P(a, s)). Returns nothing if some size has
// no code or the result is not a structure.
inline std::optional<PStructure> tarski_p_structure(const Universe& u, const PolyData& poly, const CodeChooser& choose) {
  std::vector<Val> p_images;
  for (const auto& c : poly.ip_u) {
    std::uint64_t n = 1;
    for (const auto& kv : ip_assignment(c)) n = sat_mul(n, u.el(kv[1]).size());
    auto code = choose(n);
    if (!code) return std::nullopt;
    p_images.push_back(*code);
  }
  FinFun P(poly.ip_u, u.codes(), p_images);

  std::vector<Val> t_images;
  for (std::size_t t = 0; t < poly.ip_ut.size(); ++t) {
    const Val& target_code = P.image_at(poly.ip_p.indices()[t]);
    std::uint64_t position = 0;
    for (const auto& kv : ip_assignment(poly.ip_ut[t])) {
      const Val& ut = kv[1];
      const FinSet& family = u.el(ut[0]);
      position = position * family.size() + family.index_or_throw(ut[1]);
    }
    t_images.push_back(pair(target_code, u.el(target_code)[position]));
  }
  PStructure s{P, FinFun(poly.ip_ut, u.total(), t_images)};
  if (!verify_p_structure(u, poly, s)) return std::nullopt;
  return s;
}

// The same construction for a triple: P : I_p1(U2) -> U3 picks a code of p3
// of size prod |El2(s(e))|.
inline std::optional<MixedPStructure> tarski_mixed_p_structure(const Universe& p1, const Universe& p2,
                                                               const Universe& p3, const CodeChooser& choose) {
  const FinSet dom_u = ip_obj(p1, p2.codes());
  const FinSet dom_ut = ip_obj(p1, p2.total());
  const FinFun left = ip_mor(p1, p2.p());
  std::vector<Val> p_images;
  for (const auto& c : dom_u) {
    std::uint64_t n = 1;
    for (const auto& kv : ip_assignment(c)) n = sat_mul(n, p2.el(kv[1]).size());
    auto code = choose(n);
    if (!code) return std::nullopt;
    p_images.push_back(*code);
  }
  FinFun P(dom_u, p3.codes(), p_images);
  std::vector<Val> t_images;
  for (std::size_t t = 0; t < dom_ut.size(); ++t) {
    const Val& target_code = P.image_at(left.indices()[t]);
    std::uint64_t position = 0;
    for (const auto& kv : ip_assignment(dom_ut[t])) {
      const FinSet& family = p2.el(kv[1][0]);
      position = position * family.size() + family.index_or_throw(kv[1][1]);
    }
    t_images.push_back(pair(target_code, p3.el(target_code)[position]));
  }
  MixedPStructure m{p1, p2, p3, P, FinFun(dom_ut, p3.total(), t_images)};
  if (!verify_mixed_p_structure(m)) return std::nullopt;
  return m;
}

inline std::optional<PStructure> canonical_p_structure(const Universe& u) {
  PolyData poly(u);
  return tarski_p_structure(u, poly, least_code_of_size(u));
}

}  // namespace ccpi
