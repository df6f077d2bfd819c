#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "error.hpp"
#include "val.hpp"

namespace ccpi {

// Saturating arithmetic for candidate counts; UINT64_MAX means "too many".
inline constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

inline std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r = sat_mul(r, base);
    if (r == 0 || r == kSaturated) break;
  }
  return r;
}

// Outcome of a structural check, with a witness on failure.
struct Verdict {
  bool ok = true;
  std::string reason;
  std::vector<std::pair<std::string, Val>> witness;

  explicit operator bool() const { return ok; }

  static Verdict pass() { return {}; }
  static Verdict fail(std::string reason, std::vector<std::pair<std::string, Val>> witness = {}) {
    return Verdict{false, std::move(reason), std::move(witness)};
  }
};

// A finite set of values, stored as a strictly increasing sequence.
class FinSet {
 public:
  FinSet() : elems_(empty_buffer()) {}

  explicit FinSet(std::vector<Val> elems) {
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    elems_ = std::make_shared<const std::vector<Val>>(std::move(elems));
  }

  FinSet(std::initializer_list<Val> elems) : FinSet(std::vector<Val>(elems)) {}

  static FinSet from_sorted(std::vector<Val> elems) {
    for (std::size_t i = 1; i < elems.size(); ++i) {
      if (!(elems[i - 1] < elems[i])) {
        throw DomainError("FinSet::from_sorted: sequence is not strictly increasing at " +
                          to_string(elems[i]));
      }
    }
    FinSet s;
    s.elems_ = std::make_shared<const std::vector<Val>>(std::move(elems));
    return s;
  }

  std::size_t size() const { return elems_->size(); }
  bool empty() const { return elems_->empty(); }
  const Val& operator[](std::size_t i) const { return (*elems_)[i]; }
  const std::vector<Val>& elements() const { return *elems_; }
  auto begin() const { return elems_->begin(); }
  auto end() const { return elems_->end(); }

  std::optional<std::size_t> index_of(const Val& x) const {
    auto it = std::lower_bound(elems_->begin(), elems_->end(), x);
    if (it == elems_->end() || !(*it == x)) return std::nullopt;
    return static_cast<std::size_t>(it - elems_->begin());
  }

  std::size_t index_or_throw(const Val& x) const {
    if (auto i = index_of(x)) return *i;
    throw DomainError("element " + to_string(x) + " is not a member of the set");
  }

  bool contains(const Val& x) const { return index_of(x).has_value(); }

  friend bool operator==(const FinSet& a, const FinSet& b) {
    return a.elems_ == b.elems_ || *a.elems_ == *b.elems_;
  }
  friend std::strong_ordering operator<=>(const FinSet& a, const FinSet& b) {
    if (a.elems_ == b.elems_) return std::strong_ordering::equal;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  static const std::shared_ptr<const std::vector<Val>>& empty_buffer() {
    static const auto buf = std::make_shared<const std::vector<Val>>();
    return buf;
  }

  std::shared_ptr<const std::vector<Val>> elems_;
};

// A total function between finite sets. The graph is stored as, for each
// domain position, the position of its image in the codomain.
class FinFun {
 public:
  FinFun() = default;

  FinFun(FinSet dom, FinSet cod, std::vector<std::uint32_t> index)
      : dom_(std::move(dom)), cod_(std::move(cod)), index_(std::move(index)) {
    if (index_.size() != dom_.size()) {
      throw DomainError("FinFun: graph is not total on its domain");
    }
    for (auto i : index_) {
      if (i >= cod_.size()) throw DomainError("FinFun: image outside the codomain");
    }
  }

  FinFun(FinSet dom, FinSet cod, const std::vector<Val>& images)
      : dom_(std::move(dom)), cod_(std::move(cod)) {
    if (images.size() != dom_.size()) {
      throw DomainError("FinFun: graph is not total on its domain");
    }
    index_.reserve(images.size());
    for (const auto& y : images) {
      auto i = cod_.index_of(y);
      if (!i) throw DomainError("FinFun: image " + to_string(y) + " outside the codomain");
      index_.push_back(static_cast<std::uint32_t>(*i));
    }
  }

  // Builds the function x -> f(x) over every x in dom.
  template <class F>
  static FinFun tabulate(FinSet dom, FinSet cod, F&& f) {
    std::vector<Val> images;
    images.reserve(dom.size());
    for (const auto& x : dom) images.push_back(f(x));
    return FinFun(std::move(dom), std::move(cod), images);
  }

  const FinSet& dom() const { return dom_; }
  const FinSet& cod() const { return cod_; }
  const std::vector<std::uint32_t>& indices() const { return index_; }

  const Val& image_at(std::size_t i) const { return cod_[index_[i]]; }

  const Val& operator()(const Val& x) const {
    auto i = dom_.index_of(x);
    if (!i) throw DomainError("FinFun: " + to_string(x) + " is not in the domain");
    return image_at(*i);
  }

  std::vector<Val> images() const {
    std::vector<Val> out;
    out.reserve(index_.size());
    for (auto i : index_) out.push_back(cod_[i]);
    return out;
  }

  bool is_injective() const {
    std::vector<bool> seen(cod_.size(), false);
    for (auto i : index_) {
      if (seen[i]) return false;
      seen[i] = true;
    }
    return true;
  }

  bool is_bijective() const { return dom_.size() == cod_.size() && is_injective(); }

  friend bool operator==(const FinFun&, const FinFun&) = default;
  friend std::strong_ordering operator<=>(const FinFun& a, const FinFun& b) {
    if (auto c = a.dom_ <=> b.dom_; c != 0) return c;
    if (auto c = a.cod_ <=> b.cod_; c != 0) return c;
    return a.index_ <=> b.index_;
  }

 private:
  FinSet dom_;
  FinSet cod_;
  std::vector<std::uint32_t> index_;
};

// Graph of f as the tuple of pairs (x, f(x)) in domain order.
inline Val to_val(const FinFun& f) {
  Val::Items items;
  items.reserve(f.dom().size());
  for (std::size_t i = 0; i < f.dom().size(); ++i) items.push_back(pair(f.dom()[i], f.image_at(i)));
  return Val::tuple(std::move(items));
}

// Diagrammatic composite: x -> g(f(x)).
inline FinFun compose(const FinFun& f, const FinFun& g) {
  if (!(f.cod() == g.dom())) {
    throw CompositionError("compose: codomain of the first map differs from domain of the second");
  }
  std::vector<std::uint32_t> idx;
  idx.reserve(f.indices().size());
  for (auto i : f.indices()) idx.push_back(g.indices()[i]);
  return FinFun(f.dom(), g.cod(), std::move(idx));
}

inline FinFun inverse(const FinFun& f) {
  if (!f.is_bijective()) throw DomainError("inverse: map is not a bijection");
  std::vector<std::uint32_t> idx(f.dom().size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[f.indices()[i]] = static_cast<std::uint32_t>(i);
  return FinFun(f.cod(), f.dom(), std::move(idx));
}

inline FinFun identity(const FinSet& a) {
  std::vector<std::uint32_t> idx(a.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
  return FinFun(a, a, std::move(idx));
}

inline const FinSet& terminal() {
  static const FinSet one{atom("*")};
  return one;
}

inline FinFun to_terminal(const FinSet& a) {
  return FinFun(a, terminal(), std::vector<std::uint32_t>(a.size(), 0));
}

// Apex of a product or pullback cone together with its two projections.
struct Span {
  FinSet apex;
  FinFun pr1;
  FinFun pr2;
};

inline Span product(const FinSet& a, const FinSet& b) {
  std::vector<Val> elems;
  std::vector<std::uint32_t> i1, i2;
  elems.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      elems.push_back(pair(a[i], b[j]));
      i1.push_back(static_cast<std::uint32_t>(i));
      i2.push_back(static_cast<std::uint32_t>(j));
    }
  }
  FinSet apex = FinSet::from_sorted(std::move(elems));
  return Span{apex, FinFun(apex, a, std::move(i1)), FinFun(apex, b, std::move(i2))};
}

// The chosen pullback: {(a,b) | f(a) = g(b)} in canonical order.
inline Span pullback(const FinFun& f, const FinFun& g) {
  if (!(f.cod() == g.cod())) throw CompositionError("pullback: maps have different codomains");
  std::vector<std::vector<std::uint32_t>> over(g.cod().size());
  for (std::size_t j = 0; j < g.dom().size(); ++j) {
    over[g.indices()[j]].push_back(static_cast<std::uint32_t>(j));
  }
  std::vector<Val> elems;
  std::vector<std::uint32_t> i1, i2;
  for (std::size_t i = 0; i < f.dom().size(); ++i) {
    for (auto j : over[f.indices()[i]]) {
      elems.push_back(pair(f.dom()[i], g.dom()[j]));
      i1.push_back(static_cast<std::uint32_t>(i));
      i2.push_back(j);
    }
  }
  FinSet apex = FinSet::from_sorted(std::move(elems));
  return Span{apex, FinFun(apex, f.dom(), std::move(i1)), FinFun(apex, g.dom(), std::move(i2))};
}

//   A --top--> B
//   |          |
//  left      right
//   v          v
//   C -bottom> D
struct Square {
  FinFun top;
  FinFun left;
  FinFun right;
  FinFun bottom;

  static Square make(FinFun top, FinFun left, FinFun right, FinFun bottom) {
    if (!(top.dom() == left.dom()) || !(top.cod() == right.dom()) ||
        !(left.cod() == bottom.dom()) || !(right.cod() == bottom.cod())) {
      throw CompositionError("Square: endpoints do not form a square");
    }
    return Square{std::move(top), std::move(left), std::move(right), std::move(bottom)};
  }
};

inline Verdict check_commutes(const Square& s) {
  const FinFun a = compose(s.top, s.right);
  const FinFun b = compose(s.left, s.bottom);
  for (std::size_t i = 0; i < a.dom().size(); ++i) {
    if (a.indices()[i] != b.indices()[i]) {
      return Verdict::fail("square does not commute",
                           {{"element", a.dom()[i]},
                            {"via_top_right", a.image_at(i)},
                            {"via_left_bottom", b.image_at(i)}});
    }
  }
  return Verdict::pass();
}

// The square is a pullback iff x -> (left(x), top(x)) is a bijection onto the
// chosen pullback of (bottom, right).
inline Verdict check_pullback_square(const Square& s) {
  if (Verdict c = check_commutes(s); !c) return c;
  const Span pb = pullback(s.bottom, s.right);
  std::vector<std::optional<std::size_t>> hit(pb.apex.size());
  const FinSet& a = s.top.dom();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Val image = pair(s.left.image_at(i), s.top.image_at(i));
    const std::size_t k = pb.apex.index_or_throw(image);
    if (hit[k]) {
      return Verdict::fail("two elements map to the same point of the chosen pullback",
                           {{"first", a[*hit[k]]}, {"second", a[i]}, {"point", image}});
    }
    hit[k] = i;
  }
  for (std::size_t k = 0; k < hit.size(); ++k) {
    if (!hit[k]) {
      return Verdict::fail("point of the chosen pullback has no preimage", {{"point", pb.apex[k]}});
    }
  }
  return Verdict::pass();
}

inline bool is_pullback_square(const Square& s) { return check_pullback_square(s).ok; }

// Dependent product along p: E -> B of q: X -> E. Elements over b are
// (b, ((e1, x1), ..., (ek, xk))) where e1 < ... < ek is the fiber of p over b
// and q(xi) = ei.
struct DependentProduct {
  FinSet carrier;
  FinFun proj;
};

inline DependentProduct dependent_product(const FinFun& p, const FinFun& q) {
  if (!(q.cod() == p.dom())) throw CompositionError("dependent_product: cod(q) must equal dom(p)");
  const FinSet& e_set = p.dom();
  const FinSet& b_set = p.cod();
  std::vector<std::vector<std::uint32_t>> fiber(b_set.size());
  for (std::size_t e = 0; e < e_set.size(); ++e) fiber[p.indices()[e]].push_back(static_cast<std::uint32_t>(e));
  std::vector<std::vector<std::uint32_t>> over_e(e_set.size());
  for (std::size_t x = 0; x < q.dom().size(); ++x) over_e[q.indices()[x]].push_back(static_cast<std::uint32_t>(x));

  std::vector<Val> elems;
  std::vector<std::uint32_t> proj;
  for (std::size_t b = 0; b < b_set.size(); ++b) {
    const auto& es = fiber[b];
    if (std::any_of(es.begin(), es.end(), [&](auto e) { return over_e[e].empty(); })) continue;
    std::vector<std::size_t> digit(es.size(), 0);
    while (true) {
      Val::Items assoc;
      assoc.reserve(es.size());
      for (std::size_t k = 0; k < es.size(); ++k) {
        assoc.push_back(pair(e_set[es[k]], q.dom()[over_e[es[k]][digit[k]]]));
      }
      elems.push_back(pair(b_set[b], Val::tuple(std::move(assoc))));
      proj.push_back(static_cast<std::uint32_t>(b));
      bool done = true;
      for (std::size_t k = es.size(); k > 0; --k) {
        if (++digit[k - 1] < over_e[es[k - 1]].size()) {
          done = false;
          break;
        }
        digit[k - 1] = 0;
      }
      if (done) break;
    }
  }
  FinSet carrier = FinSet::from_sorted(std::move(elems));
  return DependentProduct{carrier, FinFun(carrier, b_set, std::move(proj))};
}

inline std::vector<FinFun> global_elements(const FinSet& a) {
  std::vector<FinFun> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.emplace_back(terminal(), a, std::vector<std::uint32_t>{static_cast<std::uint32_t>(i)});
  }
  return out;
}

// |B|^|A|, saturated.
inline std::uint64_t function_count(const FinSet& a, const FinSet& b) {
  return sat_pow(b.size(), a.size());
}

// Visits every function A -> B in lexicographic order of image sequences.
// The visitor may return bool; false stops the walk. Returns false iff stopped.
template <class Visit>
bool for_each_function(const FinSet& a, const FinSet& b, Visit&& visit) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n > 0 && m == 0) return true;
  std::vector<std::uint32_t> idx(n, 0);
  while (true) {
    FinFun f(a, b, idx);
    if constexpr (std::is_same_v<std::invoke_result_t<Visit&, const FinFun&>, bool>) {
      if (!visit(f)) return false;
    } else {
      visit(f);
    }
    bool done = true;
    for (std::size_t k = n; k > 0; --k) {
      if (++idx[k - 1] < m) {
        done = false;
        break;
      }
      idx[k - 1] = 0;
    }
    if (done) return true;
  }
}

inline std::vector<FinFun> all_functions(const FinSet& a, const FinSet& b) {
  std::vector<FinFun> out;
  for_each_function(a, b, [&](const FinFun& f) { out.push_back(f); });
  return out;
}

// The k-th function A -> B in the order of for_each_function.
inline FinFun nth_function(const FinSet& a, const FinSet& b, std::uint64_t k) {
  const std::size_t n = a.size();
  std::vector<std::uint32_t> idx(n, 0);
  const std::uint64_t m = b.size();
  for (std::size_t pos = n; pos > 0; --pos) {
    if (m == 0) throw DomainError("nth_function: no functions into the empty set");
    idx[pos - 1] = static_cast<std::uint32_t>(k % m);
    k /= m;
  }
  if (k != 0) throw DomainError("nth_function: index out of range");
  return FinFun(a, b, std::move(idx));
}

}  // namespace ccpi
