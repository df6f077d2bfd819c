#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ccpi {

// Hereditarily finite value: an atom or a tuple of values.
//
// Every element of every finite set in the library is a Val. Tuples are held
// behind a shared immutable buffer so copies are cheap.
//
// Order: atoms by name, every atom before every tuple, tuples
// lexicographically.
class Val {
 public:
  using Items = std::vector<Val>;

  // The empty tuple.
  Val() : rep_(std::make_shared<const Items>()) {}

  static Val atom(std::string name) { return Val(std::move(name)); }
  static Val tuple(Items items) {
    return Val(std::make_shared<const Items>(std::move(items)));
  }
  static Val tuple(std::initializer_list<Val> items) { return tuple(Items(items)); }

  bool is_atom() const { return rep_.index() == 0; }
  bool is_tuple() const { return rep_.index() == 1; }

  const std::string& name() const { return std::get<0>(rep_); }
  const Items& items() const { return *std::get<1>(rep_); }

  std::size_t size() const { return is_atom() ? 0 : items().size(); }
  const Val& operator[](std::size_t i) const { return items()[i]; }

  friend bool operator==(const Val& a, const Val& b) {
    if (a.rep_.index() != b.rep_.index()) return false;
    if (a.is_atom()) return a.name() == b.name();
    const auto& pa = std::get<1>(a.rep_);
    const auto& pb = std::get<1>(b.rep_);
    return pa == pb || *pa == *pb;
  }

  friend std::strong_ordering operator<=>(const Val& a, const Val& b) {
    if (a.is_atom() != b.is_atom()) {
      return a.is_atom() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.is_atom()) {
      int c = a.name().compare(b.name());
      return c < 0 ? std::strong_ordering::less
                   : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }
    const auto& pa = std::get<1>(a.rep_);
    const auto& pb = std::get<1>(b.rep_);
    if (pa == pb) return std::strong_ordering::equal;
    const Items& xs = *pa;
    const Items& ys = *pb;
    const std::size_t n = std::min(xs.size(), ys.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = xs[i] <=> ys[i]; c != 0) return c;
    }
    return xs.size() <=> ys.size();
  }

 private:
  explicit Val(std::string name) : rep_(std::move(name)) {}
  explicit Val(std::shared_ptr<const Items> items) : rep_(std::move(items)) {}

  std::variant<std::string, std::shared_ptr<const Items>> rep_;
};

inline Val atom(std::string name) { return Val::atom(std::move(name)); }
inline Val pair(Val a, Val b) { return Val::tuple({std::move(a), std::move(b)}); }

// Compact human-readable rendering: atoms verbatim, tuples as (a,b,...).
inline void render(std::ostream& os, const Val& v) {
  if (v.is_atom()) {
    os << v.name();
    return;
  }
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    render(os, v[i]);
  }
  os << ')';
}

inline std::ostream& operator<<(std::ostream& os, const Val& v) {
  render(os, v);
  return os;
}

inline std::string to_string(const Val& v) {
  std::ostringstream os;
  render(os, v);
  return os.str();
}

}  // namespace ccpi
