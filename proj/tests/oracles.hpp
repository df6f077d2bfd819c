#pragma once

// Brute-force reference computations. Everything here works on plain strings
// and index vectors and shares no code with the library beyond rendering
// library values to strings for comparison.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <ccpi/finset.hpp>
#include <ccpi/universe.hpp>

namespace oracle {

// Every function {0..n-1} -> {0..m-1}, last position varying fastest.
inline std::vector<std::vector<int>> functions(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n);
  std::function<void(int)> go = [&](int i) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v < m; ++v) {
      cur[i] = v;
      go(i + 1);
    }
  };
  go(0);
  return out;
}

// A universe as a table of code -> element names.
struct Fam {
  std::vector<std::string> codes;
  std::map<std::string, std::vector<std::string>> el;

  std::vector<std::string> total() const {
    std::vector<std::string> out;
    for (const auto& a : codes) {
      for (const auto& e : el.at(a)) out.push_back("(" + a + "," + e + ")");
    }
    return out;
  }
  std::vector<int> total_code() const {
    std::vector<int> out;
    for (std::size_t a = 0; a < codes.size(); ++a) {
      for (std::size_t k = 0; k < el.at(codes[a]).size(); ++k) out.push_back(static_cast<int>(a));
    }
    return out;
  }
  std::size_t size_of(int a) const { return el.at(codes[a]).size(); }
};

// An element of I_p(X): a code and, for each element of its family in
// listed order, a position in X.
struct IpElem {
  int code;
  std::vector<int> assign;
  bool operator<(const IpElem& o) const { return std::tie(code, assign) < std::tie(o.code, o.assign); }
  bool operator==(const IpElem& o) const { return code == o.code && assign == o.assign; }
};

inline std::vector<IpElem> ip(const Fam& u, int x_size) {
  std::vector<IpElem> out;
  for (int a = 0; a < static_cast<int>(u.codes.size()); ++a) {
    for (auto& s : functions(static_cast<int>(u.size_of(a)), x_size)) out.push_back(IpElem{a, s});
  }
  return out;
}

inline std::string render(const Fam& u, const IpElem& c, const std::vector<std::string>& x) {
  std::string s = "(" + u.codes[c.code] + ",(";
  const auto& es = u.el.at(u.codes[c.code]);
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) s += ",";
    s += "(" + es[i] + "," + x[c.assign[i]] + ")";
  }
  return s + "))";
}

inline int index_in(const std::vector<IpElem>& xs, const IpElem& c) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == c) return static_cast<int>(i);
  }
  return -1;
}

// Position table of I_p(p): I_p(Ũ) -> I_p(U).
inline std::vector<int> ip_p(const Fam& u, const std::vector<IpElem>& ipu, const std::vector<IpElem>& iput) {
  const auto tc = u.total_code();
  std::vector<int> out;
  for (const auto& t : iput) {
    IpElem c{t.code, {}};
    for (int x : t.assign) c.assign.push_back(tc[x]);
    out.push_back(index_in(ipu, c));
  }
  return out;
}

using Graph = std::map<std::string, std::string>;

struct NaiveStructures {
  std::uint64_t candidates = 0;
  std::vector<std::pair<Graph, Graph>> pre;
  std::vector<std::pair<Graph, Graph>> full;
};

// Every pair (P, P̃) of functions, checked directly against the definitions.
inline NaiveStructures naive_structures(const Fam& u) {
  const auto tot = u.total();
  const auto tc = u.total_code();
  const auto ipu = ip(u, static_cast<int>(u.codes.size()));
  const auto iput = ip(u, static_cast<int>(tot.size()));
  const auto pp = ip_p(u, ipu, iput);
  std::vector<std::string> ipu_s, iput_s;
  for (const auto& c : ipu) ipu_s.push_back(render(u, c, u.codes));
  for (const auto& t : iput) iput_s.push_back(render(u, t, tot));

  NaiveStructures out;
  const auto ps = functions(static_cast<int>(ipu.size()), static_cast<int>(u.codes.size()));
  const auto pts = functions(static_cast<int>(iput.size()), static_cast<int>(tot.size()));
  for (const auto& P : ps) {
    for (const auto& Pt : pts) {
      ++out.candidates;
      bool commutes = true;
      for (std::size_t t = 0; t < iput.size(); ++t) commutes = commutes && tc[Pt[t]] == P[pp[t]];
      if (!commutes) continue;
      Graph gp, gt;
      for (std::size_t c = 0; c < ipu.size(); ++c) gp[ipu_s[c]] = u.codes[P[c]];
      for (std::size_t t = 0; t < iput.size(); ++t) gt[iput_s[t]] = tot[Pt[t]];
      out.pre.emplace_back(gp, gt);
      // Pullback: t -> (ip_p t, P̃ t) is a bijection onto {(c, y) | P c = code y}.
      std::set<std::pair<int, int>> image;
      for (std::size_t t = 0; t < iput.size(); ++t) image.emplace(pp[t], Pt[t]);
      std::size_t target = 0;
      for (std::size_t c = 0; c < ipu.size(); ++c) {
        for (std::size_t y = 0; y < tot.size(); ++y) target += tc[y] == P[c];
      }
      if (image.size() == iput.size() && image.size() == target) out.full.emplace_back(gp, gt);
    }
  }
  return out;
}

inline Graph graph(const ccpi::FinFun& f) {
  Graph g;
  for (std::size_t i = 0; i < f.dom().size(); ++i) g[ccpi::to_string(f.dom()[i])] = ccpi::to_string(f.image_at(i));
  return g;
}

inline std::set<std::pair<Graph, Graph>> graphs(const std::vector<ccpi::PStructure>& ss) {
  std::set<std::pair<Graph, Graph>> out;
  for (const auto& s : ss) out.emplace(graph(s.P), graph(s.P_tilde));
  return out;
}

inline std::set<std::pair<Graph, Graph>> graphs(const std::vector<std::pair<Graph, Graph>>& ss) {
  return {ss.begin(), ss.end()};
}

// Number of pre-structures: sum over all P of prod_t |El(P(ip_p t))|.
inline std::uint64_t pre_count(const Fam& u) {
  const auto tot = u.total();
  const auto ipu = ip(u, static_cast<int>(u.codes.size()));
  const auto iput = ip(u, static_cast<int>(tot.size()));
  const auto pp = ip_p(u, ipu, iput);
  std::uint64_t total = 0;
  std::vector<int> P(ipu.size(), 0);
  while (true) {
    std::uint64_t prod = 1;
    for (std::size_t t = 0; t < iput.size() && prod; ++t) prod *= u.size_of(P[pp[t]]);
    total += prod;
    std::size_t k = P.size();
    while (k > 0 && ++P[k - 1] == static_cast<int>(u.codes.size())) P[--k] = 0;
    if (k == 0) break;
  }
  return total;
}

// Elements c of I_p(U) for which no code and no map from the I_p(p)-fiber over
// c into Ũ gives a bijection onto El of that code, with their fiber sizes.
inline std::map<std::string, std::size_t> local_obstructions(const Fam& u) {
  const auto tot = u.total();
  const auto tc = u.total_code();
  const auto ipu = ip(u, static_cast<int>(u.codes.size()));
  const auto iput = ip(u, static_cast<int>(tot.size()));
  const auto pp = ip_p(u, ipu, iput);
  std::map<std::string, std::size_t> out;
  for (std::size_t c = 0; c < ipu.size(); ++c) {
    std::vector<int> fiber;
    for (std::size_t t = 0; t < iput.size(); ++t) {
      if (pp[t] == static_cast<int>(c)) fiber.push_back(static_cast<int>(t));
    }
    bool some = false;
    for (int b = 0; b < static_cast<int>(u.codes.size()) && !some; ++b) {
      for (const auto& m : functions(static_cast<int>(fiber.size()), static_cast<int>(tot.size()))) {
        std::set<int> hit;
        bool over_b = true;
        for (int y : m) {
          over_b = over_b && tc[y] == b;
          hit.insert(y);
        }
        if (over_b && hit.size() == m.size() && hit.size() == u.size_of(b)) {
          some = true;
          break;
        }
      }
    }
    if (!some) out[render(u, ipu[c], u.codes)] = fiber.size();
  }
  return out;
}

// Extension counts at a context with k points of int, by enumerating the
// classifiers and sections themselves.
struct ExtCounts {
  std::uint64_t ob1 = 0, ob2 = 0, tob1 = 0, tob2 = 0;
};

inline ExtCounts extension_counts(const Fam& u, int k) {
  ExtCounts out;
  const int nu = static_cast<int>(u.codes.size());
  for (const auto& F : functions(k, nu)) {
    ++out.ob1;
    // int of the extension: pairs (x, e) with e in El(F x).
    std::uint64_t sections1 = 1;
    int ext_size = 0;
    for (int x = 0; x < k; ++x) {
      ext_size += static_cast<int>(u.size_of(F[x]));
      sections1 *= u.size_of(F[x]);
    }
    out.tob1 += sections1;
    for (const auto& G : functions(ext_size, nu)) {
      ++out.ob2;
      // A section of the top projection picks a point of El(G(y)) for every y.
      std::uint64_t secs = 1;
      for (int y = 0; y < ext_size; ++y) secs *= u.size_of(G[y]);
      out.tob2 += secs;
    }
  }
  return out;
}

// Number of contexts of each length up to max_len, by recursion on int sizes.
inline std::vector<std::uint64_t> context_counts(const Fam& u, int max_len) {
  std::vector<std::uint64_t> out(max_len + 1, 0);
  std::function<void(int, int)> go = [&](int len, int k) {
    ++out[len];
    if (len == max_len) return;
    for (const auto& F : functions(k, static_cast<int>(u.codes.size()))) {
      int next = 0;
      for (int a : F) next += static_cast<int>(u.size_of(a));
      go(len + 1, next);
    }
  };
  go(0, 1);
  return out;
}

// Pairs (i, j) with f[i] = g[j].
inline std::vector<std::pair<int, int>> pullback_pairs(const std::vector<int>& f, const std::vector<int>& g) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    for (int j = 0; j < static_cast<int>(g.size()); ++j) {
      if (f[i] == g[j]) out.emplace_back(i, j);
    }
  }
  return out;
}

inline Fam boolean() { return Fam{{"0", "1"}, {{"0", {}}, {"1", {"*"}}}}; }
inline Fam b2() { return Fam{{"0", "1a", "1b"}, {{"0", {}}, {"1a", {"*"}}, {"1b", {"*"}}}}; }
inline Fam v2() { return Fam{{"0", "1", "2"}, {{"0", {}}, {"1", {"0"}}, {"2", {"0", "1"}}}}; }

inline ccpi::Universe to_universe(const Fam& f) {
  std::vector<std::pair<std::string, std::vector<std::string>>> t;
  for (const auto& a : f.codes) t.emplace_back(a, f.el.at(a));
  return ccpi::Universe::from_names(t);
}

}  // namespace oracle

namespace gen {

// Small random finite data for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  ccpi::FinSet set(int n, const std::string& prefix) {
    std::vector<ccpi::Val> xs;
    for (int i = 0; i < n; ++i) xs.push_back(ccpi::atom(prefix + std::to_string(i)));
    return ccpi::FinSet(xs);
  }

  ccpi::FinFun fun(const ccpi::FinSet& dom, const ccpi::FinSet& cod) {
    std::vector<std::uint32_t> idx(dom.size());
    for (auto& i : idx) i = static_cast<std::uint32_t>(below(static_cast<int>(cod.size())));
    return ccpi::FinFun(dom, cod, idx);
  }

  ccpi::Val val(int depth) {
    if (depth == 0 || below(3) == 0) return ccpi::atom(std::string(1, static_cast<char>('a' + below(4))));
    ccpi::Val::Items items;
    const int n = below(4);
    for (int i = 0; i < n; ++i) items.push_back(val(depth - 1));
    return ccpi::Val::tuple(std::move(items));
  }

  // Codes "c0".. with families of size <= max_el.
  oracle::Fam fam(int codes, int max_el) {
    oracle::Fam f;
    for (int a = 0; a < codes; ++a) {
      const std::string c = "c" + std::to_string(a);
      f.codes.push_back(c);
      f.el[c];
      const int n = below(max_el + 1);
      for (int e = 0; e < n; ++e) f.el[c].push_back("e" + std::to_string(e));
    }
    return f;
  }
};

}  // namespace gen
