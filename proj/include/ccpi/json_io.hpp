#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "error.hpp"
#include "functor.hpp"
#include "report.hpp"
#include "universe.hpp"

namespace ccpi {

using Json = nlohmann::ordered_json;

// Atoms are strings, tuples are arrays.
inline Json val_to_json(const Val& v) {
  if (v.is_atom()) return Json(v.name());
  Json arr = Json::array();
  for (const auto& x : v.items()) arr.push_back(val_to_json(x));
  return arr;
}

inline Val val_from_json(const Json& j) {
  if (j.is_string()) return Val::atom(j.get<std::string>());
  if (!j.is_array()) throw SchemaError("expected a string or an array, got " + j.dump());
  Val::Items items;
  for (const auto& x : j) items.push_back(val_from_json(x));
  return Val::tuple(std::move(items));
}

// Object keys: an atom is its own name, a tuple is its compact JSON.
inline std::string val_key(const Val& v) { return v.is_atom() ? v.name() : val_to_json(v).dump(); }

inline Val val_from_key(const std::string& key) {
  if (!key.empty() && key.front() == '[') {
    Json j = Json::parse(key, nullptr, false);
    if (j.is_discarded()) throw SchemaError("malformed tuple key " + key);
    return val_from_json(j);
  }
  return Val::atom(key);
}

inline Json witness_to_json(const std::vector<std::pair<std::string, Val>>& w) {
  Json out = Json::object();
  for (const auto& [k, v] : w) out[k] = val_to_json(v);
  return out;
}

inline Json fun_to_json(const FinFun& f) {
  Json out = Json::object();
  for (std::size_t i = 0; i < f.dom().size(); ++i) out[val_key(f.dom()[i])] = val_to_json(f.image_at(i));
  return out;
}

// A table {key: value} that must cover dom exactly.
inline FinFun fun_from_json(const Json& j, const FinSet& dom, const FinSet& cod, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + " must be an object");
  std::map<Val, Val> table;
  for (const auto& [k, v] : j.items()) {
    Val x = val_from_key(k);
    if (!dom.contains(x)) throw SchemaError(what + ": key " + k + " is outside the domain");
    Val y = val_from_json(v);
    if (!cod.contains(y)) throw SchemaError(what + ": value " + v.dump() + " is outside the codomain");
    table.emplace(std::move(x), std::move(y));
  }
  std::vector<Val> images;
  for (const auto& x : dom) {
    auto it = table.find(x);
    if (it == table.end()) throw SchemaError(what + ": missing entry for " + val_key(x));
    images.push_back(it->second);
  }
  return FinFun(dom, cod, images);
}

inline void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || k == a;
    if (!known) throw SchemaError(what + ": unknown field \"" + k + "\"");
  }
}

inline std::vector<std::string> string_array(const Json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array of strings");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& x : j) {
    if (!x.is_string()) throw SchemaError(what + " must be an array of strings");
    out.push_back(x.get<std::string>());
    if (!seen.insert(out.back()).second) throw SchemaError(what + ": duplicate entry \"" + out.back() + "\"");
  }
  return out;
}

struct UniverseFile {
  Universe universe;
  // "canonical", "explicit", or empty when no "P" was given.
  std::string p_kind;
  std::optional<PStructure> structure;
};

inline UniverseFile universe_from_json(const Json& j) {
  reject_unknown(j, {"U", "El", "P"}, "universe");
  if (!j.contains("U") || !j.contains("El")) throw SchemaError("universe: \"U\" and \"El\" are required");
  const auto codes = string_array(j.at("U"), "U");
  const Json& el = j.at("El");
  if (!el.is_object()) throw SchemaError("El must be an object");
  std::vector<std::pair<std::string, std::vector<std::string>>> table;
  for (const auto& c : codes) {
    if (!el.contains(c)) throw SchemaError("El: missing family for code \"" + c + "\"");
    table.emplace_back(c, string_array(el.at(c), "El[" + c + "]"));
  }
  for (const auto& [k, v] : el.items()) {
    if (std::find(codes.begin(), codes.end(), k) == codes.end()) throw SchemaError("El: \"" + k + "\" is not a code");
  }
  for (const auto& c : codes) {
    if (!c.empty() && c.front() == '[') throw SchemaError("code names may not start with '['");
  }
  UniverseFile out{Universe::from_names(table), "", std::nullopt};
  if (!j.contains("P")) return out;
  const Json& p = j.at("P");
  if (p.is_string()) {
    if (p.get<std::string>() != "canonical") throw SchemaError("P must be \"canonical\" or an explicit table");
    out.p_kind = "canonical";
    out.structure = canonical_p_structure(out.universe);
    return out;
  }
  reject_unknown(p, {"table", "table_tilde"}, "P");
  if (!p.contains("table") || !p.contains("table_tilde")) throw SchemaError("P: \"table\" and \"table_tilde\" are required");
  const PolyData poly(out.universe);
  out.p_kind = "explicit";
  out.structure = PStructure{fun_from_json(p.at("table"), poly.ip_u, out.universe.codes(), "P.table"),
                             fun_from_json(p.at("table_tilde"), poly.ip_ut, out.universe.total(), "P.table_tilde")};
  return out;
}

// Canonical form: codes, families and table rows in Val order.
inline Json universe_to_json(const Universe& u, const std::optional<PStructure>& s = std::nullopt) {
  Json out = Json::object();
  out["U"] = Json::array();
  out["El"] = Json::object();
  for (const auto& c : u.codes()) {
    out["U"].push_back(c.name());
    Json fam = Json::array();
    for (const auto& e : u.el(c)) fam.push_back(val_to_json(e));
    out["El"][c.name()] = fam;
  }
  if (s) out["P"] = Json{{"table", fun_to_json(s->P)}, {"table_tilde", fun_to_json(s->P_tilde)}};
  return out;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json j = Json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw SchemaError("malformed JSON in " + path.string());
  return j;
}

inline UniverseFile load_universe(const std::filesystem::path& path) { return universe_from_json(read_json_file(path)); }

struct FunctorFile {
  UniverseFile source;
  UniverseFile target;
  ElementwiseFunctor functor;
};

// "source"/"target" are inline universe objects or paths relative to base.
inline FunctorFile functor_from_json(const Json& j, const std::filesystem::path& base = ".") {
  reject_unknown(j, {"val_map", "source", "target", "phi", "phi_tilde"}, "functor");
  if (!j.contains("source") || !j.contains("target")) throw SchemaError("functor: \"source\" and \"target\" are required");
  auto universe_ref = [&](const Json& r) {
    if (r.is_string()) return load_universe(base / r.get<std::string>());
    return universe_from_json(r);
  };
  UniverseFile src = universe_ref(j.at("source"));
  UniverseFile dst = universe_ref(j.at("target"));

  std::map<std::string, std::string> relabel;
  if (j.contains("val_map")) {
    const Json& m = j.at("val_map");
    if (!m.is_object()) throw SchemaError("val_map must be an object of atom renamings");
    for (const auto& [k, v] : m.items()) {
      if (!v.is_string()) throw SchemaError("val_map values must be strings");
      relabel.emplace(k, v.get<std::string>());
    }
  }
  if (j.contains("phi") != j.contains("phi_tilde")) throw SchemaError("functor: give both phi and phi_tilde or neither");
  if (!j.contains("phi")) return FunctorFile{src, dst, ElementwiseFunctor::inclusion(relabel, src.universe, dst.universe)};
  const FinSet fu = ElementwiseFunctor::image_of(relabel, src.universe.codes());
  const FinSet fut = ElementwiseFunctor::image_of(relabel, src.universe.total());
  FinFun phi = fun_from_json(j.at("phi"), fu, dst.universe.codes(), "phi");
  FinFun phi_tilde = fun_from_json(j.at("phi_tilde"), fut, dst.universe.total(), "phi_tilde");
  return FunctorFile{src, dst,
                     ElementwiseFunctor(relabel, src.universe, dst.universe, std::move(phi), std::move(phi_tilde))};
}

inline FunctorFile load_functor(const std::filesystem::path& path) {
  return functor_from_json(read_json_file(path), path.parent_path());
}

}  // namespace ccpi
