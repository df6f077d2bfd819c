#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "finset.hpp"
#include "val.hpp"

namespace ccpi {

// One named law, how many instances were checked, and the first
// counterexample if any.
struct CheckResult {
  std::string name;
  bool ok = true;
  std::uint64_t cases = 0;
  bool exhaustive = true;
  std::string reason;
  std::vector<std::pair<std::string, Val>> witness;

  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  void fail(std::string why, std::vector<std::pair<std::string, Val>> w) {
    if (!ok) return;
    ok = false;
    reason = std::move(why);
    witness = std::move(w);
  }

  void fail(const Verdict& v) { fail(v.reason, v.witness); }
};

// References returned by add() stay valid as more checks are added.
struct Report {
  std::deque<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return true;
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  CheckResult& add(std::string name) {
    checks.push_back(CheckResult{std::move(name)});
    return checks.back();
  }
};

}  // namespace ccpi
