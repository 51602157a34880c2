#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace dnp {

/// One checked inequality lhs <= rhs (asserted) or a recorded value (reported).
/// slack is the distance to the allowed bound; negative exactly when an asserted entry fails.
struct LedgerEntry {
  std::string name;
  long step = -1;  // -1 for global entries
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = true;
  bool asserted = true;
};

/// lhs <= rhs * (1 + rel_tol) + abs_tol.
inline LedgerEntry bound_entry(std::string name, long step, double lhs, double rhs, double rel_tol, double abs_tol = 0.0) {
  LedgerEntry e;
  e.name = std::move(name);
  e.step = step;
  e.lhs = lhs;
  e.rhs = rhs;
  e.slack = rhs + rel_tol * std::abs(rhs) + abs_tol - lhs;
  e.pass = e.slack >= 0.0;
  return e;
}

inline LedgerEntry reported_entry(std::string name, long step, double value, double reference = 0.0) {
  LedgerEntry e;
  e.name = std::move(name);
  e.step = step;
  e.lhs = value;
  e.rhs = reference;
  e.slack = reference - value;
  e.asserted = false;
  return e;
}

inline bool all_asserted_pass(const std::vector<LedgerEntry>& ledger) {
  for (const auto& e : ledger)
    if (e.asserted && !e.pass) return false;
  return true;
}

}  // namespace dnp
