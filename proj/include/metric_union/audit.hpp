#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "metric_union/error.hpp"

namespace metric_union {

/// One named inequality checked over a set of pairs.
///
/// For an upper bound, slack = bound - measured; for a lower bound,
/// slack = measured - bound. The check passes when slack >= -tolerance
/// (or slack > 0 when `strict`).
struct AuditEntry {
  enum class Relation { Upper, Lower };

  std::string name;
  Relation relation = Relation::Upper;
  double bound = 0.0;
  double measured = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool strict = false;
  bool passed = true;
  std::pair<std::size_t, std::size_t> witness{0, 0};
  std::size_t checked = 0;
};

using Audit = std::vector<AuditEntry>;

/// Tracks the extreme value of a ratio over pairs and turns it into an entry.
class AuditAccumulator {
 public:
  AuditAccumulator(std::string name, AuditEntry::Relation rel, double bound, double tolerance, bool strict = false)
      : entry_{std::move(name), rel, bound, rel == AuditEntry::Relation::Upper
                                                 ? -std::numeric_limits<double>::infinity()
                                                 : std::numeric_limits<double>::infinity(),
               0.0, tolerance, strict, true, {0, 0}, 0} {}

  void observe(double value, std::size_t i, std::size_t j) {
    ++entry_.checked;
    const bool worse = entry_.relation == AuditEntry::Relation::Upper ? value > entry_.measured
                                                                        : value < entry_.measured;
    if (worse) {
      entry_.measured = value;
      entry_.witness = {i, j};
    }
  }

  AuditEntry finish() const {
    AuditEntry e = entry_;
    if (e.checked == 0) {
      e.measured = e.bound;
      e.slack = 0.0;
      e.passed = true;
      return e;
    }
    e.slack = e.relation == AuditEntry::Relation::Upper ? e.bound - e.measured : e.measured - e.bound;
    e.passed = e.strict ? e.slack > 0.0 : e.slack >= -e.tolerance;
    if (std::isnan(e.measured)) e.passed = false;
    return e;
  }

 private:
  AuditEntry entry_;
};

inline bool all_passed(const Audit& audit) {
  for (const auto& e : audit)
    if (!e.passed) return false;
  return true;
}

inline const AuditEntry* first_failure(const Audit& audit) {
  for (const auto& e : audit)
    if (!e.passed) return &e;
  return nullptr;
}

/// Throws AuditViolation naming the first failed inequality.
inline void enforce(const Audit& audit) {
  if (const auto* f = first_failure(audit)) {
    throw AuditViolation("audit '" + f->name + "' failed: measured " + std::to_string(f->measured) + " vs bound " +
                             std::to_string(f->bound),
                         {f->witness.first, f->witness.second}, f->slack);
  }
}

}  // namespace metric_union
