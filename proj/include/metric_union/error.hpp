#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace metric_union {

/// Base class of every error raised by the library.
///
/// `kind()` is the stable machine-readable name reported by the CLI; the
/// witness carries the offending indices (pair, triple, ...) and `value()`
/// an associated number such as a slack or an eigenvalue.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message,
        std::vector<std::size_t> witness = {},
        double value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(message),
        kind_(std::move(kind)),
        witness_(std::move(witness)),
        value_(value) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }
  double value() const noexcept { return value_; }
  bool has_value() const noexcept { return !std::isnan(value_); }

 private:
  std::string kind_;
  std::vector<std::size_t> witness_;
  double value_;
};

/// Malformed input: wrong shapes, non-finite entries, bad index sets.
class InputError : public Error {
 public:
  using Error::Error;
};

/// One violated metric axiom.
struct MetricViolation {
  enum class Kind { Asymmetry, NegativeDistance, ZeroOffDiagonal, NonzeroDiagonal, Triangle };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  /// Intermediate point for triangle violations: d(i,j) > d(i,k) + d(k,j).
  std::size_t k = 0;
  double slack = 0.0;
};

inline const char* to_string(MetricViolation::Kind kind) {
  switch (kind) {
    case MetricViolation::Kind::Asymmetry: return "AsymmetryError";
    case MetricViolation::Kind::NegativeDistance: return "NegativeDistanceError";
    case MetricViolation::Kind::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case MetricViolation::Kind::NonzeroDiagonal: return "NonzeroDiagonal";
    case MetricViolation::Kind::Triangle: return "TriangleViolation";
  }
  return "Unknown";
}

/// Raised by validate_metric; lists every violated constraint (triangle
/// violations are capped, see `truncated()`).
class MetricError : public Error {
 public:
  MetricError(std::vector<MetricViolation> violations, std::size_t truncated)
      : Error(violations.empty() ? "MetricError" : to_string(violations.front().kind),
              describe(violations, truncated), witness_of(violations),
              violations.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : violations.front().slack),
        violations_(std::move(violations)),
        truncated_(truncated) {}

  const std::vector<MetricViolation>& violations() const noexcept { return violations_; }
  std::size_t truncated() const noexcept { return truncated_; }

 private:
  static std::vector<std::size_t> witness_of(const std::vector<MetricViolation>& v) {
    if (v.empty()) return {};
    const auto& f = v.front();
    if (f.kind == MetricViolation::Kind::Triangle) return {f.i, f.j, f.k};
    return {f.i, f.j};
  }
  static std::string describe(const std::vector<MetricViolation>& v, std::size_t truncated) {
    std::string s = std::to_string(v.size() + truncated) + " metric violation(s)";
    if (!v.empty()) {
      const auto& f = v.front();
      s += "; first: ";
      s += to_string(f.kind);
      s += "(" + std::to_string(f.i) + "," + std::to_string(f.j);
      if (f.kind == MetricViolation::Kind::Triangle) s += "," + std::to_string(f.k);
      s += ") slack " + std::to_string(f.slack);
    }
    return s;
  }

  std::vector<MetricViolation> violations_;
  std::size_t truncated_;
};

#define METRIC_UNION_DEFINE_ERROR(Name)                                              \
  class Name : public Error {                                                        \
   public:                                                                           \
    explicit Name(const std::string& message, std::vector<std::size_t> witness = {}, \
                  double value = std::numeric_limits<double>::quiet_NaN())           \
        : Error(#Name, message, std::move(witness), value) {}                        \
  };

METRIC_UNION_DEFINE_ERROR(CoverageError)
METRIC_UNION_DEFINE_ERROR(EmptySideError)
METRIC_UNION_DEFINE_ERROR(CollapsedPairError)
METRIC_UNION_DEFINE_ERROR(NotSymmetricError)
METRIC_UNION_DEFINE_ERROR(ConvergenceError)
METRIC_UNION_DEFINE_ERROR(NotEuclidean)
METRIC_UNION_DEFINE_ERROR(LengthMismatchError)
METRIC_UNION_DEFINE_ERROR(CertificateViolation)
METRIC_UNION_DEFINE_ERROR(SolverStall)
METRIC_UNION_DEFINE_ERROR(InconsistentDuplicate)
METRIC_UNION_DEFINE_ERROR(InputDistortionError)
METRIC_UNION_DEFINE_ERROR(AuditViolation)
METRIC_UNION_DEFINE_ERROR(DuplicateEdge)
METRIC_UNION_DEFINE_ERROR(SelfLoop)
METRIC_UNION_DEFINE_ERROR(SingularPencil)
METRIC_UNION_DEFINE_ERROR(RetryBudgetExceeded)
METRIC_UNION_DEFINE_ERROR(RangeViolation)
METRIC_UNION_DEFINE_ERROR(DegenerateInput)

#undef METRIC_UNION_DEFINE_ERROR

}  // namespace metric_union
