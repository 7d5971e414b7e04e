#pragma once

// Variable and row declarations shared by the instance model and the MILP engine.

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace emsp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { binary, integer, continuous };
enum class Sense { le, ge, eq };

struct VariableDecl {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0;
  double upper = kInf;

  static VariableDecl binary(std::string name) { return {std::move(name), VarKind::binary, 0, 1}; }
  static VariableDecl integer(std::string name, double lo, double hi) {
    return {std::move(name), VarKind::integer, lo, hi};
  }
  static VariableDecl continuous(std::string name, double lo, double hi) {
    return {std::move(name), VarKind::continuous, lo, hi};
  }
  bool is_integral() const { return kind != VarKind::continuous; }
};

/// One term of a sparse row: variable index and coefficient.
struct Term {
  int var;
  double coef;
  friend bool operator==(const Term&, const Term&) = default;
};

/// sum(terms) <sense> rhs
struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;

  /// Activity of the row at a dense assignment.
  template <typename Vec>
  double activity(const Vec& values) const {
    double s = 0;
    for (const auto& t : terms) s += t.coef * values[t.var];
    return s;
  }

  /// Satisfied within an absolute tolerance scaled by (1 + |rhs|).
  template <typename Vec>
  bool satisfied(const Vec& values, double tol) const {
    const double a = activity(values);
    const double slack = tol * (1 + std::abs(rhs));
    switch (sense) {
      case Sense::le: return a <= rhs + slack;
      case Sense::ge: return a >= rhs - slack;
      case Sense::eq: return std::abs(a - rhs) <= slack;
    }
    return false;
  }
};

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "?";
}

}  // namespace emsp
