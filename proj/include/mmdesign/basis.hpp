#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdesign/linalg.hpp"

namespace mmdesign {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
        position(position) {}
  std::size_t position;
};

class RangeError : public std::runtime_error {
 public:
  explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// One multiplicative factor of a basis term. Pow is x_var^exponent;
/// TruncPow is (x_var + shift)_+^exponent with (s)_+ = max(0, s).
struct Factor {
  enum class Kind { Pow, TruncPow };
  Kind kind = Kind::Pow;
  int var = 1;  // 1-based design-variable index
  double shift = 0.0;
  int exponent = 1;

  bool operator==(const Factor&) const = default;
};

/// x^e for integer e >= 0 by binary exponentiation. Deterministic and exactly
/// sign-symmetric: int_pow(-x, e) == +-int_pow(x, e) bitwise.
double int_pow(double x, int e);

/// A basis entry: either the constant 1 or a product of factors.
/// Duplicate Pow factors on one variable merge by summing exponents and
/// factors are kept in a canonical order, so parse/render round-trips.
class BasisExpr {
 public:
  static BasisExpr constant(double value);
  static BasisExpr term(std::vector<Factor> factors);

  bool is_constant() const { return factors_.empty(); }
  double constant_value() const { return value_; }
  const std::vector<Factor>& factors() const { return factors_; }

  double eval(Eigen::Ref<const Vector> point) const;
  /// Highest variable index referenced, 0 for constants.
  int max_var() const;
  /// Sum of Pow exponents on `var`; TruncPow factors are not counted.
  int pow_exponent_on(int var) const;
  bool has_trunc_pow_on(int var) const;

  std::string to_string() const;
  bool operator==(const BasisExpr&) const = default;

 private:
  std::vector<Factor> factors_;  // empty <=> constant
  double value_ = 1.0;
};

/// Ordered basis entries f_j; defines the parameter order of one response block.
class BasisVector {
 public:
  BasisVector() = default;
  explicit BasisVector(std::vector<BasisExpr> exprs);

  int size() const { return static_cast<int>(exprs_.size()); }
  const std::vector<BasisExpr>& exprs() const { return exprs_; }
  const BasisExpr& operator[](int i) const { return exprs_[i]; }
  int max_var() const;
  std::string to_string() const;
  bool operator==(const BasisVector&) const = default;

 private:
  std::vector<BasisExpr> exprs_;
};

/// Parse a comma-separated list of terms over the grammar
///   term   := "1" | factor ("*" factor)*
///   factor := VAR ["^" INT] | "(" VAR (("+"|"-") NUM)? ")_+" "^" INT
///   VAR    := "x" INT
/// Whitespace-insensitive. Throws ParseError on malformed input and
/// RangeError when a variable index exceeds num_vars.
BasisVector parse_basis(const std::string& text, int num_vars);

Vector eval_basis(const BasisVector& v, Eigen::Ref<const Vector> point);

/// Per-entry signs s with expr(T_r x) = s * expr(x) for all rows x of
/// `points` (T_r negates coordinate `axis`, 1-based). Pure monomial terms are
/// resolved symbolically from the parity of the exponent on x_axis; terms
/// with a truncated-power factor on the axis fall back to exhaustive numeric
/// verification over the grid. nullopt when any entry has no constant sign.
std::optional<std::vector<int>> reflection_signature(const BasisVector& v, int axis,
                                                     const Matrix& points);

}  // namespace mmdesign
