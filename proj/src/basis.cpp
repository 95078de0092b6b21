#include "mmdesign/basis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace mmdesign {

double int_pow(double x, int e) {
  double result = 1.0;
  double base = x;
  for (unsigned n = static_cast<unsigned>(e); n != 0; n >>= 1) {
    if (n & 1u) result *= base;
    if (n > 1) base *= base;
  }
  return result;
}

BasisExpr BasisExpr::constant(double value) {
  BasisExpr e;
  e.value_ = value;
  return e;
}

BasisExpr BasisExpr::term(std::vector<Factor> factors) {
  if (factors.empty()) throw std::invalid_argument("BasisExpr::term: a term needs >= 1 factor");
  for (const auto& f : factors) {
    if (f.exponent < 1) throw std::invalid_argument("BasisExpr::term: exponents must be >= 1");
    if (f.var < 1) throw std::invalid_argument("BasisExpr::term: variable indices are 1-based");
  }
  // merge duplicate plain powers on the same variable
  std::vector<Factor> merged;
  for (const auto& f : factors) {
    if (f.kind == Factor::Kind::Pow) {
      auto it = std::find_if(merged.begin(), merged.end(), [&](const Factor& g) {
        return g.kind == Factor::Kind::Pow && g.var == f.var;
      });
      if (it != merged.end()) {
        it->exponent += f.exponent;
        continue;
      }
    }
    merged.push_back(f);
  }
  std::stable_sort(merged.begin(), merged.end(), [](const Factor& a, const Factor& b) {
    if (a.var != b.var) return a.var < b.var;
    if (a.kind != b.kind) return a.kind == Factor::Kind::Pow;
    return a.shift < b.shift;
  });
  BasisExpr e;
  e.factors_ = std::move(merged);
  return e;
}

double BasisExpr::eval(Eigen::Ref<const Vector> point) const {
  if (factors_.empty()) return value_;
  double prod = 1.0;
  for (const auto& f : factors_) {
    const double x = point(f.var - 1);
    if (f.kind == Factor::Kind::Pow) {
      prod *= int_pow(x, f.exponent);
    } else {
      const double u = x + f.shift;
      prod *= u > 0.0 ? int_pow(u, f.exponent) : 0.0;
    }
  }
  return prod;
}

int BasisExpr::max_var() const {
  int m = 0;
  for (const auto& f : factors_) m = std::max(m, f.var);
  return m;
}

int BasisExpr::pow_exponent_on(int var) const {
  int e = 0;
  for (const auto& f : factors_) {
    if (f.kind == Factor::Kind::Pow && f.var == var) e += f.exponent;
  }
  return e;
}

bool BasisExpr::has_trunc_pow_on(int var) const {
  for (const auto& f : factors_) {
    if (f.kind == Factor::Kind::TruncPow && f.var == var) return true;
  }
  return false;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string BasisExpr::to_string() const {
  if (factors_.empty()) return format_double(value_);
  std::string out;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k > 0) out += "*";
    const Factor& f = factors_[k];
    if (f.kind == Factor::Kind::Pow) {
      out += "x" + std::to_string(f.var);
      if (f.exponent != 1) out += "^" + std::to_string(f.exponent);
    } else {
      out += "(x" + std::to_string(f.var);
      if (f.shift != 0.0) {
        out += f.shift > 0.0 ? "+" + format_double(f.shift) : "-" + format_double(-f.shift);
      }
      out += ")_+^" + std::to_string(f.exponent);
    }
  }
  return out;
}

BasisVector::BasisVector(std::vector<BasisExpr> exprs) : exprs_(std::move(exprs)) {
  if (exprs_.empty()) throw std::invalid_argument("BasisVector: needs >= 1 entry");
}

int BasisVector::max_var() const {
  int m = 0;
  for (const auto& e : exprs_) m = std::max(m, e.max_var());
  return m;
}

std::string BasisVector::to_string() const {
  std::string out;
  for (int i = 0; i < size(); ++i) {
    if (i > 0) out += ", ";
    out += exprs_[i].to_string();
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int num_vars) : text_(text), num_vars_(num_vars) {}

  BasisVector parse() {
    std::vector<BasisExpr> exprs;
    exprs.push_back(parse_term());
    while (true) {
      skip_ws();
      if (at_end()) break;
      expect(',');
      exprs.push_back(parse_term());
    }
    return BasisVector(std::move(exprs));
  }

 private:
  bool at_end() { return pos_ >= text_.size(); }
  char peek() { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos_, msg); }

  BasisExpr parse_term() {
    skip_ws();
    if (peek() == '1') {
      // lone constant; not followed by another factor
      std::size_t save = pos_;
      ++pos_;
      skip_ws();
      if (peek() == '*' || (std::isdigit(static_cast<unsigned char>(peek())))) {
        pos_ = save;
        fail("expected a term ('1' or a product of factors)");
      }
      return BasisExpr::constant(1.0);
    }
    std::vector<Factor> factors;
    factors.push_back(parse_factor());
    while (true) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      factors.push_back(parse_factor());
    }
    return BasisExpr::term(std::move(factors));
  }

  Factor parse_factor() {
    skip_ws();
    if (peek() == '(') return parse_trunc_pow();
    Factor f;
    f.kind = Factor::Kind::Pow;
    f.var = parse_var();
    f.exponent = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      f.exponent = parse_int("exponent");
    }
    return f;
  }

  Factor parse_trunc_pow() {
    expect('(');
    Factor f;
    f.kind = Factor::Kind::TruncPow;
    f.var = parse_var();
    f.shift = 0.0;
    skip_ws();
    if (peek() == '+' || peek() == '-') {
      const double sign = peek() == '+' ? 1.0 : -1.0;
      ++pos_;
      f.shift = sign * parse_number();
    }
    expect(')');
    skip_ws();
    if (peek() != '_') fail("expected '_+' after ')'");
    ++pos_;
    if (peek() != '+') fail("expected '_+' after ')'");
    ++pos_;
    expect('^');
    f.exponent = parse_int("exponent");
    return f;
  }

  int parse_var() {
    skip_ws();
    if (peek() != 'x') fail("expected a variable 'x<k>'");
    ++pos_;
    const int idx = parse_int("variable index");
    if (idx < 1) fail("variable indices are 1-based");
    if (idx > num_vars_) {
      throw RangeError("variable x" + std::to_string(idx) + " exceeds the declared " +
                       std::to_string(num_vars_) + " design variables");
    }
    return idx;
  }

  int parse_int(const std::string& what) {
    skip_ws();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == text_.data() + pos_) fail("expected an integer " + what);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  double parse_number() {
    skip_ws();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == text_.data() + pos_) fail("expected a numeric literal");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  const std::string& text_;
  int num_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

BasisVector parse_basis(const std::string& text, int num_vars) {
  return Parser(text, num_vars).parse();
}

Vector eval_basis(const BasisVector& v, Eigen::Ref<const Vector> point) {
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out(i) = v[i].eval(point);
  return out;
}

std::optional<std::vector<int>> reflection_signature(const BasisVector& v, int axis,
                                                     const Matrix& points) {
  std::vector<int> signs(v.size(), 1);
  for (int i = 0; i < v.size(); ++i) {
    const BasisExpr& e = v[i];
    if (e.is_constant()) {
      signs[i] = 1;
      continue;
    }
    if (!e.has_trunc_pow_on(axis)) {
      signs[i] = e.pow_exponent_on(axis) % 2 == 0 ? 1 : -1;
      continue;
    }
    // truncated power on the reflection axis: verify numerically over the grid
    bool plus_ok = true, minus_ok = true;
    Vector reflected(points.cols());
    for (Eigen::Index r = 0; r < points.rows() && (plus_ok || minus_ok); ++r) {
      reflected = points.row(r).transpose();
      reflected(axis - 1) = -reflected(axis - 1);
      const double lhs = e.eval(reflected);
      const double rhs = e.eval(points.row(r).transpose());
      if (lhs != rhs) plus_ok = false;
      if (lhs != -rhs) minus_ok = false;
    }
    if (plus_ok) {
      signs[i] = 1;
    } else if (minus_ok) {
      signs[i] = -1;
    } else {
      return std::nullopt;
    }
  }
  return signs;
}

}  // namespace mmdesign
