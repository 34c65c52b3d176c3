#include <cctype>

#include "stlcc/expr.hpp"

namespace stlcc {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords) : text_(text), coords_(coords) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at position " + std::to_string(pos_), pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return make_sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{factor()};
    for (;;) {
      if (accept('*')) {
        factors.push_back(factor());
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr f = factor();
        if (f.is_zero()) {
          pos_ = at;
          fail("division by the constant zero");
        }
        factors.push_back(make_power(f, -1));
      } else {
        break;
      }
    }
    return make_product(std::move(factors));
  }

  Expr factor() {
    Expr b = base();
    if (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      if (pos_ - start > 6) fail("exponent too large");
      int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (b.is_zero() && k == 0) fail("0^0 is undefined");
      return make_power(b, k);
    }
    return b;
  }

  Expr base() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    // Optional exponent part: e[+-]digits, only if digits follow.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (digits == pos_) pos_ = save;
    }
    auto r = parse_rational(text_.substr(start, pos_ - start));
    if (!r) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(*r);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string_view name = text_.substr(start, pos_ - start);
    static constexpr std::pair<std::string_view, Function> kFunctions[] = {
        {"sin", Function::sin}, {"cos", Function::cos}, {"exp", Function::exp}, {"log", Function::log}};
    for (const auto& [fname, f] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(fname));
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_function(f, arg);
      }
    }
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == name) return Expr::variable(static_cast<int>(i));
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;
};

// Printing mirrors the parser's construction rules so that parsing the
// output rebuilds the identical tree.
class Printer {
 public:
  explicit Printer(std::span<const std::string> coords) : coords_(coords) {}

  std::string expr(const Expr& e) const {
    if (e.kind() == ExprKind::sum) return sum(e);
    return standalone(e);
  }

 private:
  static bool negative_product(const Expr& e) {
    return e.kind() == ExprKind::product && e.operands().front().is_constant() &&
           e.operands().front().value() < 0;
  }

  static std::string constant(const Rational& r) {
    if (r >= 0 && denominator(r) == 1) return to_string(r);
    return "(" + to_string(r) + ")";
  }

  std::string variable(int i) const {
    auto idx = static_cast<std::size_t>(i);
    if (idx < coords_.size()) return coords_[idx];
    return "_x" + std::to_string(i);
  }

  // A term or expression that is not a sum and is not preceded by a binary
  // operator.
  std::string standalone(const Expr& e) const {
    if (negative_product(e)) {
      const Rational& c = e.operands().front().value();
      std::vector<Expr> rest(e.operands().begin() + 1, e.operands().end());
      if (c == -1) return "-" + factors(rest, true);
      return "-" + constant(-c) + "*" + factors(rest, false);
    }
    if (e.kind() == ExprKind::power && e.exponent() < 0) return reciprocal(e);
    if (e.kind() == ExprKind::product) {
      return factors(std::vector<Expr>(e.operands().begin(), e.operands().end()), false);
    }
    return factor(e);
  }

  std::string sum(const Expr& e) const {
    std::string out;
    bool first = true;
    for (const Expr& t : e.operands()) {
      if (first) {
        out += standalone(t);
        first = false;
        continue;
      }
      if (t.is_constant() && t.value() < 0) {
        out += " - " + constant(-t.value());
      } else if (negative_product(t)) {
        const Rational& c = t.operands().front().value();
        std::vector<Expr> rest(t.operands().begin() + 1, t.operands().end());
        if (c == -1) {
          out += " - " + factors(rest, false);
        } else {
          out += " - " + constant(-c) + "*" + factors(rest, false);
        }
      } else {
        out += " + " + standalone(t);
      }
    }
    return out;
  }

  std::string reciprocal(const Expr& p) const {
    int k = -p.exponent();
    std::string b = power_base(p.base());
    return k == 1 ? "1/" + b : "1/" + b + "^" + std::to_string(k);
  }

  // `guard_first`: the list follows a unary minus, so a leading power must be
  // parenthesized (the grammar binds '-' tighter than '^').
  std::string factors(const std::vector<Expr>& fs, bool guard_first) const {
    std::string out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (i > 0) out += "*";
      const Expr& f = fs[i];
      std::string s;
      if (f.kind() == ExprKind::power && f.exponent() < 0) {
        s = "(" + reciprocal(f) + ")";
      } else if (f.kind() == ExprKind::sum || f.kind() == ExprKind::product) {
        s = "(" + expr(f) + ")";
      } else {
        s = factor(f);
        if (i == 0 && guard_first && f.kind() == ExprKind::power) s = "(" + s + ")";
      }
      out += s;
    }
    return out;
  }

  std::string power_base(const Expr& b) const {
    if (b.kind() == ExprKind::variable || b.kind() == ExprKind::function) return factor(b);
    return "(" + expr(b) + ")";
  }

  std::string factor(const Expr& e) const {
    switch (e.kind()) {
      case ExprKind::constant:
        return constant(e.value());
      case ExprKind::variable:
        return variable(e.variable_index());
      case ExprKind::function: {
        static constexpr const char* kNames[] = {"sin", "cos", "exp", "log"};
        return std::string(kNames[static_cast<int>(e.function())]) + "(" + expr(e.argument()) + ")";
      }
      case ExprKind::power:
        if (e.exponent() < 0) return "(" + reciprocal(e) + ")";
        return power_base(e.base()) + "^" + std::to_string(e.exponent());
      case ExprKind::product:
      case ExprKind::sum:
        return "(" + expr(e) + ")";
    }
    return "";
  }

  std::span<const std::string> coords_;
};

}  // namespace

Expr parse_expr(std::string_view text, std::span<const std::string> coords) {
  return Parser(text, coords).parse();
}

std::string to_string(const Expr& e, std::span<const std::string> coords) {
  return Printer(coords).expr(e);
}

}  // namespace stlcc
