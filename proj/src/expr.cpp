#include "stlcc/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stlcc {

// ---------------------------------------------------------------------------
// Rational helpers

std::optional<Rational> parse_rational(std::string_view text) {
  std::size_t slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (!num || !den || den->is_zero()) return std::nullopt;
    return *num / *den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  int scale = 0;
  bool any_digit = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    mantissa = mantissa * 10 + (text[i] - '0');
    any_digit = true;
    ++i;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mantissa = mantissa * 10 + (text[i] - '0');
      --scale;
      any_digit = true;
      ++i;
    }
  }
  if (!any_digit) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    int e = 0;
    bool exp_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i] - '0');
      if (e > 4000) return std::nullopt;
      exp_digit = true;
      ++i;
    }
    if (!exp_digit) return std::nullopt;
    scale += exp_negative ? -e : e;
  }
  if (i != text.size()) return std::nullopt;
  Rational r(mantissa);
  r *= pow(Rational(10), scale);
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

std::string to_decimal_string(const Rational& r) {
  BigInt den = denominator(r);
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return to_string(r);
  int digits = std::max(twos, fives);
  if (digits == 0) return to_string(r);
  BigInt scaled = numerator(r) * boost::multiprecision::pow(BigInt(10), digits) / denominator(r);
  bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
  return Rational(x);
}

Rational pow(const Rational& r, int k) {
  if (k < 0) {
    if (r.is_zero()) throw std::domain_error("division by zero");
    return pow(Rational(1) / r, -k);
  }
  Rational result = 1;
  Rational base = r;
  unsigned e = static_cast<unsigned>(k);
  while (e != 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e != 0) base *= base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Nodes

struct Expr::Node {
  ExprKind kind = ExprKind::constant;
  Rational value;           // constant
  int index = 0;            // variable index, or exponent of a power
  Function function = Function::sin;
  std::vector<Expr> children;  // argument / base / operands
  std::size_t size = 1;
};

Expr make_node(Expr::Node node) {
  node.size = 1;
  for (const Expr& c : node.children) node.size += c.size();
  return Expr(std::make_shared<const Expr::Node>(std::move(node)));
}

namespace {

const Expr& zero_expr() {
  static const Expr z{Rational(0)};
  return z;
}

}  // namespace

Expr::Expr() : Expr(Rational(0)) {}

Expr::Expr(int value) : Expr(Rational(value)) {}

Expr::Expr(Rational value) {
  Node n;
  n.kind = ExprKind::constant;
  n.value = std::move(value);
  node_ = std::make_shared<const Node>(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("negative variable index");
  Node n;
  n.kind = ExprKind::variable;
  n.index = index;
  return make_node(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == ExprKind::constant && node_->value.is_zero(); }
bool Expr::is_one() const { return node_->kind == ExprKind::constant && node_->value == 1; }
const Rational& Expr::value() const { return node_->value; }
int Expr::variable_index() const { return node_->index; }
Function Expr::function() const { return node_->function; }
const Expr& Expr::argument() const { return node_->children.front(); }
const Expr& Expr::base() const { return node_->children.front(); }
int Expr::exponent() const { return node_->index; }
std::span<const Expr> Expr::operands() const { return node_->children; }
std::size_t Expr::size() const { return node_->size; }

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  const Expr::Node& x = *a.node_;
  const Expr::Node& y = *b.node_;
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case ExprKind::constant:
      return x.value < y.value ? -1 : (y.value < x.value ? 1 : 0);
    case ExprKind::variable:
      return x.index < y.index ? -1 : (x.index > y.index ? 1 : 0);
    case ExprKind::function:
      if (x.function != y.function) return x.function < y.function ? -1 : 1;
      return compare(x.children[0], y.children[0]);
    case ExprKind::power:
      if (int c = compare(x.children[0], y.children[0]); c != 0) return c;
      return x.index < y.index ? -1 : (x.index > y.index ? 1 : 0);
    case ExprKind::product:
    case ExprKind::sum: {
      std::size_t n = std::min(x.children.size(), y.children.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(x.children[i], y.children[i]); c != 0) return c;
      }
      if (x.children.size() == y.children.size()) return 0;
      return x.children.size() < y.children.size() ? -1 : 1;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Canonicalizing constructors

Expr make_sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  std::optional<std::size_t> const_pos;
  Rational constant = 0;
  for (Expr& t : terms) {
    auto push = [&](const Expr& e) {
      if (e.is_constant()) {
        if (!const_pos) {
          const_pos = flat.size();
          flat.push_back(e);
        }
        constant += e.value();
      } else {
        flat.push_back(e);
      }
    };
    if (t.kind() == ExprKind::sum) {
      for (const Expr& s : t.operands()) push(s);
    } else {
      push(t);
    }
  }
  if (const_pos) {
    if (constant.is_zero()) {
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(*const_pos));
    } else {
      flat[*const_pos] = Expr(constant);
    }
  }
  if (flat.empty()) return zero_expr();
  if (flat.size() == 1) return flat.front();
  Expr::Node n;
  n.kind = ExprKind::sum;
  n.children = std::move(flat);
  return make_node(std::move(n));
}

Expr make_product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size() + 1);
  Rational constant = 1;
  for (Expr& f : factors) {
    auto push = [&](const Expr& e) {
      if (e.is_constant()) {
        constant *= e.value();
      } else {
        flat.push_back(e);
      }
    };
    if (f.kind() == ExprKind::product) {
      for (const Expr& s : f.operands()) push(s);
    } else {
      push(f);
    }
  }
  if (constant.is_zero()) return zero_expr();
  if (constant != 1) flat.insert(flat.begin(), Expr(constant));
  if (flat.empty()) return Expr(1);
  if (flat.size() == 1) return flat.front();
  Expr::Node n;
  n.kind = ExprKind::product;
  n.children = std::move(flat);
  return make_node(std::move(n));
}

Expr make_power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.value().is_zero() && exponent < 0) throw DomainError("division by zero");
    return Expr(pow(base.value(), exponent));
  }
  if (base.kind() == ExprKind::power) {
    long long e = static_cast<long long>(base.exponent()) * exponent;
    if (e > std::numeric_limits<int>::max() || e < std::numeric_limits<int>::min()) {
      throw std::overflow_error("exponent overflow");
    }
    return make_power(base.base(), static_cast<int>(e));
  }
  Expr::Node n;
  n.kind = ExprKind::power;
  n.index = exponent;
  n.children = {base};
  return make_node(std::move(n));
}

Expr make_function(Function f, const Expr& argument) {
  if (argument.is_zero() && f != Function::log) return Expr(f == Function::sin ? 0 : 1);
  if (f == Function::log && argument.is_one()) return Expr(0);
  Expr::Node n;
  n.kind = ExprKind::function;
  n.function = f;
  n.children = {argument};
  return make_node(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return make_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return make_product({a, make_power(b, -1)}); }
Expr operator-(const Expr& a) { return make_product({Expr(-1), a}); }

Expr sin(const Expr& a) { return make_function(Function::sin, a); }
Expr cos(const Expr& a) { return make_function(Function::cos, a); }
Expr exp(const Expr& a) { return make_function(Function::exp, a); }
Expr log(const Expr& a) { return make_function(Function::log, a); }

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr raw_diff(const Expr& e, int var) {
  switch (e.kind()) {
    case ExprKind::constant:
      return Expr(0);
    case ExprKind::variable:
      return Expr(e.variable_index() == var ? 1 : 0);
    case ExprKind::sum: {
      std::vector<Expr> terms;
      for (const Expr& t : e.operands()) terms.push_back(raw_diff(t, var));
      return make_sum(std::move(terms));
    }
    case ExprKind::product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expr d = raw_diff(ops[i], var);
        if (d.is_zero()) continue;
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < ops.size(); ++j) factors.push_back(j == i ? d : ops[j]);
        terms.push_back(make_product(std::move(factors)));
      }
      return make_sum(std::move(terms));
    }
    case ExprKind::power: {
      Expr d = raw_diff(e.base(), var);
      if (d.is_zero()) return Expr(0);
      return make_product({Expr(e.exponent()), make_power(e.base(), e.exponent() - 1), d});
    }
    case ExprKind::function: {
      const Expr& a = e.argument();
      Expr d = raw_diff(a, var);
      if (d.is_zero()) return Expr(0);
      switch (e.function()) {
        case Function::sin:
          return make_product({cos(a), d});
        case Function::cos:
          return make_product({Expr(-1), sin(a), d});
        case Function::exp:
          return make_product({e, d});
        case Function::log:
          return make_product({d, make_power(a, -1)});
      }
    }
  }
  return Expr(0);
}

}  // namespace

Expr diff(const Expr& e, int var) {
  if (var < 0) throw std::invalid_argument("invalid differentiation variable");
  return simplify(raw_diff(e, var));
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const Expr& e, std::span<const double> point) {
  switch (e.kind()) {
    case ExprKind::constant:
      return to_double(e.value());
    case ExprKind::variable: {
      auto i = static_cast<std::size_t>(e.variable_index());
      if (i >= point.size()) throw std::out_of_range("evaluation point too short");
      return point[i];
    }
    case ExprKind::sum: {
      double s = 0.0;
      for (const Expr& t : e.operands()) s += evaluate(t, point);
      return s;
    }
    case ExprKind::product: {
      double p = 1.0;
      for (const Expr& t : e.operands()) p *= evaluate(t, point);
      return p;
    }
    case ExprKind::power: {
      double b = evaluate(e.base(), point);
      if (b == 0.0 && e.exponent() < 0) throw DomainError("division by zero");
      int k = e.exponent();
      double base = k < 0 ? 1.0 / b : b;
      unsigned u = static_cast<unsigned>(k < 0 ? -k : k);
      double r = 1.0;
      while (u != 0) {
        if (u & 1U) r *= base;
        u >>= 1U;
        base *= base;
      }
      return r;
    }
    case ExprKind::function: {
      double a = evaluate(e.argument(), point);
      switch (e.function()) {
        case Function::sin:
          return std::sin(a);
        case Function::cos:
          return std::cos(a);
        case Function::exp:
          return std::exp(a);
        case Function::log:
          if (!(a > 0.0)) throw DomainError("log of a non-positive number");
          return std::log(a);
      }
    }
  }
  return 0.0;
}

std::optional<Rational> evaluate_exact(const Expr& e, std::span<const Rational> point) {
  switch (e.kind()) {
    case ExprKind::constant:
      return e.value();
    case ExprKind::variable: {
      auto i = static_cast<std::size_t>(e.variable_index());
      if (i >= point.size()) throw std::out_of_range("evaluation point too short");
      return point[i];
    }
    case ExprKind::sum: {
      Rational s = 0;
      for (const Expr& t : e.operands()) {
        auto v = evaluate_exact(t, point);
        if (!v) return std::nullopt;
        s += *v;
      }
      return s;
    }
    case ExprKind::product: {
      Rational p = 1;
      for (const Expr& t : e.operands()) {
        auto v = evaluate_exact(t, point);
        if (!v) return std::nullopt;
        p *= *v;
      }
      return p;
    }
    case ExprKind::power: {
      auto b = evaluate_exact(e.base(), point);
      if (!b) return std::nullopt;
      if (b->is_zero() && e.exponent() < 0) throw DomainError("division by zero");
      return pow(*b, e.exponent());
    }
    case ExprKind::function:
      return std::nullopt;
  }
  return std::nullopt;
}

bool is_rational_function(const Expr& e) {
  if (e.kind() == ExprKind::function) return false;
  for (const Expr& c : e.operands()) {
    if (!is_rational_function(c)) return false;
  }
  if (e.kind() == ExprKind::power) return is_rational_function(e.base());
  return true;
}

int max_variable_index(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::constant:
      return -1;
    case ExprKind::variable:
      return e.variable_index();
    case ExprKind::function:
      return max_variable_index(e.argument());
    case ExprKind::power:
      return max_variable_index(e.base());
    case ExprKind::product:
    case ExprKind::sum: {
      int m = -1;
      for (const Expr& c : e.operands()) m = std::max(m, max_variable_index(c));
      return m;
    }
  }
  return -1;
}

bool approx_equal(double a, double b, double rel_tol) {
  double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= rel_tol * scale;
}

bool equivalent(const Expr& a, const Expr& b, int n, std::uint64_t seed, int samples,
                double rel_tol) {
  Expr sa = simplify(a);
  Expr sb = simplify(b);
  if (sa == sb) return true;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(std::max(n, 0)));
  int accepted = 0;
  for (int attempt = 0; accepted < samples && attempt < samples * 20; ++attempt) {
    for (double& x : p) x = dist(rng);
    double va = 0.0;
    double vb = 0.0;
    try {
      va = evaluate(sa, p);
      vb = evaluate(sb, p);
    } catch (const DomainError&) {
      continue;
    }
    if (!approx_equal(va, vb, rel_tol)) return false;
    ++accepted;
  }
  return accepted == samples;
}

}  // namespace stlcc
