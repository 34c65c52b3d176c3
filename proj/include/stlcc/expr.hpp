#pragma once

// Symbolic scalar expressions over a fixed list of coordinate variables.
//
// Expressions are immutable trees shared by pointer. Every constructor goes
// through a small set of canonicalizing rules (flattening of nested sums and
// products, folding of rational constants, merging of stacked integer
// powers) so that printing and re-parsing is the identity on trees. Full
// normalization (expansion, collection of like monomials, sorting) is the
// job of simplify().

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stlcc/rational.hpp"

namespace stlcc {

enum class ExprKind : std::uint8_t { constant, variable, function, power, product, sum };

enum class Function : std::uint8_t { sin, cos, exp, log };

/// Raised when an expression is evaluated outside the domain of one of its
/// partial operations (division by zero, log of a non-positive number).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error or unknown identifier; position is a 0-based byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class Expr {
 public:
  /// The constant zero.
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  explicit Expr(Rational value);

  static Expr variable(int index);

  ExprKind kind() const;
  bool is_constant() const { return kind() == ExprKind::constant; }
  bool is_zero() const;
  bool is_one() const;

  // Accessors; each is valid only for the matching kind.
  const Rational& value() const;
  int variable_index() const;
  Function function() const;
  const Expr& argument() const;
  const Expr& base() const;
  int exponent() const;
  /// Children of a sum or product.
  std::span<const Expr> operands() const;

  /// Total order on trees, used for sorting during simplification.
  friend int compare(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }
  friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

  /// Number of nodes in the tree.
  std::size_t size() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Expr make_node(Node node);
  std::shared_ptr<const Node> node_;
};

// Canonicalizing constructors.
Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);
Expr make_power(const Expr& base, int exponent);
Expr make_function(Function f, const Expr& argument);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

/// Parses the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
/// where identifiers must be one of `coords`. Decimal literals become exact
/// rationals.
Expr parse_expr(std::string_view text, std::span<const std::string> coords);

/// Prints in the parse_expr grammar; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e, std::span<const std::string> coords);

/// Exact derivative with respect to coordinate `var`, simplified.
Expr diff(const Expr& e, int var);

/// Expands products and integer powers of sums, collects like monomials and
/// sorts. Idempotent. Trigonometric identities are not applied.
Expr simplify(const Expr& e);

/// Double-precision evaluation. Throws DomainError.
double evaluate(const Expr& e, std::span<const double> point);

/// Exact evaluation; nullopt when a transcendental function is present.
/// Throws DomainError.
std::optional<Rational> evaluate_exact(const Expr& e, std::span<const Rational> point);

/// True when the tree uses only rational operations (no sin/cos/exp/log).
bool is_rational_function(const Expr& e);

/// Largest variable index referenced, or -1.
int max_variable_index(const Expr& e);

/// Equality test used where structural comparison after simplify is not
/// conclusive: simplified trees that differ structurally are compared at
/// `samples` points drawn uniformly from [-1,1]^n, within `rel_tol`.
bool equivalent(const Expr& a, const Expr& b, int n, std::uint64_t seed = 0x5eed, int samples = 20,
                double rel_tol = 1e-10);

/// |a - b| <= rel_tol * max(1, |a|, |b|).
bool approx_equal(double a, double b, double rel_tol);

}  // namespace stlcc
