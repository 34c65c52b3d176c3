#include <algorithm>
#include <map>

#include "stlcc/expr.hpp"

namespace stlcc {

namespace {

// Normal form: a sum of rational multiples of monomials, where a monomial is
// a sorted list of (atom, nonzero exponent). Atoms are variables, function
// applications with simplified arguments, and sums raised to negative powers.
using Monomial = std::vector<std::pair<Expr, int>>;

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (int c = compare(a[i].first, b[i].first); c != 0) return c < 0;
      if (a[i].second != b[i].second) return a[i].second < b[i].second;
    }
    return a.size() < b.size();
  }
};

using Poly = std::map<Monomial, Rational, MonomialLess>;

// Positive powers of sums are always expanded; this bounds the blowup.
constexpr int kMaxExpansionExponent = 64;

Poly constant_poly(const Rational& c) {
  Poly p;
  if (!c.is_zero()) p.emplace(Monomial{}, c);
  return p;
}

Poly atom_poly(const Expr& atom, int exponent) {
  Poly p;
  p.emplace(Monomial{{atom, exponent}}, Rational(1));
  return p;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && compare(a[i].first, b[j].first) < 0)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || compare(b[j].first, a[i].first) < 0) {
      out.push_back(b[j++]);
    } else {
      int e = a[i].second + b[j].second;
      if (e != 0) out.emplace_back(a[i].first, e);
      ++i;
      ++j;
    }
  }
  return out;
}

void add_into(Poly& acc, const Monomial& m, const Rational& c) {
  auto [it, inserted] = acc.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) acc.erase(it);
  }
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) add_into(out, multiply(ma, mb), ca * cb);
  }
  return out;
}

Poly power(const Poly& p, int k) {
  Poly result = constant_poly(1);
  Poly base = p;
  while (k != 0) {
    if (k & 1) result = multiply(result, base);
    k >>= 1;
    if (k != 0) base = multiply(base, base);
  }
  return result;
}

Expr from_poly(const Poly& p) {
  std::vector<Expr> terms;
  terms.reserve(p.size());
  for (const auto& [mono, coeff] : p) {
    std::vector<Expr> factors;
    factors.reserve(mono.size() + 1);
    factors.emplace_back(coeff);
    for (const auto& [atom, e] : mono) factors.push_back(make_power(atom, e));
    terms.push_back(make_product(std::move(factors)));
  }
  return make_sum(std::move(terms));
}

Poly to_poly(const Expr& e);

// base^k where base is already in normal form and base_expr == from_poly(base).
Poly raise(const Poly& base, const Expr& base_expr, int k) {
  if (k == 0) return constant_poly(1);
  if (base.empty()) {
    if (k < 0) throw DomainError("division by zero");
    return {};
  }
  if (base.size() == 1) {
    const auto& [mono, coeff] = *base.begin();
    Monomial m;
    std::vector<std::pair<Expr, int>> expand;
    for (const auto& [atom, e] : mono) {
      long long ek = static_cast<long long>(e) * k;
      if (ek > 1'000'000 || ek < -1'000'000) throw std::overflow_error("exponent overflow");
      if (atom.kind() == ExprKind::sum && ek > 0) {
        expand.emplace_back(atom, static_cast<int>(ek));
      } else {
        m.emplace_back(atom, static_cast<int>(ek));
      }
    }
    Poly p;
    p.emplace(std::move(m), pow(coeff, k));
    for (const auto& [atom, ek] : expand) p = multiply(p, raise(to_poly(atom), atom, ek));
    return p;
  }
  if (k > kMaxExpansionExponent) throw std::overflow_error("power of a sum too large to expand");
  if (k > 0) return power(base, k);
  return atom_poly(base_expr, k);
}

Poly product_poly(std::span<const Expr> factors) {
  // Collect exponents per simplified base first so that a sum and its
  // reciprocal cancel before expansion.
  struct Base {
    Expr expr;
    Poly poly;
    int exponent;
  };
  std::vector<Base> bases;
  Rational constant = 1;
  for (const Expr& f : factors) {
    const Expr& b = f.kind() == ExprKind::power ? f.base() : f;
    int k = f.kind() == ExprKind::power ? f.exponent() : 1;
    Poly pb = to_poly(b);
    Expr sb = from_poly(pb);
    if (sb.is_constant()) {
      if (sb.is_zero() && k < 0) throw DomainError("division by zero");
      constant *= pow(sb.value(), k);
      continue;
    }
    auto it = std::find_if(bases.begin(), bases.end(), [&](const Base& x) { return x.expr == sb; });
    if (it == bases.end()) {
      bases.push_back({std::move(sb), std::move(pb), k});
    } else {
      it->exponent += k;
    }
  }
  Poly acc = constant_poly(constant);
  for (const Base& b : bases) {
    if (b.exponent == 0) continue;
    acc = multiply(acc, raise(b.poly, b.expr, b.exponent));
    if (acc.empty()) break;
  }
  return acc;
}

Poly to_poly(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::constant:
      return constant_poly(e.value());
    case ExprKind::variable:
      return atom_poly(e, 1);
    case ExprKind::function: {
      Expr arg = from_poly(to_poly(e.argument()));
      Expr f = make_function(e.function(), arg);
      if (f.is_constant()) return constant_poly(f.value());
      return atom_poly(f, 1);
    }
    case ExprKind::sum: {
      Poly acc;
      for (const Expr& t : e.operands()) {
        for (const auto& [m, c] : to_poly(t)) add_into(acc, m, c);
      }
      return acc;
    }
    case ExprKind::product:
      return product_poly(e.operands());
    case ExprKind::power: {
      Poly pb = to_poly(e.base());
      return raise(pb, from_poly(pb), e.exponent());
    }
  }
  return {};
}

}  // namespace

Expr simplify(const Expr& e) { return from_poly(to_poly(e)); }

}  // namespace stlcc
