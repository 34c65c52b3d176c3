#include "stlcc/accessibility.hpp"

#include <algorithm>

namespace stlcc {

FieldValues evaluate_fields(const std::vector<VectorField>& fields, const Point& p) {
  FieldValues out;
  MatQ exact;
  bool all_exact = p.exact().has_value();
  for (const VectorField& f : fields) {
    out.values.push_back(evaluate(f, p));
    if (all_exact) {
      auto e = evaluate_exact(f, p);
      if (e) {
        exact.push_back(std::move(*e));
      } else {
        all_exact = false;
      }
    }
  }
  if (all_exact) out.exact = std::move(exact);
  return out;
}

bool SymProductTerm::bad() const {
  return std::all_of(gamma.begin(), gamma.end(), [](int g) { return g % 2 == 0; });
}

std::string label(const std::vector<SymProductTerm>& terms, std::size_t index,
                  const std::string& field_prefix) {
  const SymProductTerm& t = terms.at(index);
  if (t.is_leaf()) return field_prefix + std::to_string(t.input + 1);
  return "<" + label(terms, static_cast<std::size_t>(t.left), field_prefix) + ":" +
         label(terms, static_cast<std::size_t>(t.right), field_prefix) + ">";
}

namespace {

// Generates the symmetric-product trees one degree at a time.
class ProductEnumerator {
 public:
  ProductEnumerator(const std::vector<VectorField>& inputs, const Connection& conn)
      : conn_(conn), m_(inputs.size()) {
    by_degree_.emplace_back();  // degree 0 unused
    by_degree_.emplace_back();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      SymProductTerm t;
      t.input = static_cast<int>(i);
      t.gamma.assign(m_, 0);
      t.gamma[i] = 1;
      t.field = inputs[i];
      by_degree_[1].push_back(terms_.size());
      terms_.push_back(std::move(t));
    }
  }

  int degree() const { return static_cast<int>(by_degree_.size()) - 1; }
  const std::vector<SymProductTerm>& terms() const { return terms_; }
  const std::vector<std::size_t>& of_degree(int d) const { return by_degree_[d]; }

  void next_degree() {
    int d = degree() + 1;
    std::vector<std::size_t> fresh;
    for (int d1 = 1; d1 <= d / 2; ++d1) {
      int d2 = d - d1;
      for (std::size_t a : by_degree_[d1]) {
        for (std::size_t b : by_degree_[d2]) {
          if (d1 == d2 && b < a) continue;
          SymProductTerm t;
          t.left = static_cast<int>(a);
          t.right = static_cast<int>(b);
          t.degree = d;
          t.gamma.assign(m_, 0);
          for (std::size_t i = 0; i < m_; ++i) t.gamma[i] = terms_[a].gamma[i] + terms_[b].gamma[i];
          t.field = symmetric_product(conn_, terms_[a].field, terms_[b].field);
          fresh.push_back(terms_.size());
          terms_.push_back(std::move(t));
        }
      }
    }
    by_degree_.push_back(std::move(fresh));
  }

 private:
  const Connection& conn_;
  std::size_t m_;
  std::vector<SymProductTerm> terms_;
  std::vector<std::vector<std::size_t>> by_degree_;
};

void check_degree(int max_degree, int degree_cap) {
  if (max_degree < 1) throw std::invalid_argument("max_degree must be at least 1");
  if (max_degree > degree_cap) {
    throw DegreeCapError("max_degree " + std::to_string(max_degree) + " exceeds the configured cap " +
                         std::to_string(degree_cap) + " (the number of products grows combinatorially)");
  }
}

// Incremental rank of a growing set of vectors, exact while every value is.
class RankTracker {
 public:
  RankTracker(const Point& p, double rel_tol) : point_(p), rel_tol_(rel_tol), exact_(p.exact().has_value()) {}

  void add(const VectorField& f) {
    values_.push_back(evaluate(f, point_));
    if (exact_) {
      auto e = evaluate_exact(f, point_);
      if (e) {
        exact_values_.push_back(std::move(*e));
      } else {
        exact_ = false;
      }
    }
  }

  int rank() const { return exact_ ? exact_rank(exact_values_) : numeric_rank(values_, rel_tol_); }
  bool exact() const { return exact_; }

 private:
  const Point& point_;
  double rel_tol_;
  bool exact_;
  MatD values_;
  MatQ exact_values_;
};

void record_degree(ClosureRank& r, int d, int rank) {
  int previous = r.rank_by_degree.empty() ? 0 : r.rank_by_degree.back();
  r.rank_by_degree.push_back(rank);
  if (rank > previous || r.rank_by_degree.size() == 1) r.stabilized_degree = d;
  r.rank = rank;
  r.degree_reached = d;
  r.full = rank == r.dim;
}

}  // namespace

std::vector<SymProductTerm> enumerate_products(const std::vector<VectorField>& inputs,
                                               const Connection& conn, int max_degree, int degree_cap) {
  check_degree(max_degree, degree_cap);
  ProductEnumerator gen(inputs, conn);
  while (gen.degree() < max_degree) gen.next_degree();
  return gen.terms();
}

ClosureRank symmetric_closure_rank(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol) {
  check_degree(tol.max_degree, tol.degree_cap);
  ClosureRank r;
  r.dim = static_cast<int>(sys.dim());
  ProductEnumerator gen(sys.inputs, sys.connection);
  RankTracker tracker(q0, tol.rank);
  for (int d = 1; d <= tol.max_degree; ++d) {
    if (d > 1) gen.next_degree();
    for (std::size_t i : gen.of_degree(d)) tracker.add(gen.terms()[i].field);
    record_degree(r, d, tracker.rank());
    if (r.full) break;
  }
  r.exact = tracker.exact();
  r.term_count = gen.terms().size();
  return r;
}

ClosureRank lie_symmetric_closure_rank(const MechanicalSystem& sys, const Point& q0,
                                       const Tolerances& tol) {
  check_degree(tol.max_degree, tol.degree_cap);
  ClosureRank r;
  r.dim = static_cast<int>(sys.dim());
  ProductEnumerator gen(sys.inputs, sys.connection);
  RankTracker tracker(q0, tol.rank);
  struct Word {
    VectorField field;
    int degree;
  };
  std::vector<Word> words;
  std::vector<std::vector<std::size_t>> by_degree(1);
  for (int d = 1; d <= tol.max_degree; ++d) {
    if (d > 1) gen.next_degree();
    std::vector<std::size_t> fresh;
    for (std::size_t i : gen.of_degree(d)) {
      const VectorField& f = gen.terms()[i].field;
      tracker.add(f);
      if (!f.is_zero()) {
        fresh.push_back(words.size());
        words.push_back({f, d});
      }
    }
    for (int d1 = 1; d1 <= d / 2; ++d1) {
      int d2 = d - d1;
      for (std::size_t a : by_degree[d1]) {
        for (std::size_t b : by_degree[d2]) {
          if (d1 == d2 && b <= a) continue;
          VectorField br = lie_bracket(words[a].field, words[b].field);
          tracker.add(br);
          if (!br.is_zero()) {
            fresh.push_back(words.size());
            words.push_back({std::move(br), d});
          }
        }
      }
    }
    by_degree.push_back(std::move(fresh));
    record_degree(r, d, tracker.rank());
    if (r.full) break;
  }
  r.exact = tracker.exact();
  r.term_count = words.size();
  return r;
}

SufficientConditions sufficient_conditions_check(const MechanicalSystem& sys,
                                                 const std::vector<VectorField>& basis, const Point& q0,
                                                 int max_degree, const Tolerances& tol) {
  auto terms = enumerate_products(basis, sys.connection, max_degree, tol.degree_cap);
  std::vector<VectorField> fields;
  fields.reserve(terms.size());
  for (const auto& t : terms) fields.push_back(t.field);
  FieldValues values = evaluate_fields(fields, q0);

  SufficientConditions out;
  out.max_degree = max_degree;
  out.exact = values.exact.has_value();
  out.satisfied = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const SymProductTerm& p = terms[i];
    if (!p.bad()) continue;
    MatD span;
    MatQ span_exact;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (terms[j].bad() || terms[j].degree >= p.degree) continue;
      span.push_back(values.values[j]);
      if (values.exact) span_exact.push_back((*values.exact)[j]);
    }
    BadProductCheck check;
    check.label = label(terms, i);
    check.degree = p.degree;
    check.gamma = p.gamma;
    check.norm = norm(values.values[i]);
    check.residual = span_residual(span, values.values[i], tol.rank);
    if (values.exact) {
      check.in_span = in_span_exact(span_exact, (*values.exact)[i]);
      if (check.in_span) check.residual = 0.0;
    } else {
      check.in_span = check.residual <= tol.residual * std::max(1.0, check.norm);
    }
    out.satisfied = out.satisfied && check.in_span;
    out.bad_products.push_back(std::move(check));
  }
  return out;
}

SingleInputVerdict single_input_verdict(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol) {
  if (sys.input_count() != 1) {
    throw std::invalid_argument("single_input_verdict requires exactly one input, got " +
                                std::to_string(sys.input_count()));
  }
  SingleInputVerdict v;
  v.dim = sys.dim();
  v.stlcc = sys.dim() == 1;
  const VectorField& y = sys.inputs.front();
  VectorField yy = symmetric_product(sys.connection, y, y);
  FieldValues vals = evaluate_fields({y, yy}, q0);
  if (vals.exact) {
    v.product_in_span = in_span_exact({(*vals.exact)[0]}, (*vals.exact)[1]);
  } else {
    double res = span_residual({vals.values[0]}, vals.values[1], tol.rank);
    v.product_in_span = res <= tol.residual * std::max(1.0, norm(vals.values[1]));
  }
  return v;
}

}  // namespace stlcc
