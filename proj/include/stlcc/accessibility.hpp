#pragma once

// Symmetric-product closures and the pointwise controllability tests built on
// them: accessibility ranks, good/bad product bookkeeping, the bad-product
// sufficient conditions and the single-input characterization.

#include <optional>
#include <string>
#include <vector>

#include "stlcc/mechanical_system.hpp"

namespace stlcc {

class DegreeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One bracketing tree of symmetric products of the inputs. Leaves are input
/// indices; internal nodes refer to earlier terms of the same enumeration.
struct SymProductTerm {
  int input = -1;  // leaf: 0-based input index
  int left = -1;   // internal node: indices into the enumeration
  int right = -1;
  int degree = 1;
  std::vector<int> gamma;  // occurrences per input
  VectorField field;

  bool is_leaf() const { return input >= 0; }
  /// Bad when every input occurs an even number of times.
  bool bad() const;
};

/// Pretty label such as "<Y1:<Y1:Y2>>" (1-based input names).
std::string label(const std::vector<SymProductTerm>& terms, std::size_t index,
                  const std::string& field_prefix = "Y");

/// All distinct bracketing trees (up to commutativity of the product at each
/// node) of degree <= max_degree, ordered by degree. Degree-1 terms are the
/// inputs. Throws DegreeCapError beyond `degree_cap`.
std::vector<SymProductTerm> enumerate_products(const std::vector<VectorField>& inputs,
                                               const Connection& conn, int max_degree,
                                               int degree_cap = 5);

struct ClosureRank {
  int rank = 0;
  int dim = 0;
  bool full = false;              // rank == dim
  int degree_reached = 0;         // highest degree actually enumerated
  int stabilized_degree = 0;      // degree at which the rank last increased
  std::vector<int> rank_by_degree;  // rank_by_degree[d-1] = rank using terms of degree <= d
  bool exact = false;             // ranks computed in rational arithmetic
  std::size_t term_count = 0;
};

/// Rank at q0 of the symmetric closure of the inputs, truncated at
/// tol.max_degree (enumeration stops early once the rank is full).
ClosureRank symmetric_closure_rank(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol);

/// Rank at q0 of the Lie closure of the symmetric closure: symmetric products
/// and Lie brackets with total word length <= tol.max_degree.
ClosureRank lie_symmetric_closure_rank(const MechanicalSystem& sys, const Point& q0,
                                       const Tolerances& tol);

struct BadProductCheck {
  std::string label;
  int degree = 0;
  std::vector<int> gamma;
  double norm = 0.0;      // |P(q0)|
  double residual = 0.0;  // distance of P(q0) to the span of lower-degree good products
  bool in_span = false;
};

struct SufficientConditions {
  bool satisfied = false;
  int max_degree = 0;
  bool exact = false;
  std::vector<BadProductCheck> bad_products;
};

/// Checks at q0 that every bad product of degree <= max_degree lies in the
/// span of the good products of strictly lower degree, for the given input
/// basis.
SufficientConditions sufficient_conditions_check(const MechanicalSystem& sys,
                                                 const std::vector<VectorField>& basis, const Point& q0,
                                                 int max_degree, const Tolerances& tol);

struct SingleInputVerdict {
  bool stlcc = false;
  bool product_in_span = false;  // <Y:Y>(q0) in span{Y(q0)}
  std::size_t dim = 0;
};

/// Single-input systems are STLCC at q0 exactly when the configuration space
/// is one-dimensional. Throws std::invalid_argument when m != 1.
SingleInputVerdict single_input_verdict(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol);

}  // namespace stlcc
