#pragma once

// Decision procedure for configuration controllability of systems with one
// input fewer than the configuration dimension: either an input basis whose
// degree-two bad products lie in the input distribution, or a definite
// quadratic form certifying that no such basis exists.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stlcc/accessibility.hpp"
#include "stlcc/mechanical_system.hpp"

namespace stlcc {

/// Input values and degree-two symmetric products at the base point.
template <class T>
struct ProductTable {
  Mat<T> inputs;                              // m rows of length n
  std::vector<std::vector<Vec<T>>> products;  // products[k][l] = <Y_k:Y_l>(q0)

  std::size_t m() const { return inputs.size(); }
  std::size_t n() const { return inputs.empty() ? 0 : inputs.front().size(); }
};

using TableD = ProductTable<double>;
using TableQ = ProductTable<Rational>;

/// Table of the fields Y'_j = sum_k b_jk Y_k (products are bilinear over
/// constants).
template <class T>
ProductTable<T> transform(const Mat<T>& b, const ProductTable<T>& table);

struct SystemTable {
  TableD numeric;
  std::optional<TableQ> exact;  // present when every value evaluated exactly
};

SystemTable product_table(const MechanicalSystem& sys, const Point& q0);

/// Table in R^{m+1} with inputs e_1..e_m and <Y_k:Y_l> = a_kl e_{m+1}; its
/// coefficient matrix is a multiple of a (congruent to it when the base pair
/// needs a substitution).
TableQ table_from_form(const MatQ& a);

struct AllInsideDistribution {};

struct BasePair {
  int first = 0;  // 0-based input indices; first < second unless substituted or single
  int second = 1;
  /// Only diagonal products escaped D: the second input was replaced by
  /// Y_first + Y_second to obtain an off-diagonal witness.
  bool substituted = false;
  MatD frame;  // inputs at q0 followed by the base product
};

std::variant<BasePair, AllInsideDistribution> select_base_pair(const MechanicalSystem& sys, const Point& q0,
                                                               const Tolerances& tol = {});

struct CoefficientMatrix {
  std::vector<int> fields;  // input indices of the rows
  MatD a;
  std::optional<MatQ> exact;
  double residual = 0.0;  // worst recombination residual over all k, l
};

/// Coefficients of the base product in the frame expansion of every degree-two
/// product. Inputs are taken after the base pair's substitution, if any.
CoefficientMatrix coefficient_matrix(const MechanicalSystem& sys, const Point& q0, const BasePair& bp,
                                     const Tolerances& tol = {});

enum class FormClass { zero, indefinite, definite, semidefinite };
const char* to_string(FormClass c);

struct RadicandSequence {
  std::vector<int> pivots;                  // positions (into A's rows) s_1, s_2, ...
  std::vector<std::vector<int>> index_sets; // index set of each stage
  std::vector<MatD> stages;                 // stages[i] is a^(i+1) on index_sets[i]
  std::optional<std::vector<MatQ>> exact_stages;
  std::vector<int> pivot_signs;             // sign of the form along each pivot
  bool zero_diagonal_stage = false;         // stopped on a nonzero stage with zero diagonal
  int zero_block = 0;                       // size of a trailing all-zero stage
  FormClass form = FormClass::zero;
};

/// Exact recursion; the pivot is the smallest index with nonzero diagonal.
RadicandSequence radicand_recursion(const MatQ& a);
/// Floating version; entries of stage i count as zero below zero_tol * s_i,
/// with s_1 = max|a| and s_{i+1} = s_i^2.
RadicandSequence radicand_recursion(const MatD& a, double zero_tol);

enum class VerdictKind { basis_found, not_stlcc, inconclusive };
const char* to_string(VerdictKind k);

struct StageRecord {
  std::vector<int> fields;  // active inputs at this stage (transformed numbering)
  BasePair base;
  CoefficientMatrix coefficients;
  RadicandSequence radicands;
};

struct KernelReduction {
  int stage = 0;
  std::vector<int> fields;  // active inputs the kernel vector is expressed in
  VecD c;
  std::optional<VecQ> exact_c;
  double residual = 0.0;  // ||A C||_inf
};

struct Certificate {
  int stage = 0;
  std::vector<int> fields;
  MatD matrix;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
};

/// Checks of a candidate basis against the table it was built from.
struct TableCheck {
  double determinant = 0.0;  // rows normalized to unit length
  double max_diagonal = 0.0; // max |(B A B^T)_jj|
  bool passed = false;
};

struct VerificationReport {
  bool passed = false;
  bool determinant_ok = false;
  bool diagonal_ok = false;
  bool sufficient_ok = false;
  double determinant = 0.0;
  double max_diagonal = 0.0;
  SufficientConditions conditions;
  std::vector<std::string> failures;
};

/// Coefficients of <Y2:Y2>(q0) in the frame {Y1, Y2, <Y1:Y2>, <Y1:Y1>}
/// (two inputs, four dimensions).
struct OpenCaseCoefficients {
  VecD a;  // a1..a4
  std::optional<VecQ> exact;
  double discriminant = 0.0;  // a3^2 + 4 a4
};

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::string reason;
  bool exact = false;  // sign decisions made in rational arithmetic
  MatD basis;          // rows: new inputs in terms of the given ones
  std::string construction;
  std::vector<StageRecord> stages;
  std::vector<KernelReduction> reductions;
  std::optional<Certificate> certificate;
  std::optional<TableCheck> table_check;
  std::optional<VerificationReport> verification;
  std::optional<OpenCaseCoefficients> open_case;
  std::optional<ClosureRank> closure;
  /// Controllable configurations also give small-time local controllability
  /// from rest; set together with basis_found.
  bool zero_velocity_corollary = false;
};

/// Decision on a precomputed table (requires m = n - 1, independent inputs).
Verdict decide_table(const TableQ& table, const Tolerances& tol = {});
Verdict decide_table(const TableD& table, const Tolerances& tol = {});

/// Full procedure: scope and accessibility checks, the decision, and symbolic
/// verification of a returned basis.
Verdict decide_stlcc(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol = {});

/// Sufficient conditions are rerun up to `degree`; two suffices whenever some
/// degree-two product of the inputs leaves D.
VerificationReport verify_basis(const MechanicalSystem& sys, const Point& q0, const MatD& b,
                                const Tolerances& tol = {}, int degree = 2);

/// nullopt unless m = 2, n = 4 and the frame spans.
std::optional<OpenCaseCoefficients> open_case_coefficients(const MechanicalSystem& sys, const Point& q0,
                                                           const Tolerances& tol = {});

}  // namespace stlcc
