#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stlcc/geometry.hpp"

namespace stlcc {

/// Numeric thresholds shared by the analyses. Defaults match the CLI.
struct Tolerances {
  double rank = 1e-9;      // relative singular-value cutoff
  double residual = 1e-8;  // relative least-squares residual for span membership
  double zero = 1e-9;      // relative cutoff for "coefficient is zero"
  int max_degree = 4;      // closure truncation degree
  int degree_cap = 5;      // enumeration refuses beyond this degree
};

/// A simple mechanical control system nabla_{c'} c' = sum_i u_i Y_i(c) in
/// coordinates, together with the base point of interest.
struct MechanicalSystem {
  std::vector<std::string> coords;
  std::optional<Metric> metric;
  Connection connection;
  std::vector<VectorField> inputs;
  Point q0;
  Tolerances tolerances;

  std::size_t dim() const { return coords.size(); }
  std::size_t input_count() const { return inputs.size(); }

  /// Same system with different input fields.
  MechanicalSystem with_inputs(std::vector<VectorField> new_inputs) const {
    MechanicalSystem s = *this;
    s.inputs = std::move(new_inputs);
    return s;
  }

  friend bool operator==(const MechanicalSystem& a, const MechanicalSystem& b) {
    return a.coords == b.coords && a.metric == b.metric && a.connection == b.connection &&
           a.inputs == b.inputs && a.q0 == b.q0;
  }
};

/// Input values at a point, kept exact when possible.
struct FieldValues {
  MatD values;                 // one row per field
  std::optional<MatQ> exact;   // present when every field evaluated exactly
};

FieldValues evaluate_fields(const std::vector<VectorField>& fields, const Point& p);

}  // namespace stlcc
