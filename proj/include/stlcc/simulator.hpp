#pragma once

// Forced geodesic integration and the constant-input series expansion of the
// velocity from rest.

#include <iosfwd>
#include <string>
#include <vector>

#include "stlcc/mechanical_system.hpp"

namespace stlcc {

/// Piecewise-constant input: values[i] holds on [starts[i], starts[i+1]),
/// the last value holds from its start onward.
struct ControlSignal {
  std::vector<double> starts;
  std::vector<VecD> values;
  bool clamp = true;  // enforce |u_i| <= 1

  static ControlSignal constant(VecD u, bool clamp = true);

  /// Throws std::invalid_argument on malformed signals.
  void validate(std::size_t m) const;
  /// Input in force at time t (right-continuous), clamped if requested.
  VecD at(double t) const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<VecD> q;
  std::vector<VecD> v;  // empty rows for first-order (series) trajectories
  double step = 0.0;
  std::string method = "rk4";
  bool aborted = false;
  std::string abort_reason;
};

/// Classical fixed-step RK4 on q' = v, v'^a = -Gamma^a_bc v^b v^c + u_i Y_i^a.
/// Steps are shortened to land on control switching times. `v0` empty means
/// starting from rest. Integration stops early (aborted) if the state norm
/// exceeds 1e12.
Trajectory integrate(const MechanicalSystem& sys, const Point& q0, const ControlSignal& u, double T, double h,
                     const VecD& v0 = {});

struct SeriesCoefficients {
  int order = 0;
  VecD u;
  std::vector<VectorField> w;  // w[k-1] = W_k; V_k(q, t) = t^(2k-1) W_k(q)
};

constexpr int kMaxSeriesOrder = 6;

/// W_1 = Z = sum u_i Y_i, W_k = -1/(2(2k-1)) sum_{j<k} <W_j : W_{k-j}>.
/// Throws std::invalid_argument unless 1 <= K <= kMaxSeriesOrder.
SeriesCoefficients series_coefficients(const MechanicalSystem& sys, const VecD& u, int K);

/// sum_{k<=K} t^(2k-1) W_k(q).
VecD series_velocity(const SeriesCoefficients& coeffs, const VecD& q, double t);

struct SeriesComparison {
  std::vector<double> t;
  std::vector<double> error;  // |q_series(t) - q_ode(t)|
  double max_error = 0.0;
  double final_error = 0.0;     // at T
  double half_error = 0.0;      // final error of the same comparison run to T/2
  double order = 0.0;           // log2(final_error / half_error); 0 when not measurable
  bool order_measured = false;
  bool divergence_suspected = false;  // successive series terms grow at (q0, T)
  Trajectory series;
  Trajectory ode;
};

SeriesComparison compare_series_ode(const MechanicalSystem& sys, const Point& q0, const VecD& u, int K, double T,
                                    double h);

/// Rows "t q1..qn v1..vn" with 17 significant digits.
void write_trajectory(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& coords);

}  // namespace stlcc
