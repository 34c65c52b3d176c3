#include "stlcc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace stlcc {

ControlSignal ControlSignal::constant(VecD u, bool clamp) {
  ControlSignal s;
  s.starts = {0.0};
  s.values = {std::move(u)};
  s.clamp = clamp;
  return s;
}

void ControlSignal::validate(std::size_t m) const {
  if (starts.empty() || starts.size() != values.size()) {
    throw std::invalid_argument("control signal needs one value per switching time");
  }
  if (starts.front() != 0.0) throw std::invalid_argument("control signal must start at t = 0");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!std::isfinite(starts[i])) throw std::invalid_argument("control switching times must be finite");
    if (i > 0 && !(starts[i] > starts[i - 1])) {
      throw std::invalid_argument("control switching times must be strictly increasing");
    }
    if (values[i].size() != m) {
      throw std::invalid_argument("control value has " + std::to_string(values[i].size()) + " entries, expected " +
                                  std::to_string(m));
    }
    for (double x : values[i]) {
      if (!std::isfinite(x)) throw std::invalid_argument("control values must be finite");
    }
  }
}

VecD ControlSignal::at(double t) const {
  auto it = std::upper_bound(starts.begin(), starts.end(), t);
  std::size_t i = it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin()) - 1;
  VecD u = values[i];
  if (clamp) {
    for (double& x : u) x = std::clamp(x, -1.0, 1.0);
  }
  return u;
}

namespace {

struct GammaTerm {
  std::size_t a, b, c;
  Expr value;
};

// Right-hand side of the forced geodesic equations with the zero Christoffel
// symbols skipped.
class Dynamics {
 public:
  explicit Dynamics(const MechanicalSystem& sys) : sys_(sys), n_(sys.dim()) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = 0; b < n_; ++b) {
        for (std::size_t c = 0; c < n_; ++c) {
          const Expr& g = sys.connection(a, b, c);
          if (!(g == Expr(0))) terms_.push_back({a, b, c, g});
        }
      }
    }
  }

  // state = (q, v)
  VecD operator()(const VecD& state, const VecD& u) const {
    std::span<const double> q(state.data(), n_);
    VecD d(2 * n_, 0.0);
    for (std::size_t a = 0; a < n_; ++a) d[a] = state[n_ + a];
    for (const auto& t : terms_) d[n_ + t.a] -= evaluate(t.value, q) * state[n_ + t.b] * state[n_ + t.c];
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] == 0.0) continue;
      const VectorField& y = sys_.inputs[i];
      for (std::size_t a = 0; a < n_; ++a) d[n_ + a] += u[i] * evaluate(y[a], q);
    }
    return d;
  }

 private:
  const MechanicalSystem& sys_;
  std::size_t n_;
  std::vector<GammaTerm> terms_;
};

using Rhs = std::function<VecD(double, const VecD&)>;

VecD axpy(const VecD& x, double a, const VecD& y) {
  VecD r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
  return r;
}

VecD rk4_step(const Rhs& f, double t, const VecD& x, double h) {
  VecD k1 = f(t, x);
  VecD k2 = f(t + h / 2, axpy(x, h / 2, k1));
  VecD k3 = f(t + h / 2, axpy(x, h / 2, k2));
  VecD k4 = f(t + h, axpy(x, h, k3));
  VecD r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

bool blown_up(const VecD& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return true;
  }
  return norm(x) > 1e12;
}

void check_horizon(double T, double h) {
  if (!(h > 0) || !std::isfinite(h)) throw std::invalid_argument("step h must be positive");
  if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive");
}

// Fixed-step march; `breaks` are extra times the grid must hit.
template <class Record>
bool march(const Rhs& f, VecD x, double T, double h, const std::vector<double>& breaks, Record record,
           std::string& reason) {
  double t = 0.0;
  record(t, x);
  long k = 0;
  const double eps = 1e-12 * std::max(1.0, T);
  while (t < T - eps) {
    double next = std::min(T, static_cast<double>(k + 1) * h);
    for (double b : breaks) {
      if (b > t + eps && b < next - eps) {
        next = b;
        break;
      }
    }
    if (next >= static_cast<double>(k + 1) * h - eps) ++k;
    x = rk4_step(f, t, x, next - t);
    t = next;
    record(t, x);
    if (blown_up(x)) {
      reason = "state norm exceeded 1e12 at t = " + std::to_string(t);
      return false;
    }
  }
  return true;
}

}  // namespace

Trajectory integrate(const MechanicalSystem& sys, const Point& q0, const ControlSignal& u, double T, double h,
                     const VecD& v0) {
  check_horizon(T, h);
  u.validate(sys.input_count());
  std::size_t n = sys.dim();
  if (q0.dim() != n) throw std::invalid_argument("initial point has the wrong dimension");
  if (!v0.empty() && v0.size() != n) throw std::invalid_argument("initial velocity has the wrong dimension");
  Dynamics dyn(sys);
  // The input is sampled at the start of each (sub)step, which lies inside
  // one constant piece because steps end on switching times.
  double piece_start = 0.0;
  VecD piece = u.at(0.0);
  Rhs f = [&](double, const VecD& x) { return dyn(x, piece); };
  VecD x(2 * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    x[a] = q0.coords()[a];
    if (!v0.empty()) x[n + a] = v0[a];
  }
  Trajectory traj;
  traj.step = h;
  auto record = [&](double t, const VecD& s) {
    traj.t.push_back(t);
    traj.q.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
    traj.v.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(n), s.end());
    if (t != piece_start) {
      piece_start = t;
      piece = u.at(t);
    }
  };
  std::vector<double> breaks(u.starts.begin() + 1, u.starts.end());
  traj.aborted = !march(f, x, T, h, breaks, record, traj.abort_reason);
  return traj;
}

SeriesCoefficients series_coefficients(const MechanicalSystem& sys, const VecD& u, int K) {
  if (K < 1 || K > kMaxSeriesOrder) {
    throw std::invalid_argument("series order must be between 1 and " + std::to_string(kMaxSeriesOrder));
  }
  if (u.size() != sys.input_count()) throw std::invalid_argument("input vector has the wrong length");
  SeriesCoefficients s;
  s.order = K;
  s.u = u;
  VecQ coeffs;
  for (double x : u) coeffs.push_back(rational_from_double(x));
  s.w.push_back(linear_combination(coeffs, sys.inputs));
  for (int k = 2; k <= K; ++k) {
    VectorField acc = VectorField::zero(sys.dim());
    // <W_j : W_{k-j}> is symmetric in j, so pair the terms.
    for (int j = 1; j <= k / 2; ++j) {
      VectorField p = symmetric_product(sys.connection, s.w[j - 1], s.w[k - j - 1]);
      acc = acc + (2 * j == k ? p : Expr(2) * p);
    }
    s.w.push_back(simplify(Expr(Rational(-1, 2 * (2 * k - 1))) * acc));
  }
  return s;
}

VecD series_velocity(const SeriesCoefficients& coeffs, const VecD& q, double t) {
  std::size_t n = q.size();
  VecD v(n, 0.0);
  double tp = t;
  for (const VectorField& w : coeffs.w) {
    for (std::size_t a = 0; a < n; ++a) v[a] += tp * evaluate(w[a], q);
    tp *= t * t;
  }
  return v;
}

namespace {

struct Pair {
  Trajectory series;
  Trajectory ode;
};

Pair run_pair(const MechanicalSystem& sys, const Point& q0, const SeriesCoefficients& c, const VecD& u, double T,
              double h) {
  Pair p;
  p.ode = integrate(sys, q0, ControlSignal::constant(u, false), T, h);
  Rhs f = [&](double t, const VecD& q) { return series_velocity(c, q, t); };
  p.series.step = h;
  p.series.method = "rk4 (series velocity field)";
  auto record = [&](double t, const VecD& q) {
    p.series.t.push_back(t);
    p.series.q.push_back(q);
    p.series.v.push_back(series_velocity(c, q, t));
  };
  p.series.aborted = !march(f, q0.coords(), T, h, {}, record, p.series.abort_reason);
  return p;
}

double final_gap(const Pair& p) {
  if (p.series.q.empty() || p.ode.q.empty()) return 0.0;
  VecD d = p.series.q.back();
  const VecD& o = p.ode.q.back();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= o[i];
  return norm(d);
}

}  // namespace

SeriesComparison compare_series_ode(const MechanicalSystem& sys, const Point& q0, const VecD& u, int K, double T,
                                    double h) {
  check_horizon(T, h);
  SeriesCoefficients c = series_coefficients(sys, u, K);
  SeriesComparison out;
  Pair full = run_pair(sys, q0, c, u, T, h);
  std::size_t count = std::min(full.series.t.size(), full.ode.t.size());
  for (std::size_t i = 0; i < count; ++i) {
    VecD d = full.series.q[i];
    for (std::size_t a = 0; a < d.size(); ++a) d[a] -= full.ode.q[i][a];
    out.t.push_back(full.series.t[i]);
    out.error.push_back(norm(d));
    out.max_error = std::max(out.max_error, out.error.back());
  }
  out.final_error = final_gap(full);
  Pair half = run_pair(sys, q0, c, u, T / 2, h / 2);
  out.half_error = final_gap(half);
  // Below ~1e-13 the gap is integrator noise, not series truncation.
  if (out.half_error > 1e-13 && out.final_error > 1e-13) {
    out.order = std::log2(out.final_error / out.half_error);
    out.order_measured = true;
  }
  double prev = -1.0;
  double tp = T;
  for (const VectorField& w : c.w) {
    double size = tp * norm(evaluate(w, q0));
    if (prev >= 0 && size > prev && prev > 0) out.divergence_suspected = true;
    prev = size;
    tp *= T * T;
  }
  out.series = std::move(full.series);
  out.ode = std::move(full.ode);
  return out;
}

void write_trajectory(std::ostream& out, const Trajectory& traj, const std::vector<std::string>& coords) {
  out << "# t";
  for (const auto& c : coords) out << ' ' << c;
  for (const auto& c : coords) out << " d" << c;
  out << '\n';
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
  };
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    put(traj.t[i]);
    for (double x : traj.q[i]) {
      out << ' ';
      put(x);
    }
    if (i < traj.v.size()) {
      for (double x : traj.v[i]) {
        out << ' ';
        put(x);
      }
    }
    out << '\n';
  }
}

}  // namespace stlcc
