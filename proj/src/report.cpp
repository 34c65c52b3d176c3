#include "stlcc/report.hpp"

namespace stlcc {

Json to_json(const MatD& m) {
  Json j = Json::array();
  for (const auto& row : m) j.push_back(row);
  return j;
}

Json to_json(const VecQ& v) {
  Json j = Json::array();
  for (const auto& x : v) j.push_back(to_string(x));
  return j;
}

Json to_json(const MatQ& m) {
  Json j = Json::array();
  for (const auto& row : m) j.push_back(to_json(row));
  return j;
}

namespace {

Json fields_json(const std::vector<VectorField>& fields, const std::vector<std::string>& coords) {
  Json j = Json::array();
  for (const auto& f : fields) {
    Json comps = Json::array();
    for (const auto& c : f.components) comps.push_back(to_string(c, coords));
    j.push_back(comps);
  }
  return j;
}

}  // namespace

Json system_json(const MechanicalSystem& sys) {
  Json j;
  j["dim"] = sys.dim();
  j["coords"] = sys.coords;
  if (sys.metric) {
    Json g = Json::array();
    for (const auto& row : sys.metric->entries()) {
      Json r = Json::array();
      for (const auto& e : row) r.push_back(to_string(e, sys.coords));
      g.push_back(r);
    }
    j["metric"] = g;
  }
  j["connection"] = sys.connection.metric_derived ? "levi-civita" : "explicit";
  j["inputs"] = fields_json(sys.inputs, sys.coords);
  j["q0"] = sys.q0.exact() ? to_json(*sys.q0.exact()) : Json(sys.q0.coords());
  return j;
}

Json tolerances_json(const Tolerances& tol) {
  Json j;
  j["rank_tol"] = tol.rank;
  j["residual_tol"] = tol.residual;
  j["zero_tol"] = tol.zero;
  j["max_degree"] = tol.max_degree;
  j["degree_cap"] = tol.degree_cap;
  return j;
}

Json christoffel_json(const MechanicalSystem& sys) {
  Json j = Json::array();
  std::size_t n = sys.dim();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const Expr& g = sys.connection(a, b, c);
        if (g == Expr(0)) continue;
        Json e;
        e["index"] = {a + 1, b + 1, c + 1};
        e["value"] = to_string(g, sys.coords);
        j.push_back(e);
      }
    }
  }
  return j;
}

Json products_json(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol) {
  auto terms = enumerate_products(sys.inputs, sys.connection, tol.max_degree, tol.degree_cap);
  std::vector<VectorField> fields;
  for (const auto& t : terms) fields.push_back(t.field);
  FieldValues vals = evaluate_fields(fields, q0);
  Json j = Json::array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Json e;
    e["term"] = label(terms, i);
    e["degree"] = terms[i].degree;
    e["gamma"] = terms[i].gamma;
    e["parity"] = terms[i].bad() ? "bad" : "good";
    e["field"] = fields_json({terms[i].field}, sys.coords).front();
    if (vals.exact) {
      e["value"] = to_json((*vals.exact)[i]);
    } else {
      e["value"] = vals.values[i];
    }
    j.push_back(e);
  }
  return j;
}

Json closure_json(const ClosureRank& r, const Tolerances& tol) {
  Json j;
  j["rank"] = r.rank;
  j["dim"] = r.dim;
  j["full"] = r.full;
  j["degree_reached"] = r.degree_reached;
  j["stabilized_degree"] = r.stabilized_degree;
  j["rank_by_degree"] = r.rank_by_degree;
  j["term_count"] = r.term_count;
  j["arithmetic"] = r.exact ? "exact" : "floating";
  j["rank_tol"] = tol.rank;
  return j;
}

Json sufficient_json(const SufficientConditions& s, const Tolerances& tol) {
  Json j;
  j["satisfied"] = s.satisfied;
  j["max_degree"] = s.max_degree;
  j["arithmetic"] = s.exact ? "exact" : "floating";
  j["residual_tol"] = tol.residual;
  Json bad = Json::array();
  for (const auto& b : s.bad_products) {
    Json e;
    e["term"] = b.label;
    e["degree"] = b.degree;
    e["gamma"] = b.gamma;
    e["norm"] = b.norm;
    e["residual"] = b.residual;
    e["in_span"] = b.in_span;
    bad.push_back(e);
  }
  j["bad_products"] = bad;
  return j;
}

Json single_input_json(const SingleInputVerdict& v) {
  Json j;
  j["criterion"] = "single input: controllable from rest iff the configuration space is one-dimensional";
  j["dim"] = v.dim;
  j["stlcc"] = v.stlcc;
  j["product_in_input_span"] = v.product_in_span;
  return j;
}

namespace {

Json radicands_json(const RadicandSequence& r) {
  Json j;
  j["pivots"] = r.pivots;
  j["pivot_signs"] = r.pivot_signs;
  j["index_sets"] = r.index_sets;
  Json stages = Json::array();
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    stages.push_back(r.exact_stages ? to_json((*r.exact_stages)[i]) : to_json(r.stages[i]));
  }
  j["stages"] = stages;
  j["zero_diagonal_stage"] = r.zero_diagonal_stage;
  j["zero_block"] = r.zero_block;
  j["form"] = to_string(r.form);
  return j;
}

}  // namespace

Json verdict_json(const Verdict& v, const Tolerances& tol) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["criterion"] = "m = n - 1: controllable iff some input basis has every degree-two bad product in the input span";
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["arithmetic"] = v.exact ? "exact" : "floating";
  j["zero_tol"] = tol.zero;
  if (v.closure) j["symmetric_closure"] = closure_json(*v.closure, tol);
  Json stages = Json::array();
  for (const auto& s : v.stages) {
    Json e;
    e["fields"] = s.fields;
    e["base_pair"] = {s.base.first, s.base.second};
    e["substituted"] = s.base.substituted;
    e["frame"] = to_json(s.base.frame);
    e["coefficients"] = s.coefficients.exact ? to_json(*s.coefficients.exact) : to_json(s.coefficients.a);
    e["recombination_residual"] = s.coefficients.residual;
    e["radicands"] = radicands_json(s.radicands);
    stages.push_back(e);
  }
  j["stages"] = stages;
  Json reductions = Json::array();
  for (const auto& r : v.reductions) {
    Json e;
    e["stage"] = r.stage;
    e["fields"] = r.fields;
    e["c"] = r.exact_c ? to_json(*r.exact_c) : Json(r.c);
    e["residual_inf"] = r.residual;
    e["residual_bound"] = 1e-8;
    reductions.push_back(e);
  }
  j["kernel_reductions"] = reductions;
  if (v.kind == VerdictKind::basis_found) {
    j["construction"] = v.construction;
    j["basis"] = to_json(v.basis);
  }
  if (v.certificate) {
    Json c;
    c["stage"] = v.certificate->stage;
    c["fields"] = v.certificate->fields;
    c["matrix"] = to_json(v.certificate->matrix);
    c["min_eigenvalue"] = v.certificate->min_eigenvalue;
    c["max_eigenvalue"] = v.certificate->max_eigenvalue;
    c["definiteness_bound"] = 1e-9;
    j["certificate"] = c;
  }
  if (v.table_check) {
    Json c;
    c["determinant"] = v.table_check->determinant;
    c["max_diagonal"] = v.table_check->max_diagonal;
    c["diagonal_bound"] = 1e-8;
    c["passed"] = v.table_check->passed;
    j["table_check"] = c;
  }
  if (v.verification) {
    const auto& r = *v.verification;
    Json c;
    c["passed"] = r.passed;
    c["determinant"] = r.determinant;
    c["determinant_ok"] = r.determinant_ok;
    c["max_diagonal"] = r.max_diagonal;
    c["diagonal_ok"] = r.diagonal_ok;
    c["sufficient_conditions"] = sufficient_json(r.conditions, tol);
    c["failures"] = r.failures;
    j["verification"] = c;
  }
  if (v.open_case) {
    Json c;
    c["frame"] = "Y1, Y2, <Y1:Y2>, <Y1:Y1>";
    c["expanded"] = "<Y2:Y2>";
    c["a"] = v.open_case->exact ? to_json(*v.open_case->exact) : Json(v.open_case->a);
    c["a_numeric"] = v.open_case->a;
    c["a3^2+4a4"] = v.open_case->discriminant;
    j["open_case"] = c;
  }
  j["zero_velocity_controllable"] = v.zero_velocity_corollary;
  return j;
}

Json trajectory_json(const Trajectory& traj) {
  Json j;
  j["method"] = traj.method;
  j["step"] = traj.step;
  j["points"] = traj.t.size();
  if (!traj.t.empty()) {
    j["final_time"] = traj.t.back();
    j["final_q"] = traj.q.back();
    if (!traj.v.empty()) j["final_v"] = traj.v.back();
  }
  j["aborted"] = traj.aborted;
  if (traj.aborted) j["abort_reason"] = traj.abort_reason;
  return j;
}

Json comparison_json(const SeriesComparison& c) {
  Json j;
  j["max_error"] = c.max_error;
  j["final_error"] = c.final_error;
  j["half_horizon_error"] = c.half_error;
  if (c.order_measured) {
    j["empirical_order"] = c.order;
  } else {
    j["empirical_order"] = nullptr;
  }
  j["divergence_suspected"] = c.divergence_suspected;
  Json grid = Json::array();
  std::size_t stride = std::max<std::size_t>(1, c.t.size() / 20);
  for (std::size_t i = 0; i < c.t.size(); i += stride) grid.push_back({c.t[i], c.error[i]});
  if (!c.t.empty() && (c.t.size() - 1) % stride != 0) grid.push_back({c.t.back(), c.error.back()});
  j["error_samples"] = grid;
  j["series"] = trajectory_json(c.series);
  j["ode"] = trajectory_json(c.ode);
  return j;
}

}  // namespace stlcc
