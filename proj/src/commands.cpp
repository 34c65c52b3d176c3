#include "stlcc/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "stlcc/system_file.hpp"

namespace stlcc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text) {
  std::size_t b = text.find_first_not_of(" \t");
  std::size_t e = text.find_last_not_of(" \t");
  if (b == std::string::npos) throw std::invalid_argument("empty number");
  std::string t = text.substr(b, e - b + 1);
  char* end = nullptr;
  double x = std::strtod(t.c_str(), &end);
  if (*end != '\0' || !std::isfinite(x)) throw std::invalid_argument("not a number: '" + t + "'");
  return x;
}

Tolerances effective(const MechanicalSystem& sys, const CommonOptions& opt) {
  Tolerances t = sys.tolerances;
  if (opt.rank_tol) t.rank = *opt.rank_tol;
  if (opt.residual_tol) t.residual = *opt.residual_tol;
  if (opt.zero_tol) t.zero = *opt.zero_tol;
  if (opt.max_degree) t.max_degree = *opt.max_degree;
  if (!(t.rank > 0) || !(t.residual > 0) || !(t.zero > 0)) throw std::invalid_argument("tolerances must be positive");
  return t;
}

Json header(const std::string& command, const MechanicalSystem& sys, const Tolerances& tol) {
  Json j;
  j["command"] = command;
  j["system"] = system_json(sys);
  j["tolerances"] = tolerances_json(tol);
  return j;
}

template <class F>
CommandResult guarded(const std::string& command, F&& body) {
  auto failure = [&](int code, const std::string& kind, const std::string& what) {
    CommandResult r;
    r.report["command"] = command;
    r.report["error"] = {{"kind", kind}, {"message", what}};
    r.exit_code = code;
    return r;
  };
  try {
    return body();
  } catch (const SystemFileError& e) {
    return failure(exit_code::input_error, "system_file", e.what());
  } catch (const GeometryError& e) {
    return failure(exit_code::input_error, "geometry", e.what());
  } catch (const DegreeCapError& e) {
    return failure(exit_code::input_error, "degree_cap", e.what());
  } catch (const std::invalid_argument& e) {
    return failure(exit_code::input_error, "invalid_argument", e.what());
  } catch (const DomainError& e) {
    return failure(exit_code::numeric_failure, "domain", e.what());
  } catch (const std::exception& e) {
    return failure(exit_code::numeric_failure, "numeric", e.what());
  }
}

}  // namespace

VecD parse_vector(const std::string& text, std::size_t n) {
  VecD v;
  for (const auto& item : split(text, ',')) v.push_back(parse_number(item));
  if (v.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " comma-separated numbers, got '" + text + "'");
  }
  return v;
}

ControlSignal parse_control(const std::string& text, std::size_t m, bool clamp) {
  ControlSignal s;
  s.clamp = clamp;
  if (text.find(':') == std::string::npos) {
    s.starts = {0.0};
    s.values = {parse_vector(text, m)};
  } else {
    for (const auto& piece : split(text, ';')) {
      auto colon = piece.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("control piece '" + piece + "' needs 't:u1,u2,...'");
      s.starts.push_back(parse_number(piece.substr(0, colon)));
      s.values.push_back(parse_vector(piece.substr(colon + 1), m));
    }
  }
  s.validate(m);
  return s;
}

CommandResult cmd_analyze(const CommonOptions& opt) {
  return guarded("analyze", [&] {
    MechanicalSystem sys = load_system(opt.path);
    Tolerances tol = effective(sys, opt);
    CommandResult r;
    Json& j = r.report;
    j = header("analyze", sys, tol);
    j["christoffel"] = christoffel_json(sys);
    j["products"] = products_json(sys, sys.q0, tol);
    ClosureRank sym = symmetric_closure_rank(sys, sys.q0, tol);
    ClosureRank lie = lie_symmetric_closure_rank(sys, sys.q0, tol);
    Json acc;
    acc["symmetric_closure"] = closure_json(sym, tol);
    acc["lie_symmetric_closure"] = closure_json(lie, tol);
    acc["configuration_accessible"] = sym.full;
    acc["accessible_from_rest"] = lie.full;
    acc["criterion"] = "rank at q0 of the symmetric closure (configurations) and of its Lie closure (states from rest)";
    j["accessibility"] = acc;
    Json verdict;
    if (sys.input_count() == 1) {
      SingleInputVerdict s = single_input_verdict(sys, sys.q0, tol);
      j["single_input"] = single_input_json(s);
      verdict["kind"] = s.stlcc ? "STLCC" : "NotSTLCC";
      verdict["criterion"] = "single-input characterization";
    } else {
      SufficientConditions s = sufficient_conditions_check(sys, sys.inputs, sys.q0, tol.max_degree, tol);
      j["sufficient_conditions"] = sufficient_json(s, tol);
      verdict["criterion"] = "bad symmetric products in the span of lower-degree good ones, with accessibility";
      if (!sym.full) {
        verdict["kind"] = "Inconclusive";
        verdict["reason"] = "symmetric closure rank " + std::to_string(sym.rank) + " < " + std::to_string(sym.dim) +
                            " up to degree " + std::to_string(sym.degree_reached);
        r.exit_code = exit_code::inconclusive;
      } else if (s.satisfied) {
        verdict["kind"] = "STLCC";
        verdict["reason"] = "sufficient conditions hold for the given basis up to degree " +
                            std::to_string(tol.max_degree);
      } else {
        verdict["kind"] = "Inconclusive";
        verdict["reason"] = "sufficient conditions fail for the given basis; another basis may satisfy them";
        r.exit_code = exit_code::inconclusive;
      }
    }
    j["verdict"] = verdict;
    return r;
  });
}

CommandResult cmd_basis_search(const CommonOptions& opt) {
  return guarded("basis-search", [&] {
    MechanicalSystem sys = load_system(opt.path);
    Tolerances tol = effective(sys, opt);
    CommandResult r;
    r.report = header("basis-search", sys, tol);
    Verdict v = decide_stlcc(sys, sys.q0, tol);
    r.report["verdict"] = verdict_json(v, tol);
    if (v.kind == VerdictKind::inconclusive) {
      r.exit_code = v.reason.rfind("numeric failure", 0) == 0 ? exit_code::numeric_failure : exit_code::inconclusive;
    } else if (v.kind == VerdictKind::basis_found && (!v.verification || !v.verification->passed)) {
      r.exit_code = exit_code::numeric_failure;
    }
    return r;
  });
}

CommandResult cmd_simulate(const SimulateOptions& opt) {
  return guarded("simulate", [&] {
    MechanicalSystem sys = load_system(opt.common.path);
    Tolerances tol = effective(sys, opt.common);
    ControlSignal u = parse_control(opt.control, sys.input_count(), !opt.no_clamp);
    VecD v0 = opt.v0.empty() ? VecD{} : parse_vector(opt.v0, sys.dim());
    CommandResult r;
    r.report = header("simulate", sys, tol);
    Trajectory traj = integrate(sys, sys.q0, u, opt.T, opt.h, v0);
    r.report["control"] = {{"starts", u.starts}, {"values", u.values}, {"clamp", u.clamp}};
    r.report["trajectory"] = trajectory_json(traj);
    if (!opt.output.empty()) {
      std::ofstream out(opt.output);
      if (!out) throw std::invalid_argument("cannot write " + opt.output);
      write_trajectory(out, traj, sys.coords);
      r.report["trajectory"]["file"] = opt.output;
    }
    if (opt.K) {
      if (u.starts.size() != 1 || !v0.empty()) {
        throw std::invalid_argument("series comparison needs a constant input from rest");
      }
      r.report["series_comparison"] = comparison_json(compare_series_ode(sys, sys.q0, u.at(0.0), *opt.K, opt.T, opt.h));
    }
    if (traj.aborted) r.exit_code = exit_code::numeric_failure;
    return r;
  });
}

CommandResult cmd_series_compare(const SeriesOptions& opt) {
  return guarded("series-compare", [&] {
    MechanicalSystem sys = load_system(opt.common.path);
    Tolerances tol = effective(sys, opt.common);
    VecD u = parse_vector(opt.u, sys.input_count());
    CommandResult r;
    r.report = header("series-compare", sys, tol);
    r.report["u"] = u;
    r.report["K"] = opt.K;
    r.report["T"] = opt.T;
    SeriesCoefficients c = series_coefficients(sys, u, opt.K);
    Json w = Json::array();
    for (const auto& f : c.w) {
      Json comps = Json::array();
      for (const auto& e : f.components) comps.push_back(to_string(e, sys.coords));
      w.push_back(comps);
    }
    r.report["W"] = w;
    SeriesComparison cmp = compare_series_ode(sys, sys.q0, u, opt.K, opt.T, opt.h);
    r.report["comparison"] = comparison_json(cmp);
    if (cmp.series.aborted || cmp.ode.aborted) r.exit_code = exit_code::numeric_failure;
    return r;
  });
}

CommandResult cmd_christoffel(const CommonOptions& opt) {
  return guarded("christoffel", [&] {
    MechanicalSystem sys = load_system(opt.path);
    Tolerances tol = effective(sys, opt);
    CommandResult r;
    r.report = header("christoffel", sys, tol);
    r.report["christoffel"] = christoffel_json(sys);
    return r;
  });
}

}  // namespace stlcc
