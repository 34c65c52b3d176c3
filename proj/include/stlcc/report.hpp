#pragma once

// Structured JSON documents for analysis results. Key order is fixed so that
// identical inputs give byte-identical reports.

#include <json.hpp>

#include "stlcc/accessibility.hpp"
#include "stlcc/basis_search.hpp"
#include "stlcc/simulator.hpp"

namespace stlcc {

using Json = nlohmann::ordered_json;

Json to_json(const MatD& m);
Json to_json(const MatQ& m);
Json to_json(const VecQ& v);

Json system_json(const MechanicalSystem& sys);
Json tolerances_json(const Tolerances& tol);
Json christoffel_json(const MechanicalSystem& sys);

/// Every symmetric product up to tol.max_degree with its parity and value at q0.
Json products_json(const MechanicalSystem& sys, const Point& q0, const Tolerances& tol);

Json closure_json(const ClosureRank& r, const Tolerances& tol);
Json sufficient_json(const SufficientConditions& s, const Tolerances& tol);
Json single_input_json(const SingleInputVerdict& v);
Json verdict_json(const Verdict& v, const Tolerances& tol);
Json trajectory_json(const Trajectory& traj);
Json comparison_json(const SeriesComparison& c);

}  // namespace stlcc
