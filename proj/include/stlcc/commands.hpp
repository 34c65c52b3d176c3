#pragma once

#include <optional>
#include <string>

#include "stlcc/report.hpp"

namespace stlcc {

namespace exit_code {
constexpr int verdict = 0;
constexpr int inconclusive = 2;
constexpr int input_error = 3;
constexpr int numeric_failure = 4;
}  // namespace exit_code

struct CommonOptions {
  std::string path;
  std::optional<double> rank_tol;
  std::optional<double> residual_tol;
  std::optional<double> zero_tol;
  std::optional<int> max_degree;
};

struct SimulateOptions {
  CommonOptions common;
  /// "u1,u2,..." for a constant input or "t0:u..;t1:u..;..." for switching.
  std::string control;
  double T = 1.0;
  double h = 1e-3;
  std::optional<int> K;
  std::string output;  // trajectory file, empty for none
  bool no_clamp = false;
  std::string v0;  // "v1,v2,...", empty for rest
};

struct SeriesOptions {
  CommonOptions common;
  std::string u;
  int K = 2;
  double T = 0.5;
  double h = 1e-3;
};

struct CommandResult {
  Json report;
  int exit_code = exit_code::verdict;
};

CommandResult cmd_analyze(const CommonOptions& opt);
CommandResult cmd_basis_search(const CommonOptions& opt);
CommandResult cmd_simulate(const SimulateOptions& opt);
CommandResult cmd_series_compare(const SeriesOptions& opt);
CommandResult cmd_christoffel(const CommonOptions& opt);

/// Comma-separated numbers; throws std::invalid_argument unless there are n.
VecD parse_vector(const std::string& text, std::size_t n);
ControlSignal parse_control(const std::string& text, std::size_t m, bool clamp);

}  // namespace stlcc
