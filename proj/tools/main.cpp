#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stlcc/commands.hpp"

namespace {

void add_common(CLI::App* cmd, stlcc::CommonOptions& opt) {
  cmd->add_option("system", opt.path, "System file")->required();
  cmd->add_option("--rank-tol", opt.rank_tol, "Relative singular-value cutoff (default 1e-9)");
  cmd->add_option("--residual-tol", opt.residual_tol, "Relative span-membership residual (default 1e-8)");
  cmd->add_option("--zero-tol", opt.zero_tol, "Relative zero cutoff for coefficients (default 1e-9)");
  cmd->add_option("--max-degree", opt.max_degree, "Symmetric-product truncation degree (default 4)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Configuration controllability analysis for simple mechanical control systems"};
  app.require_subcommand(1);
  std::string report_path;
  app.add_option("--report", report_path, "Write the JSON report here instead of stdout");

  stlcc::CommonOptions analyze;
  add_common(app.add_subcommand("analyze", "Accessibility ranks and sufficient conditions"), analyze);

  stlcc::CommonOptions search;
  add_common(app.add_subcommand("basis-search", "Decide controllability for m = n - 1 inputs"), search);

  stlcc::CommonOptions christoffel;
  add_common(app.add_subcommand("christoffel", "Print the Christoffel symbols"), christoffel);

  stlcc::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the forced geodesic equations from q0");
  add_common(simulate, sim.common);
  simulate->add_option("-u,--control", sim.control, "u1,u2,... or t0:u..;t1:u..")->required();
  simulate->add_option("-T,--horizon", sim.T, "Final time");
  simulate->add_option("--step", sim.h, "RK4 step");
  simulate->add_option("-K,--series-order", sim.K, "Also compare with the truncated series of this order");
  simulate->add_option("-o,--output", sim.output, "Trajectory file");
  simulate->add_flag("--no-clamp", sim.no_clamp, "Allow |u_i| > 1");
  simulate->add_option("--v0", sim.v0, "Initial velocity v1,v2,... (default rest)");

  stlcc::SeriesOptions series;
  auto* compare = app.add_subcommand("series-compare", "Truncated series against direct integration");
  add_common(compare, series.common);
  compare->add_option("-u,--control", series.u, "Constant input u1,u2,...")->required();
  compare->add_option("-K,--series-order", series.K, "Series order (1..6)");
  compare->add_option("-T,--horizon", series.T, "Final time");
  compare->add_option("--step", series.h, "RK4 step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : stlcc::exit_code::input_error;
  }

  stlcc::CommandResult result;
  if (app.got_subcommand("analyze")) {
    result = stlcc::cmd_analyze(analyze);
  } else if (app.got_subcommand("basis-search")) {
    result = stlcc::cmd_basis_search(search);
  } else if (app.got_subcommand("christoffel")) {
    result = stlcc::cmd_christoffel(christoffel);
  } else if (app.got_subcommand("simulate")) {
    result = stlcc::cmd_simulate(sim);
  } else {
    result = stlcc::cmd_series_compare(series);
  }

  std::string text = result.report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "cannot write " << report_path << "\n";
      return stlcc::exit_code::input_error;
    }
    out << text;
  }
  if (result.report.contains("error")) std::cerr << result.report["error"]["message"].get<std::string>() << "\n";
  return result.exit_code;
}
