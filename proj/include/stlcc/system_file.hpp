#pragma once

// Sectioned key-value system files.
//
//   # comment
//   [system]
//   dim = 2
//   coords = [x, y]
//   [metric]
//   g = [["1", "0"], ["0", "1 + x^2"]]
//   [inputs]
//   Y1 = ["1", "0"]          # or F1 = [...] for a one-form
//   [point]
//   q0 = [0, 0.5]
//   [analysis]             # optional
//   max_degree = 4
//
// A [connection] section with entries Gamma[a][b][c] = "expr" (1-based,
// unlisted entries zero) may replace [metric]; both may appear only with
// override_metric = true inside [connection].

#include <stdexcept>
#include <string>
#include <string_view>

#include "stlcc/mechanical_system.hpp"

namespace stlcc {

class SystemFileError : public std::runtime_error {
 public:
  SystemFileError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses and validates a system: positive-definite metric and independent
/// inputs at q0. Errors carry line and column (0 when not tied to a location).
MechanicalSystem parse_system(std::string_view text);
MechanicalSystem load_system(const std::string& path);

/// Text that parses back to an identical system.
std::string serialize_system(const MechanicalSystem& sys);

}  // namespace stlcc
