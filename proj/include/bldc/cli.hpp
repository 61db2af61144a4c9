#pragma once

// Command-line front end. Exit codes are stable:
//   0  success
//   1  parse error (arguments, datasheet or model file), or a frame violation
//   2  conversion error (e.g. a torque constant quoted against bus current)
//   3  simulation diverged

#include <iosfwd>
#include <string>
#include <vector>

#include "bldc/dynamics.hpp"

namespace bldc::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kConversionError = 2,
  kDivergence = 3,
};

/// Runs the tool with `args` (args[0] is the program name), writing reports to
/// `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV with one header row, 12 significant digits, `.` decimal separator.
/// Columns: t, iq (or ia, ib, ic), theta_r, omega, torque, power_loss, back_emf_q.
void write_trace_csv(std::ostream& os, const SimTrace& trace);

}  // namespace bldc::cli
