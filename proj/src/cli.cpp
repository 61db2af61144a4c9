#include "bldc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bldc/analysis.hpp"
#include "bldc/datasheet.hpp"
#include "bldc/format.hpp"

namespace bldc::cli {

namespace {

struct Globals {
  std::string format = "text";
  bool quiet = false;

  bool csv() const { return format == "csv"; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  os << contents;
  if (!os) throw Error(ErrorCode::InvalidArgument, "failed writing '" + path + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Prints rows as a left-aligned text table or as CSV.
void print_table(std::ostream& os, const Globals& g, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  if (g.csv()) {
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << csv_field(r[k]);
      os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t k = 0; k < header.size(); ++k) width[k] = header[k].size();
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) width[k] = std::max(width[k], r[k].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string text;
    for (std::size_t k = 0; k < r.size(); ++k) {
      text += r[k];
      if (k + 1 < r.size()) text += std::string(width[k] - r[k].size() + 2, ' ');
    }
    os << text << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string num(double v, const Globals& g) { return format_sig(v, g.csv() ? 12 : 8); }

// --- convert ---------------------------------------------------------------

struct ConvertArgs {
  std::string in;
  std::string out;
  bool strict = false;
  std::string winding;
};

int cmd_convert(const ConvertArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  RawDatasheet raw;
  std::vector<std::string> warnings;
  try {
    raw = parse_datasheet(read_file(a.in), ParseOptions{a.strict}, &warnings);
  } catch (const Error& e) {
    err << "error: " << a.in << ": " << to_string(e.code()) << ": " << e.what() << "\n";
    return kParseError;
  }

  NormalizeResult result;
  try {
    NormalizeOptions opts;
    if (!a.winding.empty()) opts.assume_winding = parse_winding(a.winding);
    result = normalize_with_audit(raw, opts);
  } catch (const Error& e) {
    err << "error: " << a.in << ": " << to_string(e.code()) << ": " << e.what() << "\n";
    return kConversionError;
  }
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  for (const auto& w : warnings) err << "warning: " << w << "\n";

  try {
    write_file(a.out, write_model_file(result.model));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  if (!g.quiet) {
    std::vector<std::vector<std::string>> rows;
    for (const AuditEntry& e : result.audit) {
      rows.push_back({e.parameter, e.source, num(e.source_value, g), num(e.factor, g),
                      num(e.value, g), e.relation});
    }
    print_table(out, g, {"parameter", "source", "source_value", "factor", "value", "relation"}, rows);
  }
  return kOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  std::string mode = "both";
  std::optional<double> vq;
  std::optional<double> iq;
  std::string load = "0";
  double t_end = 0.0;
  double dt = kDefaultTimeStep;
  std::string out;
  std::size_t record_every = 1;
};

std::string sibling_path(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  std::filesystem::path name = p.stem();
  name += "." + tag;
  name += p.extension().empty() ? std::filesystem::path(".csv") : p.extension();
  return (p.parent_path() / name).string();
}

int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  QAxisMotorModel model;
  LoadProfile load;
  try {
    model = parse_model_file(read_file(a.model));
    if (auto tau = parse_double(a.load)) {
      load = LoadProfile::constant(*tau);
    } else {
      load = LoadProfile::parse_table(read_file(a.load));
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kParseError;
  }

  const Controller controller = a.vq ? Controller::voltage(*a.vq) : Controller::current(*a.iq);
  RunOptions opts;
  opts.t_end = a.t_end;
  opts.dt = a.dt;
  opts.record_every = a.record_every;

  std::vector<std::pair<ModelSelector, std::string>> jobs;
  if (a.mode == "brushed-analogue" || a.mode == "both") {
    jobs.emplace_back(ModelSelector::QAxis, a.mode == "both" ? sibling_path(a.out, "brushed-analogue") : a.out);
  }
  if (a.mode == "three-phase" || a.mode == "both") {
    jobs.emplace_back(ModelSelector::ThreePhase, a.mode == "both" ? sibling_path(a.out, "three-phase") : a.out);
  }

  std::vector<SimTrace> traces;
  for (const auto& [which, path] : jobs) {
    try {
      traces.push_back(run(model, controller, load, which, opts));
      std::ostringstream csv;
      write_trace_csv(csv, traces.back());
      write_file(path, csv.str());
    } catch (const NonFiniteState& e) {
      err << "error: " << to_string(which) << " simulation diverged at t = "
          << format_sig(e.time(), 12) << " s (step " << e.step() << ")\n";
      return kDivergence;
    } catch (const Error& e) {
      err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
      return kParseError;
    }
    if (!g.quiet && !g.csv()) {
      out << "wrote " << traces.back().size() << " samples of the " << to_string(which)
          << " model to " << path << "\n";
    }
  }

  if (traces.size() == 2) {
    double deviation = 0.0;
    double peak = 0.0;
    for (std::size_t k = 0; k < traces[0].size(); ++k) {
      deviation = std::max(deviation, std::abs(traces[0].omega[k] - traces[1].omega[k]));
      peak = std::max(peak, std::abs(traces[0].omega[k]));
    }
    const double relative = peak > 0.0 ? deviation / peak : deviation;
    if (g.csv()) {
      out << "max_omega_deviation," << format_sig(deviation, 12) << ",relative,"
          << format_sig(relative, 12) << "\n";
    } else {
      out << "max |omega_q - omega_3phase| = " << format_sig(deviation, 12)
          << " rad/s (relative " << format_sig(relative, 12) << ")\n";
    }
  }
  return kOk;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::string model;
  double bus_voltage = 0.0;
  std::optional<double> omega;
  std::optional<double> iq;
};

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  try {
    const QAxisMotorModel m = parse_model_file(read_file(a.model));
    std::vector<std::vector<std::string>> rows{
        {"ktq", num(m.ktq, g), "Nm/A"},
        {"kbq", num(m.kbq, g), "V*s/rad"},
        {"r_phase", num(m.r_phase, g), "ohm"},
        {"l_effective", num(m.l_effective, g), "H"},
    };
    if (a.iq) {
      const QAxisCurrent iq(*a.iq);
      rows.push_back({"power_loss", num(resistive_power_loss(iq, PhaseResistance(m.r_phase)), g), "W"});
      rows.push_back({"torque", num(torque(QAxisTorqueConstant(m.ktq), iq), g), "Nm"});
    }
    rows.push_back({"max_no_load_velocity", num(max_no_load_velocity(m, a.bus_voltage), g), "rad/s"});
    if (a.omega) {
      rows.push_back({"required_bus_voltage", num(required_bus_voltage(m, *a.omega), g), "V"});
    }
    if (!g.quiet) print_table(out, g, {"quantity", "value", "unit"}, rows);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kParseError;
  }
  return kOk;
}

// --- pitfalls --------------------------------------------------------------

struct PitfallArgs {
  std::string model;
  double iq = 1.0;
};

int cmd_pitfalls(const PitfallArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  try {
    const QAxisMotorModel m = parse_model_file(read_file(a.model));
    std::vector<std::vector<std::string>> rows;
    for (const PitfallRow& r : pitfall_table(m, a.iq)) {
      rows.push_back({r.pitfall, std::string(to_string(r.winding)) +
                                     (r.winding == m.winding ? "" : " (hypothetical)"),
                      num(r.wrong, g), num(r.right, g), num(r.ratio, g), r.relation});
    }
    if (!g.quiet) {
      print_table(out, g, {"pitfall", "winding", "wrong", "right", "ratio", "relation"}, rows);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kParseError;
  }
  return kOk;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SimTrace& tr) {
  const bool phase = tr.model == ModelSelector::ThreePhase;
  os << (phase ? "t,ia,ib,ic" : "t,iq") << ",theta_r,omega,torque,power_loss,back_emf_q\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_sig(tr.time[k]);
    if (phase) {
      const ThreePhaseVector& i = tr.phase_currents[k];
      os << ',' << format_sig(i.a) << ',' << format_sig(i.b) << ',' << format_sig(i.c);
    } else {
      os << ',' << format_sig(tr.iq[k]);
    }
    os << ',' << format_sig(tr.theta_r[k]) << ',' << format_sig(tr.omega[k]) << ','
       << format_sig(tr.torque[k]) << ',' << format_sig(tr.power_loss[k]) << ','
       << format_sig(tr.back_emf_q[k]) << '\n';
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frame-aware BLDC motor modeling: datasheet normalization, simulation, analysis"};
  app.name(args.empty() ? "bldc" : std::filesystem::path(args.front()).filename().string());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_flag("--quiet", g.quiet, "Suppress reports on standard output");

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Normalize a datasheet into a q-axis model file");
  convert->add_option("--in", ca.in, "Datasheet file")->required();
  convert->add_option("--out", ca.out, "Model file to write")->required();
  convert->add_flag("--strict", ca.strict, "Treat unknown datasheet keys as errors");
  convert->add_option("--winding", ca.winding, "Resolve an unknown winding type")
      ->check(CLI::IsMember({"wye", "delta"}));

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Simulate the q-axis and/or three-phase model");
  simulate->add_option("--model", sa.model, "Model file")->required();
  simulate->add_option("--mode", sa.mode, "brushed-analogue | three-phase | both")
      ->check(CLI::IsMember({"brushed-analogue", "three-phase", "both"}));
  auto* vq = simulate->add_option("--vq", sa.vq, "Commanded q-axis voltage [V]");
  auto* iq = simulate->add_option("--iq", sa.iq, "Commanded q-axis current [A]");
  vq->excludes(iq);
  simulate->add_option("--load", sa.load, "Load torque [Nm] or a 'time torque' table file");
  simulate->add_option("--t-end", sa.t_end, "Simulated duration [s]")->required();
  simulate->add_option("--dt", sa.dt, "RK4 step [s]");
  simulate->add_option("--out", sa.out, "Trace CSV (with --mode both: <stem>.<model>.csv)")->required();
  simulate->add_option("--record-every", sa.record_every, "Keep every n-th step")
      ->check(CLI::PositiveNumber);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Loss, torque and speed/voltage limits");
  analyze->add_option("--model", aa.model, "Model file")->required();
  analyze->add_option("--bus-voltage", aa.bus_voltage, "Bus voltage [V]")->required();
  analyze->add_option("--omega", aa.omega, "Rotor speed for the bus-voltage requirement [rad/s]");
  analyze->add_option("--iq", aa.iq, "q-axis current for loss and torque [A]");

  PitfallArgs pa;
  auto* pitfalls = app.add_subcommand("pitfalls", "Wrong-versus-right values for frame mix-ups");
  pitfalls->add_option("--model", pa.model, "Model file")->required();
  pitfalls->add_option("--iq", pa.iq, "Reference q-axis current [A]");

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
    if (simulate->parsed() && !sa.vq && !sa.iq) {
      throw CLI::RequiredError("one of --vq or --iq");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  if (convert->parsed()) return cmd_convert(ca, g, out, err);
  if (simulate->parsed()) return cmd_simulate(sa, g, out, err);
  if (analyze->parsed()) return cmd_analyze(aa, g, out, err);
  return cmd_pitfalls(pa, g, out, err);
}

}  // namespace bldc::cli
