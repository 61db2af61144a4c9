#include "bldc/datasheet.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "bldc/format.hpp"

namespace bldc {

namespace {

constexpr double kRpmToRadPerSec = 2.0 * std::numbers::pi / 60.0;

struct Line {
  std::size_t number = 0;
  std::string key;
  std::string rhs;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
    ++number;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      throw SyntaxError(number, std::string(raw), "expected 'key = value'");
    }
    const std::string_view key = trim(raw.substr(0, eq));
    const std::string_view rhs = trim(raw.substr(eq + 1));
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_") !=
                           std::string_view::npos) {
      throw SyntaxError(number, std::string(key), "invalid key");
    }
    if (rhs.empty()) throw SyntaxError(number, std::string(key), "missing value");
    if (auto [it, inserted] = seen.emplace(std::string(key), number); !inserted) {
      throw SyntaxError(number, std::string(key),
                        "duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    out.push_back({number, std::string(key), std::string(rhs)});
  }
  return out;
}

struct ValueWithUnit {
  double value = 0.0;
  std::string unit;
};

ValueWithUnit split_value(const Line& line) {
  std::istringstream is(line.rhs);
  std::string number;
  std::string unit;
  std::string extra;
  is >> number >> unit >> extra;
  if (!extra.empty()) throw SyntaxError(line.number, extra, "unexpected token");
  const auto value = parse_double(number);
  if (!value) throw SyntaxError(line.number, number, "expected a number");
  if (!std::isfinite(*value)) throw SyntaxError(line.number, number, "value must be finite");
  return {*value, unit};
}

double with_unit(const Line& line, std::initializer_list<std::string_view> accepted) {
  const ValueWithUnit v = split_value(line);
  if (v.unit.empty()) return v.value;
  for (auto u : accepted) {
    if (v.unit == u) return v.value;
  }
  throw Error(ErrorCode::UnitError, "line " + std::to_string(line.number) + ": unit '" + v.unit +
                                        "' not recognized for '" + line.key + "'");
}

double unitless(const Line& line) { return with_unit(line, {}); }

std::string single_word(const Line& line) {
  std::istringstream is(line.rhs);
  std::string word;
  std::string extra;
  is >> word >> extra;
  if (!extra.empty()) throw SyntaxError(line.number, extra, "unexpected token");
  return word;
}

int positive_int(const Line& line) {
  const auto v = parse_integer(single_word(line));
  if (!v) throw SyntaxError(line.number, line.rhs, "expected an integer");
  if (*v < 1 || *v > 100000) {
    throw Error(ErrorCode::InvalidValue,
                "line " + std::to_string(line.number) + ": '" + line.key + "' must be >= 1");
  }
  return static_cast<int>(*v);
}

void require_positive(std::string_view key, const std::optional<double>& v) {
  if (v && !(*v > 0.0)) {
    throw Error(ErrorCode::NonPositiveValue, std::string(key) + " must be positive");
  }
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

std::string_view to_string(KtCurrentConvention c) noexcept {
  switch (c) {
    case KtCurrentConvention::PhaseAmplitude: return "phase_amplitude";
    case KtCurrentConvention::QAxis: return "q_axis";
    case KtCurrentConvention::SinglePhaseRMS: return "single_phase_rms";
    case KtCurrentConvention::BusCurrent: return "bus";
  }
  return "?";
}

std::optional<KtCurrentConvention> parse_kt_convention(std::string_view text) noexcept {
  if (text == "phase_amplitude") return KtCurrentConvention::PhaseAmplitude;
  if (text == "q_axis") return KtCurrentConvention::QAxis;
  if (text == "single_phase_rms") return KtCurrentConvention::SinglePhaseRMS;
  if (text == "bus") return KtCurrentConvention::BusCurrent;
  return std::nullopt;
}

void validate(const RawDatasheet& raw) {
  if (!raw.kv && !raw.kt && !raw.kb_ll_amplitude) {
    throw MissingRequiredField("kv", "one of kv, kt or kb_ll_amplitude is required");
  }
  if (!raw.terminal_resistance && !raw.phase_resistance) {
    throw MissingRequiredField("resistance", "one of resistance_ll or resistance_phase is required");
  }
  if (raw.pole_pairs < 1) throw MissingRequiredField("pole_pairs", "must be >= 1");

  require_positive("inertia", raw.inertia);
  require_positive("resistance_ll", raw.terminal_resistance);
  require_positive("resistance_phase", raw.phase_resistance);
  require_positive("inductance_ll", raw.terminal_inductance);
  require_positive("kv", raw.kv);
  require_positive("kb_ll_amplitude", raw.kb_ll_amplitude);
  if (raw.kt) require_positive("kt", raw.kt->value);
  if (!(raw.damping >= 0.0) || !std::isfinite(raw.damping)) {
    throw Error(ErrorCode::InvalidValue, "damping must be finite and >= 0");
  }
  if (!(raw.kv_calibration_factor >= 1.0 && raw.kv_calibration_factor <= 1.25)) {
    throw Error(ErrorCode::InvalidValue, "kv_calibration_factor must lie in [1.0, 1.25]");
  }
}

RawDatasheet parse_datasheet(std::string_view file_contents, const ParseOptions& options,
                             std::vector<std::string>* warnings) {
  RawDatasheet raw;
  std::optional<double> kt_value;
  std::optional<KtCurrentConvention> kt_convention;

  for (const Line& line : split_lines(file_contents)) {
    const std::string& k = line.key;
    if (k == "name") {
      raw.name = line.rhs;
    } else if (k == "winding") {
      const std::string w = single_word(line);
      if (w != "unknown") {
        raw.winding = parse_winding(w);
        if (!raw.winding) throw SyntaxError(line.number, w, "winding must be wye, delta or unknown");
      }
    } else if (k == "pole_pairs") {
      raw.pole_pairs = positive_int(line);
    } else if (k == "inertia") {
      raw.inertia = with_unit(line, {"kg_m2"});
    } else if (k == "damping") {
      raw.damping = with_unit(line, {"nm_s_per_rad"});
    } else if (k == "resistance_ll") {
      raw.terminal_resistance = with_unit(line, {"ohm"});
    } else if (k == "resistance_phase") {
      raw.phase_resistance = with_unit(line, {"ohm"});
    } else if (k == "inductance_ll") {
      raw.terminal_inductance = with_unit(line, {"henry"});
    } else if (k == "kv") {
      const ValueWithUnit v = split_value(line);
      if (v.unit == "rad_per_volt_sec") {
        raw.kv = v.value;
      } else if (v.unit == "rpm_per_volt") {
        raw.kv = v.value * kRpmToRadPerSec;
      } else {
        throw Error(ErrorCode::UnitError,
                    "line " + std::to_string(line.number) +
                        ": kv needs an explicit unit (rad_per_volt_sec or rpm_per_volt), got '" +
                        v.unit + "'");
      }
    } else if (k == "kt") {
      const ValueWithUnit v = split_value(line);
      kt_value = v.value;
      if (auto c = parse_kt_convention(v.unit)) {
        kt_convention = c;
      } else if (!v.unit.empty() && v.unit != "nm_per_amp") {
        throw Error(ErrorCode::UnitError, "line " + std::to_string(line.number) + ": unit '" +
                                              v.unit + "' not recognized for 'kt'");
      }
    } else if (k == "kt_convention") {
      const std::string word = single_word(line);
      const auto c = parse_kt_convention(word);
      if (!c) {
        throw SyntaxError(line.number, word,
                          "kt_convention must be phase_amplitude, q_axis, single_phase_rms or bus");
      }
      if (kt_convention && *kt_convention != *c) {
        throw SyntaxError(line.number, word, "kt_convention contradicts the convention given on kt");
      }
      kt_convention = c;
    } else if (k == "kb_ll_amplitude") {
      raw.kb_ll_amplitude = with_unit(line, {"volt_sec_per_rad"});
    } else if (k == "kv_calibration_factor") {
      raw.kv_calibration_factor = unitless(line);
    } else if (options.strict) {
      throw Error(ErrorCode::UnknownKey,
                  "line " + std::to_string(line.number) + ": unknown key '" + k + "'");
    } else if (warnings) {
      warnings->push_back("line " + std::to_string(line.number) + ": ignoring unknown key '" + k + "'");
    }
  }

  if (kt_value) {
    if (!kt_convention) {
      throw MissingRequiredField("kt_convention",
                                 "the current used to quote kt must be stated explicitly");
    }
    raw.kt = TorqueConstantSpec{*kt_value, *kt_convention};
  } else if (kt_convention) {
    throw MissingRequiredField("kt", "kt_convention given without kt");
  }

  validate(raw);
  return raw;
}

double QAxisMotorModel::phase_constant_amplitude() const noexcept {
  return ktq / std::sqrt(1.5);
}

void QAxisMotorModel::validate() const {
  auto positive = [](std::string_view what, double v) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw Error(ErrorCode::NonPositiveValue, std::string(what) + " must be positive and finite");
    }
  };
  positive("ktq", ktq);
  positive("kbq", kbq);
  positive("r_phase", r_phase);
  positive("l_effective", l_effective);
  positive("inertia", inertia);
  if (!std::isfinite(damping) || damping < 0.0) {
    throw Error(ErrorCode::InvalidValue, "damping must be finite and >= 0");
  }
  if (pole_pairs < 1) throw Error(ErrorCode::InvalidValue, "pole_pairs must be >= 1");
  if (ktq != kbq) {
    throw Error(ErrorCode::InvalidValue, "ktq and kbq must be identical in SI units");
  }
}

NormalizeResult normalize_with_audit(const RawDatasheet& raw, const NormalizeOptions& options) {
  validate(raw);

  std::optional<WindingType> winding = raw.winding;
  if (options.assume_winding) {
    if (winding && *winding != *options.assume_winding) {
      throw Error(ErrorCode::InvalidArgument,
                  "assumed winding contradicts the datasheet's " + std::string(to_string(*winding)));
    }
    winding = options.assume_winding;
  }
  auto need_winding = [&](std::string_view purpose) {
    if (!winding) {
      throw Error(ErrorCode::WindingRequired,
                  "winding type is unknown but required to " + std::string(purpose));
    }
    return *winding;
  };

  NormalizeResult result;
  QAxisMotorModel& m = result.model;
  m.name = raw.name;

  // Torque constant: an explicit kt wins; the back-EMF route is a fallback and
  // a cross-check.
  std::optional<double> from_kt;
  std::optional<double> from_back_emf;
  AuditEntry kt_entry;
  AuditEntry back_emf_entry;

  if (raw.kt) {
    const auto& kt = *raw.kt;
    ReferenceFrame frame = ReferenceFrame::QAxis;
    std::string relation = "Ktq = Kt (q-axis current)";
    switch (kt.convention) {
      case KtCurrentConvention::BusCurrent:
        throw Error(ErrorCode::UnconvertibleKtConvention,
                    "kt quoted against DC bus current (I_bus) has no defined conversion to the "
                    "q-axis frame: bus current depends on the drive and operating point; supply kv, "
                    "kb_ll_amplitude or a kt referenced to phase, q-axis or RMS current");
      case KtCurrentConvention::QAxis:
        break;
      case KtCurrentConvention::PhaseAmplitude:
        frame = ReferenceFrame::Phase;
        relation = "Ktq = sqrt(3/2) Kt_phase";
        break;
      case KtCurrentConvention::SinglePhaseRMS:
        frame = ReferenceFrame::SinglePhaseRMS;
        relation = "Ktq = Kt_rms / sqrt(3)";
        result.warnings.push_back(
            "kt_convention single_phase_rms assumes single-phase RMS current; manufacturers may "
            "mean the RMS of all three phases, which equals the q-axis current");
        break;
    }
    // The phase/RMS -> q-axis factors do not depend on the winding.
    const WindingType any = winding.value_or(WindingType::Wye);
    const FrameTaggedQuantity q = convert(
        FrameTaggedQuantity(kt.value, QuantityKind::TorqueConstant, frame), ReferenceFrame::QAxis, any);
    from_kt = q.value();
    kt_entry = {"ktq", "kt [" + std::string(to_string(kt.convention)) + "]", kt.value,
                q.value() / kt.value, q.value(), relation};
  }

  if (raw.kb_ll_amplitude || raw.kv) {
    double kb_ll = 0.0;
    std::string source;
    double source_value = 0.0;
    if (raw.kb_ll_amplitude) {
      kb_ll = *raw.kb_ll_amplitude;
      source = "kb_ll_amplitude [line-to-line]";
      source_value = kb_ll;
      if (raw.kv) {
        const double alt = 1.0 / *raw.kv;
        if (relative_gap(kb_ll, alt) > options.conflict_tolerance) {
          throw ConflictingSources("kb_ll", kb_ll, alt,
                                   "kb_ll_amplitude " + format_sig(kb_ll, 6) + " V s/rad and 1/kv " +
                                       format_sig(alt, 6) + " V s/rad disagree");
        }
      }
    } else {
      kb_ll = 1.0 / *raw.kv;
      source = "kv [line-to-line]";
      source_value = *raw.kv;
    }
    kb_ll *= raw.kv_calibration_factor;
    const WindingType w = need_winding("convert the line-to-line back-EMF constant to the q-axis");
    const double ktq = convert(FrameTaggedQuantity(kb_ll, QuantityKind::BackEmfConstant,
                                                   ReferenceFrame::LineToLine),
                               QuantityKind::TorqueConstant, ReferenceFrame::QAxis, w)
                           .value();
    from_back_emf = ktq;
    std::string relation = (w == WindingType::Wye) ? "Ktq = Kb_ll / sqrt(2) (wye)"
                                                   : "Ktq = sqrt(3/2) Kb_ll (delta)";
    if (raw.kb_ll_amplitude) {
      relation += raw.kv_calibration_factor != 1.0 ? ", Kb_ll scaled by calibration" : "";
    } else {
      relation += ", Kb_ll = " + std::string(raw.kv_calibration_factor != 1.0 ? "cal / Kv" : "1 / Kv");
    }
    back_emf_entry = {"ktq", source, source_value, ktq / source_value, ktq, relation};
  }

  if (from_kt && from_back_emf && relative_gap(*from_kt, *from_back_emf) > options.conflict_tolerance) {
    throw ConflictingSources("ktq", *from_kt, *from_back_emf,
                             "Ktq from kt (" + format_sig(*from_kt, 6) + " Nm/A) and from the "
                             "back-EMF constant (" + format_sig(*from_back_emf, 6) +
                                 " Nm/A) differ by more than " +
                                 format_sig(100.0 * options.conflict_tolerance, 3) + "%");
  }
  if (from_kt) {
    m.ktq = *from_kt;
    result.audit.push_back(kt_entry);
  } else {
    m.ktq = *from_back_emf;
    result.audit.push_back(back_emf_entry);
  }
  m.kbq = m.ktq;
  result.audit.push_back({"kbq", "ktq [q-axis]", m.ktq, 1.0, m.kbq, "Kbq = Ktq (SI, ideal motor)"});

  // Phase resistance.
  std::optional<double> r_from_terminal;
  if (raw.terminal_resistance) {
    const WindingType w = need_winding("convert terminal resistance to phase resistance");
    r_from_terminal = convert(FrameTaggedQuantity(*raw.terminal_resistance, QuantityKind::Resistance,
                                                  ReferenceFrame::LineToLine),
                              ReferenceFrame::Phase, w)
                          .value();
  }
  if (raw.phase_resistance) {
    if (r_from_terminal &&
        relative_gap(*raw.phase_resistance, *r_from_terminal) > options.conflict_tolerance) {
      throw ConflictingSources("r_phase", *raw.phase_resistance, *r_from_terminal,
                               "resistance_phase and the converted resistance_ll disagree");
    }
    m.r_phase = *raw.phase_resistance;
    result.audit.push_back({"r_phase", "resistance_phase [phase]", m.r_phase, 1.0, m.r_phase,
                            "R_phase given"});
  } else {
    m.r_phase = *r_from_terminal;
    result.audit.push_back({"r_phase", "resistance_ll [line-to-line]", *raw.terminal_resistance,
                            m.r_phase / *raw.terminal_resistance, m.r_phase,
                            *winding == WindingType::Wye ? "R_phase = R_ll / 2 (wye)"
                                                         : "R_phase = 3/2 R_ll (delta)"});
  }

  if (!raw.terminal_inductance) {
    throw MissingRequiredField("inductance_ll", "the effective inductance cannot be derived");
  }
  {
    const WindingType w = need_winding("convert terminal inductance to effective inductance");
    m.l_effective = convert(FrameTaggedQuantity(*raw.terminal_inductance, QuantityKind::Inductance,
                                                ReferenceFrame::LineToLine),
                            ReferenceFrame::QAxis, w)
                        .value();
    result.audit.push_back({"l_effective", "inductance_ll [line-to-line]", *raw.terminal_inductance,
                            m.l_effective / *raw.terminal_inductance, m.l_effective,
                            w == WindingType::Wye ? "Le = 3/2 L_ll (wye)" : "Le = L_ll / 2 (delta)"});
  }

  if (!raw.inertia) throw MissingRequiredField("inertia", "rotor inertia is needed by the model");
  m.inertia = *raw.inertia;
  m.damping = raw.damping;
  m.pole_pairs = raw.pole_pairs;
  m.winding = need_winding("build the motor model");
  result.audit.push_back({"inertia", "inertia", m.inertia, 1.0, m.inertia, "J given"});
  result.audit.push_back({"damping", "damping", m.damping, 1.0, m.damping, "b given"});

  m.validate();
  return result;
}

QAxisMotorModel normalize(const RawDatasheet& raw, const NormalizeOptions& options) {
  return normalize_with_audit(raw, options).model;
}

RawDatasheet datasheet_from_model(const QAxisMotorModel& model) {
  RawDatasheet raw;
  raw.name = model.name;
  raw.winding = model.winding;
  raw.pole_pairs = model.pole_pairs;
  raw.inertia = model.inertia;
  raw.damping = model.damping;
  raw.phase_resistance = model.r_phase;
  raw.terminal_inductance =
      convert(FrameTaggedQuantity(model.l_effective, QuantityKind::Inductance, ReferenceFrame::QAxis),
              ReferenceFrame::LineToLine, model.winding)
          .value();
  raw.kt = TorqueConstantSpec{model.ktq, KtCurrentConvention::QAxis};
  return raw;
}

std::array<double, 3> winding_heat_signature(WindingType w, double dc_current, double r_phase) {
  if (!(dc_current > 0.0) || !(r_phase > 0.0) || !std::isfinite(dc_current) ||
      !std::isfinite(r_phase)) {
    throw Error(ErrorCode::NonPositiveValue, "current and phase resistance must be positive");
  }
  const double p = dc_current * dc_current * r_phase;
  if (w == WindingType::Wye) return {p, p, 0.0};
  // Direct phase carries 2I/3, the series pair I/3.
  return {4.0 / 9.0 * p, 1.0 / 9.0 * p, 1.0 / 9.0 * p};
}

std::string write_model_file(const QAxisMotorModel& model) {
  model.validate();
  std::ostringstream os;
  os << "# q-axis brushed-analogue motor model (SI units)\n";
  if (!model.name.empty()) os << "name = " << model.name << "\n";
  os << "winding = " << to_string(model.winding) << "\n"
     << "pole_pairs = " << model.pole_pairs << "\n"
     << "ktq = " << format_exact(model.ktq) << " nm_per_amp\n"
     << "kbq = " << format_exact(model.kbq) << " volt_sec_per_rad\n"
     << "r_phase = " << format_exact(model.r_phase) << " ohm\n"
     << "l_effective = " << format_exact(model.l_effective) << " henry\n"
     << "inertia = " << format_exact(model.inertia) << " kg_m2\n"
     << "damping = " << format_exact(model.damping) << " nm_s_per_rad\n";
  return os.str();
}

QAxisMotorModel parse_model_file(std::string_view file_contents) {
  QAxisMotorModel m;
  std::optional<WindingType> winding;
  std::map<std::string, bool, std::less<>> have;
  for (const Line& line : split_lines(file_contents)) {
    const std::string& k = line.key;
    have[k] = true;
    if (k == "name") {
      m.name = line.rhs;
    } else if (k == "winding") {
      winding = parse_winding(single_word(line));
      if (!winding) {
        throw Error(ErrorCode::WindingRequired, "model files need a resolved winding (wye or delta)");
      }
    } else if (k == "pole_pairs") {
      m.pole_pairs = positive_int(line);
    } else if (k == "ktq") {
      m.ktq = with_unit(line, {"nm_per_amp"});
    } else if (k == "kbq") {
      m.kbq = with_unit(line, {"volt_sec_per_rad"});
    } else if (k == "r_phase") {
      m.r_phase = with_unit(line, {"ohm"});
    } else if (k == "l_effective") {
      m.l_effective = with_unit(line, {"henry"});
    } else if (k == "inertia") {
      m.inertia = with_unit(line, {"kg_m2"});
    } else if (k == "damping") {
      m.damping = with_unit(line, {"nm_s_per_rad"});
    } else {
      throw Error(ErrorCode::UnknownKey,
                  "line " + std::to_string(line.number) + ": unknown model key '" + k + "'");
    }
  }
  for (std::string_view key :
       {"winding", "pole_pairs", "ktq", "r_phase", "l_effective", "inertia"}) {
    if (!have.contains(key)) throw MissingRequiredField(std::string(key));
  }
  m.winding = *winding;
  if (!have.contains("kbq")) m.kbq = m.ktq;
  m.validate();
  return m;
}

}  // namespace bldc
