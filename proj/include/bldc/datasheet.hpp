#pragma once

// Manufacturer datasheet parsing and normalization to the q-axis model.
//
// Datasheet files are flat `key = value [unit]` lines with `#` comments:
//
//   name = T-Motor U8 KV100
//   winding = delta            # wye | star | delta | unknown
//   pole_pairs = 21
//   kv = 100 rpm_per_volt      # or rad_per_volt_sec; the unit is mandatory
//   resistance_ll = 0.2 ohm
//
// Recognized keys: name, winding, pole_pairs, inertia [kg_m2],
// damping [nm_s_per_rad], resistance_ll [ohm], resistance_phase [ohm],
// inductance_ll [henry], kv [rad_per_volt_sec | rpm_per_volt],
// kt [nm_per_amp] with kt_convention (phase_amplitude | q_axis |
// single_phase_rms | bus), kb_ll_amplitude [volt_sec_per_rad],
// kv_calibration_factor. Units other than kv default to SI when omitted.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bldc/frames.hpp"

namespace bldc {

/// Which current the manufacturer used when quoting Kt. Always user-asserted.
enum class KtCurrentConvention { PhaseAmplitude, QAxis, SinglePhaseRMS, BusCurrent };

std::string_view to_string(KtCurrentConvention c) noexcept;
std::optional<KtCurrentConvention> parse_kt_convention(std::string_view text) noexcept;

struct TorqueConstantSpec {
  double value = 0.0;  // Nm/A
  KtCurrentConvention convention = KtCurrentConvention::QAxis;
};

struct RawDatasheet {
  std::string name;
  std::optional<WindingType> winding;  // nullopt: unknown
  int pole_pairs = 0;
  std::optional<double> inertia;              // kg m^2
  double damping = 0.0;                       // Nm s/rad
  std::optional<double> terminal_resistance;  // ohm, line-to-line
  std::optional<double> phase_resistance;     // ohm
  std::optional<double> terminal_inductance;  // H, line-to-line
  std::optional<double> kv;                   // rad/(V s), line-to-line amplitude
  std::optional<TorqueConstantSpec> kt;
  std::optional<double> kb_ll_amplitude;  // V s/rad
  double kv_calibration_factor = 1.0;
};

/// Throws MissingRequiredField / NonPositiveValue / InvalidValue when the
/// datasheet invariants do not hold.
void validate(const RawDatasheet& raw);

struct ParseOptions {
  bool strict = true;  // unknown keys are errors; otherwise warnings
};

RawDatasheet parse_datasheet(std::string_view file_contents, const ParseOptions& options = {},
                             std::vector<std::string>* warnings = nullptr);

/// Canonical brushed-analogue parameters. Ktq == Kbq in SI.
struct QAxisMotorModel {
  std::string name;
  double ktq = 0.0;          // Nm/A
  double kbq = 0.0;          // V s/rad
  double r_phase = 0.0;      // ohm
  double l_effective = 0.0;  // H, equals Lq
  double inertia = 0.0;      // kg m^2
  double damping = 0.0;      // Nm s/rad
  int pole_pairs = 1;
  WindingType winding = WindingType::Wye;

  /// Per-phase torque/back-EMF constant amplitude, Ktq / sqrt(3/2).
  double phase_constant_amplitude() const noexcept;

  void validate() const;
};

struct NormalizeOptions {
  /// Resolves an unknown winding; ignored if it matches the datasheet, an error
  /// if it contradicts it.
  std::optional<WindingType> assume_winding;
  double conflict_tolerance = 0.02;
};

struct AuditEntry {
  std::string parameter;  // model key, e.g. "ktq"
  std::string source;     // datasheet key and frame it came from
  double source_value = 0.0;
  double factor = 1.0;  // model value = factor * source value
  double value = 0.0;
  std::string relation;  // governing relation, e.g. "Ktq = sqrt(3/2) Kb_ll (delta)"
};

struct NormalizeResult {
  QAxisMotorModel model;
  std::vector<AuditEntry> audit;
  std::vector<std::string> warnings;
};

NormalizeResult normalize_with_audit(const RawDatasheet& raw, const NormalizeOptions& options = {});

QAxisMotorModel normalize(const RawDatasheet& raw, const NormalizeOptions& options = {});

/// Datasheet that normalizes back to `model` (q-axis Kt, phase resistance,
/// terminal inductance).
RawDatasheet datasheet_from_model(const QAxisMotorModel& model);

/// Per-phase resistive power [W] when `dc_current` is driven between two motor
/// leads, sorted descending. Wye: two phases in series, one idle. Delta: one
/// phase in parallel with the other two in series.
std::array<double, 3> winding_heat_signature(WindingType w, double dc_current, double r_phase);

/// Model files use the datasheet syntax with keys ktq, kbq, r_phase,
/// l_effective, inertia, damping, pole_pairs, winding (and optional name).
/// Values are written at full round-trip precision.
std::string write_model_file(const QAxisMotorModel& model);
QAxisMotorModel parse_model_file(std::string_view file_contents);

}  // namespace bldc
