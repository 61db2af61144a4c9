#pragma once

// Closed-form design calculations on the q-axis model, plus the error factors
// produced by the two classic datasheet misreadings (terminal resistance used
// as phase resistance, line-to-line Kb used as the q-axis Kt).

#include <string>
#include <vector>

#include "bldc/datasheet.hpp"
#include "bldc/frames.hpp"

namespace bldc {

/// P = Iq^2 R_phase.
double resistive_power_loss(QAxisCurrent iq, PhaseResistance r_phase) noexcept;

/// Runtime-tagged variant; throws MismatchedFrames unless the pair is
/// (phase resistance, q-axis current).
double resistive_power_loss(const FrameTaggedQuantity& iq, const FrameTaggedQuantity& r_phase);

/// Loss summed over the three phase currents, sum(i_x^2) R_phase.
double resistive_power_loss_phase(double ia, double ib, double ic, PhaseResistance r_phase) noexcept;

/// (wrong loss using R_ll with Iq) / (correct loss): 2 for wye, 2/3 for delta.
double power_loss_error_if_terminal_resistance_misused(WindingType w) noexcept;

/// tau = Ktq Iq.
double torque(QAxisTorqueConstant ktq, QAxisCurrent iq) noexcept;
double torque(const FrameTaggedQuantity& ktq, const FrameTaggedQuantity& iq);

/// tau = sqrt(3)/2 Kb_ll I_l, valid for either winding. The line current
/// amplitude must be >= 0.
double torque_from_line(double kb_ll_amplitude, double i_line_amplitude);

/// (torque estimated with 1/Kv_ll as Ktq) / (actual torque) for a delta motor,
/// 1/sqrt(3/2).
double torque_error_if_kv_misused_as_ktq() noexcept;

/// Same ratio for either winding: 1/sqrt(3/2) for delta, sqrt(2) for wye.
double torque_error_if_kv_misused_as_ktq(WindingType w) noexcept;

/// No-load speed limit at a bus voltage (the line-to-line back-EMF amplitude
/// reaches V_bus): wye sqrt(1/2) V/Kbq, delta sqrt(3/2) V/Kbq. V_bus >= 0.
double max_no_load_velocity(const QAxisMotorModel& model, double v_bus);

/// Bus voltage whose line-to-line amplitude matches the back-EMF at `omega`:
/// wye sqrt(2) Kbq omega, delta sqrt(2/3) Kbq omega. No resistive drop.
double required_bus_voltage(const QAxisMotorModel& model, double omega);

struct PitfallRow {
  std::string pitfall;
  WindingType winding = WindingType::Wye;
  double wrong = 0.0;
  double right = 0.0;
  double ratio = 0.0;  // wrong / right
  std::string relation;
};

/// Wrong-versus-right loss and torque for both windings, evaluated with the
/// model's Rphase and Ktq at q-axis current `iq` (non-zero).
std::vector<PitfallRow> pitfall_table(const QAxisMotorModel& model, double iq = 1.0);

}  // namespace bldc
