#include "bldc/analysis.hpp"

#include <cmath>

namespace bldc {

namespace {

const double kSqrt3Over2 = std::sqrt(1.5);

void require_finite_nonnegative(const char* what, double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, std::string(what) + " must be finite");
  if (v < 0.0) throw Error(ErrorCode::NonPositiveValue, std::string(what) + " must be >= 0");
}

}  // namespace

double resistive_power_loss(QAxisCurrent iq, PhaseResistance r_phase) noexcept {
  return iq.value() * iq.value() * r_phase.value();
}

double resistive_power_loss(const FrameTaggedQuantity& iq, const FrameTaggedQuantity& r_phase) {
  const ResistanceCurrentPair pair = pair_check(r_phase, iq);
  if (pair.current_frame() != ReferenceFrame::QAxis) {
    throw Error(ErrorCode::MismatchedFrames,
                "q-axis loss expects the q-axis current, got " + iq.describe());
  }
  return pair.power();
}

double resistive_power_loss_phase(double ia, double ib, double ic, PhaseResistance r_phase) noexcept {
  return (ia * ia + ib * ib + ic * ic) * r_phase.value();
}

double power_loss_error_if_terminal_resistance_misused(WindingType w) noexcept {
  return conversion_factor(QuantityKind::Resistance, ReferenceFrame::Phase,
                           ReferenceFrame::LineToLine, w);
}

double torque(QAxisTorqueConstant ktq, QAxisCurrent iq) noexcept { return ktq.value() * iq.value(); }

double torque(const FrameTaggedQuantity& ktq, const FrameTaggedQuantity& iq) {
  return torque(QAxisTorqueConstant(ktq), QAxisCurrent(iq));
}

double torque_from_line(double kb_ll_amplitude, double i_line_amplitude) {
  if (!(kb_ll_amplitude > 0.0) || !std::isfinite(kb_ll_amplitude)) {
    throw Error(ErrorCode::NonPositiveValue, "line-to-line back-EMF constant must be positive");
  }
  require_finite_nonnegative("line current amplitude", i_line_amplitude);
  return std::sqrt(3.0) / 2.0 * kb_ll_amplitude * i_line_amplitude;
}

double torque_error_if_kv_misused_as_ktq() noexcept {
  return torque_error_if_kv_misused_as_ktq(WindingType::Delta);
}

double torque_error_if_kv_misused_as_ktq(WindingType w) noexcept {
  // Kb_ll / Ktq for the same motor.
  return w == WindingType::Delta ? 1.0 / kSqrt3Over2 : std::sqrt(2.0);
}

double max_no_load_velocity(const QAxisMotorModel& model, double v_bus) {
  require_finite_nonnegative("bus voltage", v_bus);
  const double scale = model.winding == WindingType::Wye ? std::sqrt(0.5) : kSqrt3Over2;
  return scale * v_bus / model.kbq;
}

double required_bus_voltage(const QAxisMotorModel& model, double omega) {
  require_finite_nonnegative("angular velocity", omega);
  const double scale = model.winding == WindingType::Wye ? std::sqrt(2.0) : std::sqrt(2.0 / 3.0);
  return scale * model.kbq * omega;
}

std::vector<PitfallRow> pitfall_table(const QAxisMotorModel& model, double iq) {
  if (!std::isfinite(iq) || iq == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "reference q-axis current must be finite and non-zero");
  }
  std::vector<PitfallRow> rows;
  for (WindingType w : {model.winding, model.winding == WindingType::Wye ? WindingType::Delta
                                                                          : WindingType::Wye}) {
    const double r_ll = convert(FrameTaggedQuantity(model.r_phase, QuantityKind::Resistance,
                                                    ReferenceFrame::Phase),
                                ReferenceFrame::LineToLine, w)
                            .value();
    const double right_loss = resistive_power_loss(QAxisCurrent(iq), PhaseResistance(model.r_phase));
    const double wrong_loss = iq * iq * r_ll;
    rows.push_back({"terminal resistance used as phase resistance", w, wrong_loss, right_loss,
                    wrong_loss / right_loss, "P = Iq^2 R_phase, not Iq^2 R_ll"});

    const double kb_ll = convert(FrameTaggedQuantity(model.ktq, QuantityKind::TorqueConstant,
                                                     ReferenceFrame::QAxis),
                                 QuantityKind::BackEmfConstant, ReferenceFrame::LineToLine, w)
                             .value();
    const double right_torque = torque(QAxisTorqueConstant(model.ktq), QAxisCurrent(iq));
    const double wrong_torque = kb_ll * iq;
    rows.push_back({"1/Kv_ll used as q-axis torque constant", w, wrong_torque, right_torque,
                    wrong_torque / right_torque,
                    w == WindingType::Wye ? "tau = Kb_ll/sqrt(2) Iq, not Kb_ll Iq"
                                          : "tau = sqrt(3/2) Kb_ll Iq, not Kb_ll Iq"});
  }
  return rows;
}

}  // namespace bldc
