#include "bldc/frames.hpp"

#include <cmath>
#include <sstream>

namespace bldc {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt3Over2 = std::sqrt(1.5);

// Value of the quantity in `frame` per unit of the same quantity in the phase
// frame. Every conversion is composed from two of these.
double from_phase(QuantityKind kind, ReferenceFrame frame, WindingType w) {
  const bool wye = (w == WindingType::Wye);
  switch (frame) {
    case ReferenceFrame::Phase:
      return 1.0;
    case ReferenceFrame::QAxis:
      switch (kind) {
        case QuantityKind::Resistance:
          break;
        case QuantityKind::Inductance:
          return 1.0;  // Lq equals the effective phase inductance
        case QuantityKind::VelocityConstant:
          return 1.0 / kSqrt3Over2;
        default:
          return kSqrt3Over2;
      }
      break;
    case ReferenceFrame::Line:
      if (kind == QuantityKind::Current) return wye ? 1.0 : kSqrt3;
      break;
    case ReferenceFrame::LineToLine:
      switch (kind) {
        case QuantityKind::Voltage:
        case QuantityKind::BackEmfConstant:
        case QuantityKind::TorqueConstant:
          return wye ? kSqrt3 : 1.0;
        case QuantityKind::VelocityConstant:
          return wye ? 1.0 / kSqrt3 : 1.0;
        case QuantityKind::Resistance:
          return wye ? 2.0 : 2.0 / 3.0;
        case QuantityKind::Inductance:
          return wye ? 2.0 / 3.0 : 2.0;
        case QuantityKind::Current:
          break;
      }
      break;
    case ReferenceFrame::SinglePhaseRMS:
      switch (kind) {
        case QuantityKind::Current:
        case QuantityKind::Voltage:
          return 1.0 / kSqrt2;
        case QuantityKind::TorqueConstant:
          // torque per single-phase RMS amp: tau = 3/2 Kt_phase I_phase = Kt_rms I_phase / sqrt(2)
          return 3.0 / kSqrt2;
        default:
          break;
      }
      break;
  }
  throw Error(ErrorCode::UnsupportedConversion,
              std::string(to_string(kind)) + " has no " + std::string(to_string(frame)) +
                  " representation");
}

void require_frame(QuantityKind kind, ReferenceFrame frame) {
  if (!frame_allowed(kind, frame)) {
    std::string msg = std::string(to_string(kind)) + " cannot be expressed in the " +
                      std::string(to_string(frame)) + " frame";
    if (kind == QuantityKind::Current && frame == ReferenceFrame::LineToLine) {
      msg += " (currents flow within a line; there is no line-to-line current)";
    } else if (kind == QuantityKind::Voltage && frame == ReferenceFrame::Line) {
      msg += " (voltages are measured between lines)";
    }
    throw Error(ErrorCode::UnsupportedConversion, msg);
  }
}

bool motor_constant(QuantityKind k) {
  return k == QuantityKind::TorqueConstant || k == QuantityKind::BackEmfConstant ||
         k == QuantityKind::VelocityConstant;
}

}  // namespace

std::string_view to_string(WindingType w) noexcept {
  return w == WindingType::Wye ? "wye" : "delta";
}

std::string_view to_string(ReferenceFrame f) noexcept {
  switch (f) {
    case ReferenceFrame::Phase: return "phase";
    case ReferenceFrame::Line: return "line";
    case ReferenceFrame::LineToLine: return "line-to-line";
    case ReferenceFrame::QAxis: return "q-axis";
    case ReferenceFrame::SinglePhaseRMS: return "single-phase-rms";
  }
  return "?";
}

std::string_view to_string(QuantityKind k) noexcept {
  switch (k) {
    case QuantityKind::Current: return "current";
    case QuantityKind::Voltage: return "voltage";
    case QuantityKind::Resistance: return "resistance";
    case QuantityKind::Inductance: return "inductance";
    case QuantityKind::TorqueConstant: return "torque constant";
    case QuantityKind::BackEmfConstant: return "back-EMF constant";
    case QuantityKind::VelocityConstant: return "velocity constant";
  }
  return "?";
}

std::optional<WindingType> parse_winding(std::string_view text) noexcept {
  if (text == "wye" || text == "star") return WindingType::Wye;
  if (text == "delta") return WindingType::Delta;
  return std::nullopt;
}

FrameTaggedQuantity::FrameTaggedQuantity(double value, QuantityKind kind, ReferenceFrame frame)
    : FrameTaggedQuantity(value, kind, frame, canonical_amplitude(kind, frame)) {}

FrameTaggedQuantity::FrameTaggedQuantity(double value, QuantityKind kind, ReferenceFrame frame,
                                         bool amplitude)
    : value_(value), kind_(kind), frame_(frame), amplitude_(amplitude) {
  require_frame(kind, frame);
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteValue, "non-finite " + std::string(to_string(kind)));
  }
  if (requires_positive(kind) && !(value > 0.0)) {
    throw Error(ErrorCode::NonPositiveValue,
                std::string(to_string(kind)) + " must be positive, got " + std::to_string(value));
  }
  if (amplitude && !canonical_amplitude(kind, frame)) {
    throw Error(ErrorCode::InvalidValue, std::string(to_string(kind)) + " in the " +
                                             std::string(to_string(frame)) +
                                             " frame cannot be a sinusoid amplitude");
  }
  if (!amplitude && canonical_amplitude(kind, frame) && motor_constant(kind)) {
    throw Error(ErrorCode::InvalidValue,
                std::string(to_string(kind)) + " in the " + std::string(to_string(frame)) +
                    " frame is only meaningful as an amplitude");
  }
}

std::string FrameTaggedQuantity::describe() const {
  std::ostringstream os;
  os << (amplitude_ ? "amplitude " : "") << to_string(kind_) << " " << value_ << " ["
     << to_string(frame_) << "]";
  return os.str();
}

double conversion_factor(QuantityKind kind, ReferenceFrame source, ReferenceFrame target,
                         WindingType w) {
  require_frame(kind, source);
  require_frame(kind, target);
  if (source == target) return 1.0;
  return from_phase(kind, target, w) / from_phase(kind, source, w);
}

FrameTaggedQuantity convert(const FrameTaggedQuantity& q, ReferenceFrame target, WindingType w) {
  return convert(q, q.kind(), target, w);
}

FrameTaggedQuantity convert(const FrameTaggedQuantity& q, QuantityKind target_kind,
                            ReferenceFrame target, WindingType w) {
  require_frame(target_kind, target);
  if (q.kind() == target_kind && q.frame() == target) return q;

  if (q.amplitude() != canonical_amplitude(q.kind(), q.frame())) {
    throw Error(ErrorCode::UnsupportedConversion,
                "instantaneous " + q.describe() + " has no scalar equivalent in another frame");
  }

  double phase_value = q.value() / from_phase(q.kind(), q.frame(), w);
  if (q.kind() != target_kind) {
    if (!motor_constant(q.kind()) || !motor_constant(target_kind)) {
      throw Error(ErrorCode::UnsupportedConversion,
                  std::string("cannot convert ") + std::string(to_string(q.kind())) + " to " +
                      std::string(to_string(target_kind)));
    }
    // Kt and Kb coincide per phase in SI; Kv is the reciprocal of Kb.
    require_frame(target_kind, ReferenceFrame::Phase);
    const bool src_inv = q.kind() == QuantityKind::VelocityConstant;
    const bool dst_inv = target_kind == QuantityKind::VelocityConstant;
    if (src_inv != dst_inv) phase_value = 1.0 / phase_value;
  }
  return FrameTaggedQuantity(phase_value * from_phase(target_kind, target, w), target_kind,
                             target);
}

double ResistanceCurrentPair::power() const noexcept {
  if (current_frame_ == ReferenceFrame::QAxis) return current_ * current_ * r_phase_;
  return 1.5 * current_ * current_ * r_phase_;
}

ResistanceCurrentPair pair_check(const FrameTaggedQuantity& resistance,
                                 const FrameTaggedQuantity& current) {
  if (resistance.kind() != QuantityKind::Resistance) {
    throw Error(ErrorCode::MismatchedFrames,
                "expected a resistance, got " + resistance.describe());
  }
  if (current.kind() != QuantityKind::Current) {
    throw Error(ErrorCode::MismatchedFrames, "expected a current, got " + current.describe());
  }
  if (resistance.frame() != ReferenceFrame::Phase) {
    throw Error(ErrorCode::MismatchedFrames,
                "resistive loss needs the phase-frame resistance, got " + resistance.describe() +
                    "; convert terminal resistance with the winding type first");
  }
  const bool qaxis = current.frame() == ReferenceFrame::QAxis;
  const bool phase_amp = current.frame() == ReferenceFrame::Phase && current.amplitude();
  if (!qaxis && !phase_amp) {
    throw Error(ErrorCode::MismatchedFrames,
                "phase resistance pairs with the q-axis current or the phase current amplitude, "
                "got " + current.describe());
  }
  return ResistanceCurrentPair(resistance.value(), current.value(), current.frame());
}

}  // namespace bldc
