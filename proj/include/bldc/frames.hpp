#pragma once

// Winding reference frames and frame-tagged quantities.
//
// Every electrical quantity handled by the toolkit carries the frame it is
// expressed in (phase, line, line-to-line, q-axis or single-phase RMS). All
// frame changes go through `convert`, which routes through the phase frame,
// so a terminal resistance can never silently stand in for a phase resistance.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "bldc/error.hpp"

namespace bldc {

enum class WindingType { Wye, Delta };

enum class ReferenceFrame { Phase, Line, LineToLine, QAxis, SinglePhaseRMS };

// Values are SI: A, V, ohm, H, Nm/A, V*s/rad, rad/(V*s).
enum class QuantityKind {
  Current,
  Voltage,
  Resistance,
  Inductance,
  TorqueConstant,
  BackEmfConstant,
  VelocityConstant,
};

std::string_view to_string(WindingType w) noexcept;
std::string_view to_string(ReferenceFrame f) noexcept;
std::string_view to_string(QuantityKind k) noexcept;
std::optional<WindingType> parse_winding(std::string_view text) noexcept;

/// True when a quantity of kind `k` can be expressed in frame `f`. There is no
/// line-to-line current and no line voltage.
constexpr bool frame_allowed(QuantityKind k, ReferenceFrame f) noexcept {
  using enum ReferenceFrame;
  switch (k) {
    case QuantityKind::Current:
      return f == Phase || f == Line || f == QAxis || f == SinglePhaseRMS;
    case QuantityKind::Voltage:
      return f == Phase || f == LineToLine || f == QAxis || f == SinglePhaseRMS;
    case QuantityKind::Resistance:
      return f == Phase || f == LineToLine;
    case QuantityKind::Inductance:
      return f == Phase || f == LineToLine || f == QAxis;
    case QuantityKind::TorqueConstant:
      return f == Phase || f == LineToLine || f == QAxis || f == SinglePhaseRMS;
    case QuantityKind::BackEmfConstant:
    case QuantityKind::VelocityConstant:
      return f == Phase || f == LineToLine || f == QAxis;
  }
  return false;
}

constexpr bool requires_positive(QuantityKind k) noexcept {
  return k != QuantityKind::Current && k != QuantityKind::Voltage;
}

/// The amplitude flag a quantity of this kind carries in this frame when it is
/// a conversion-ready value. Sinusoidal frames (phase, line, line-to-line) hold
/// amplitudes; q-axis and RMS values are DC; resistance and inductance are
/// never sinusoids.
constexpr bool canonical_amplitude(QuantityKind k, ReferenceFrame f) noexcept {
  if (k == QuantityKind::Resistance || k == QuantityKind::Inductance) return false;
  return f == ReferenceFrame::Phase || f == ReferenceFrame::Line ||
         f == ReferenceFrame::LineToLine;
}

class FrameTaggedQuantity {
 public:
  /// Builds a quantity with the canonical amplitude flag for (kind, frame).
  FrameTaggedQuantity(double value, QuantityKind kind, ReferenceFrame frame);

  /// `amplitude = false` on a phase/line current or voltage marks an
  /// instantaneous sample; such values are valid but only convert to their own
  /// frame.
  FrameTaggedQuantity(double value, QuantityKind kind, ReferenceFrame frame, bool amplitude);

  double value() const noexcept { return value_; }
  QuantityKind kind() const noexcept { return kind_; }
  ReferenceFrame frame() const noexcept { return frame_; }
  bool amplitude() const noexcept { return amplitude_; }

  std::string describe() const;

 private:
  double value_;
  QuantityKind kind_;
  ReferenceFrame frame_;
  bool amplitude_;
};

/// Factor f such that value_in(target) = f * value_in(source) for `kind`.
/// Throws UnsupportedConversion when either frame is not allowed for `kind`.
double conversion_factor(QuantityKind kind, ReferenceFrame source, ReferenceFrame target,
                         WindingType w);

FrameTaggedQuantity convert(const FrameTaggedQuantity& q, ReferenceFrame target, WindingType w);

/// Converts across the motor-constant family as well as frames. Torque and
/// back-EMF constants are identical in SI in the phase, line-to-line and
/// q-axis frames; the velocity constant is their reciprocal.
FrameTaggedQuantity convert(const FrameTaggedQuantity& q, QuantityKind target_kind,
                            ReferenceFrame target, WindingType w);

/// Compile-time frame tag. A `Tagged<Current, LineToLine>` does not exist, and
/// functions taking e.g. a `PhaseResistance` reject a `TerminalResistance` at
/// compile time.
template <QuantityKind K, ReferenceFrame F>
  requires(frame_allowed(K, F))
class Tagged {
 public:
  static constexpr QuantityKind kind = K;
  static constexpr ReferenceFrame frame = F;

  explicit Tagged(double value) : value_(FrameTaggedQuantity(value, K, F).value()) {}

  explicit Tagged(const FrameTaggedQuantity& q) : value_(q.value()) {
    if (q.kind() != K || q.frame() != F || q.amplitude() != canonical_amplitude(K, F)) {
      throw Error(ErrorCode::MismatchedFrames,
                  "expected " + std::string(to_string(K)) + " in the " +
                      std::string(to_string(F)) + " frame, got " + q.describe());
    }
  }

  double value() const noexcept { return value_; }
  FrameTaggedQuantity tagged() const { return FrameTaggedQuantity(value_, K, F); }

 private:
  double value_;
};

using PhaseResistance = Tagged<QuantityKind::Resistance, ReferenceFrame::Phase>;
using TerminalResistance = Tagged<QuantityKind::Resistance, ReferenceFrame::LineToLine>;
using QAxisCurrent = Tagged<QuantityKind::Current, ReferenceFrame::QAxis>;
using PhaseCurrentAmplitude = Tagged<QuantityKind::Current, ReferenceFrame::Phase>;
using LineCurrentAmplitude = Tagged<QuantityKind::Current, ReferenceFrame::Line>;
using QAxisTorqueConstant = Tagged<QuantityKind::TorqueConstant, ReferenceFrame::QAxis>;
using LineBackEmfConstant = Tagged<QuantityKind::BackEmfConstant, ReferenceFrame::LineToLine>;

/// A resistance/current pairing that is safe to use in a resistive loss
/// calculation: phase resistance with either q-axis current or phase current
/// amplitude.
class ResistanceCurrentPair {
 public:
  double phase_resistance() const noexcept { return r_phase_; }
  double current() const noexcept { return current_; }
  ReferenceFrame current_frame() const noexcept { return current_frame_; }

  /// Total resistive loss of all three phases [W].
  double power() const noexcept;

 private:
  friend ResistanceCurrentPair pair_check(const FrameTaggedQuantity&, const FrameTaggedQuantity&);
  ResistanceCurrentPair(double r, double i, ReferenceFrame f)
      : r_phase_(r), current_(i), current_frame_(f) {}

  double r_phase_;
  double current_;
  ReferenceFrame current_frame_;
};

/// Throws MismatchedFrames (naming the expected frame) for any pairing other
/// than (phase resistance, q-axis current) or (phase resistance, phase current
/// amplitude). Never rescales.
ResistanceCurrentPair pair_check(const FrameTaggedQuantity& resistance,
                                 const FrameTaggedQuantity& current);

}  // namespace bldc
