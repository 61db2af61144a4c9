#pragma once

// Power-invariant Clarke/Park/d-q transforms. Angles are magnetic angles
// (theta = pole_pairs * rotor angle); the rotor-to-magnetic conversion lives in
// the dynamics module.

namespace bldc {

struct ThreePhaseVector {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double sum() const noexcept { return a + b + c; }
  double dot(const ThreePhaseVector& o) const noexcept { return a * o.a + b * o.b + c * o.c; }
  double max_abs() const noexcept;
};

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

struct DQVector {
  double d = 0.0;
  double q = 0.0;
};

AlphaBeta clarke(const ThreePhaseVector& v) noexcept;

DQVector park(const AlphaBeta& ab, double theta) noexcept;

/// park(clarke(v), theta), evaluated with the composed 2x3 matrix.
DQVector dq_transform(const ThreePhaseVector& v, double theta) noexcept;

/// Right inverse of dq_transform with a zero zero-sequence component; the
/// output is balanced.
ThreePhaseVector inverse_dq(const DQVector& dq, double theta) noexcept;

/// Balanced sinusoid in phase with the per-phase torque constants:
/// (-A sin(theta), -A sin(theta - 2pi/3), -A sin(theta + 2pi/3)).
ThreePhaseVector synth_balanced(double amplitude, double theta) noexcept;

/// Per-unit phase shape shared by the back-EMF and torque constants:
/// (-sin(theta), -sin(theta - 2pi/3), -sin(theta + 2pi/3)).
ThreePhaseVector phase_profile(double theta) noexcept;

}  // namespace bldc
