#pragma once

// Fixed-step RK4 simulation of three motor models:
//  - ideal brushed DC motor (armature current, rotor angle, rotor speed)
//  - q-axis brushed analogue of a BLDC motor (same equations, q-axis parameters)
//  - full three-phase BLDC model with sinusoidal back-EMF and decoupled phase
//    circuits using the effective inductance Le = Ls - Lm.
//
// Sign conventions: positive torque accelerates the rotor positively; back-EMF
// opposes the applied voltage. The magnetic angle is pole_pairs * theta_r.

#include <cstddef>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "bldc/datasheet.hpp"
#include "bldc/transforms.hpp"

namespace bldc {

inline constexpr double kDefaultTimeStep = 1e-5;
inline constexpr double kDivergenceLimit = 1e12;

struct BrushedParams {
  double kt = 0.0;          // Nm/A
  double kb = 0.0;          // V s/rad
  double resistance = 0.0;  // ohm
  double inductance = 0.0;  // H
  double inertia = 0.0;     // kg m^2
  double damping = 0.0;     // Nm s/rad

  static BrushedParams from_model(const QAxisMotorModel& m) noexcept {
    return {m.ktq, m.kbq, m.r_phase, m.l_effective, m.inertia, m.damping};
  }
};

/// Armature (brushed) or q-axis current with the rotor's mechanical state.
struct QAxisState {
  double iq = 0.0;       // A
  double theta_r = 0.0;  // rad, rotor
  double omega = 0.0;    // rad/s, rotor
};

struct ThreePhaseState {
  ThreePhaseVector i_abc;  // A
  double theta_r = 0.0;
  double omega = 0.0;
};

/// Load torque as a function of time: constant, a step, or a table with
/// linear interpolation (held constant outside the table).
class LoadProfile {
 public:
  static LoadProfile constant(double torque);
  static LoadProfile step(double t_step, double before, double after);
  static LoadProfile table(std::vector<std::pair<double, double>> points);

  /// Table from text: one `t tau` or `t, tau` pair per line, `#` comments.
  static LoadProfile parse_table(std::string_view text);

  LoadProfile() = default;
  double operator()(double t) const noexcept;

 private:
  enum class Kind { Constant, Step, Table };
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  double t_step_ = 0.0;
  double after_ = 0.0;
  std::vector<double> times_;
  std::vector<double> torques_;
};

/// Ideal angle-tracking drive. Voltage mode commands Vq (the d-axis voltage
/// needed to hold Id = 0 is supplied automatically); current mode imposes a
/// constant Iq directly, bypassing the electrical dynamics.
struct Controller {
  enum class Mode { Voltage, Current };
  Mode mode = Mode::Voltage;
  std::function<double(double)> command;  // Vq(t) [V] or Iq [A]

  static Controller voltage(double vq);
  static Controller voltage(std::function<double(double)> vq);
  static Controller current(double iq);
};

enum class ModelSelector { Brushed, QAxis, ThreePhase };

std::string_view to_string(ModelSelector m) noexcept;

QAxisState step_brushed(const QAxisState& state, const BrushedParams& params, double v_applied,
                        double tau_load, double dt);

QAxisState step_qaxis(const QAxisState& state, const QAxisMotorModel& model, double vq,
                      double tau_load, double dt);

/// Phase voltages held constant over the step. Throws UnbalancedInput if they
/// do not sum to zero.
ThreePhaseState step_threephase(const ThreePhaseState& state, const QAxisMotorModel& model,
                                const ThreePhaseVector& v_abc, double tau_load, double dt);

using PhaseVoltageLaw = std::function<ThreePhaseVector(double t, const ThreePhaseState&)>;
using LoadLaw = std::function<double(double t)>;

/// Phase voltages evaluated at every RK4 stage.
ThreePhaseState step_threephase(const ThreePhaseState& state, const QAxisMotorModel& model,
                                const PhaseVoltageLaw& v_abc, const LoadLaw& tau_load, double t,
                                double dt);

/// Voltage law of the ideal field-oriented drive: Vq as commanded and
/// Vd = R Id - p omega Le Iq, which holds Id at its initial value.
PhaseVoltageLaw ideal_foc_voltage(const QAxisMotorModel& model, std::function<double(double)> vq);

/// Total electromagnetic torque of the three phases, sum of Kt_x(theta) i_x.
double phase_torque(const QAxisMotorModel& model, const ThreePhaseVector& i_abc,
                    double theta_magnetic) noexcept;

struct InitialState {
  double iq = 0.0;  // ignored in current mode
  double theta_r = 0.0;
  double omega = 0.0;
};

struct RunOptions {
  double t_end = 0.0;
  double dt = kDefaultTimeStep;
  InitialState initial;
  std::size_t record_every = 1;  // the final sample is always kept
};

/// Time series of one simulation. All vectors share the length of `time`;
/// `phase_currents` is filled for three-phase runs only. Energies are
/// cumulative integrals from t = 0, integrated with the state.
struct SimTrace {
  ModelSelector model = ModelSelector::QAxis;
  double inductance = 0.0;  // for the stored magnetic energy
  double inertia = 0.0;

  std::vector<double> time;
  std::vector<double> iq;  // armature / q-axis current; d-q projection for three-phase
  std::vector<double> id;  // zero for the single-current models
  std::vector<ThreePhaseVector> phase_currents;
  std::vector<double> theta_r;
  std::vector<double> omega;
  std::vector<double> torque;
  std::vector<double> power_loss;
  std::vector<double> back_emf_q;
  std::vector<double> voltage_q;
  std::vector<double> voltage_d;  // d-axis voltage the ideal drive applies
  std::vector<double> energy_in;
  std::vector<double> energy_loss;
  std::vector<double> energy_mech;  // load work plus viscous damping

  std::size_t size() const noexcept { return time.size(); }
};

SimTrace run(const QAxisMotorModel& model, const Controller& controller, const LoadProfile& load,
             ModelSelector which, const RunOptions& options);

SimTrace run(const QAxisMotorModel& model, const Controller& controller, const LoadProfile& load,
             double t_end, double dt, ModelSelector which);

SimTrace run_brushed(const BrushedParams& params, const Controller& controller,
                     const LoadProfile& load, const RunOptions& options);

struct EnergyBalance {
  double electrical_in = 0.0;
  double resistive_loss = 0.0;
  double kinetic_change = 0.0;
  double magnetic_change = 0.0;
  double mechanical_out = 0.0;  // load + damping
  double residual = 0.0;

  /// |residual| relative to the largest term.
  double relative_residual() const noexcept;
};

/// Energy bookkeeping between the first and last sample of a trace. Requires
/// Kt == Kb, as for any QAxisMotorModel.
EnergyBalance energy_balance(const SimTrace& trace);

}  // namespace bldc
