#include "bldc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bldc/format.hpp"
#include "bldc/rk4.hpp"

namespace bldc {

namespace {

void require_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "time step must be positive and finite");
  }
}

template <std::size_t N>
bool finite_and_bounded(const StateArray<N>& x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v) && std::abs(v) <= kDivergenceLimit; });
}

void require_balanced(const ThreePhaseVector& v) {
  if (std::abs(v.sum()) > 1e-9 * std::max(1.0, v.max_abs())) {
    throw Error(ErrorCode::UnbalancedInput,
                "phase voltages must sum to zero, got sum " + format_sig(v.sum(), 6));
  }
}

// [i, theta_r, omega]
StateArray<3> dc_derivative(const BrushedParams& p, const StateArray<3>& x, double v, double tau) {
  const double i = x[0];
  const double w = x[2];
  return {(v - p.resistance * i - p.kb * w) / p.inductance, w,
          (p.kt * i - p.damping * w - tau) / p.inertia};
}

// [ia, ib, ic, theta_r, omega]
StateArray<5> phase_derivative(const QAxisMotorModel& m, const StateArray<5>& x,
                               const ThreePhaseVector& v, double tau) {
  const ThreePhaseVector kb = phase_profile(m.pole_pairs * x[3]);
  const double amp = m.phase_constant_amplitude();
  const double w = x[4];
  const double inv_l = 1.0 / m.l_effective;
  const double torque = amp * (kb.a * x[0] + kb.b * x[1] + kb.c * x[2]);
  return {(v.a - m.r_phase * x[0] - amp * kb.a * w) * inv_l,
          (v.b - m.r_phase * x[1] - amp * kb.b * w) * inv_l,
          (v.c - m.r_phase * x[2] - amp * kb.c * w) * inv_l, w,
          (torque - m.damping * w - tau) / m.inertia};
}

StateArray<5> pack(const ThreePhaseState& s) {
  return {s.i_abc.a, s.i_abc.b, s.i_abc.c, s.theta_r, s.omega};
}

ThreePhaseState unpack(const StateArray<5>& x) { return {{x[0], x[1], x[2]}, x[3], x[4]}; }

std::size_t step_count(const RunOptions& o) {
  require_step(o.dt);
  if (!(o.t_end >= 0.0) || !std::isfinite(o.t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must be finite and >= 0");
  }
  const double ratio = o.t_end / o.dt;
  if (ratio > 1e8) throw Error(ErrorCode::InvalidArgument, "t_end / dt exceeds 1e8 steps");
  if (o.record_every == 0) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
  // Tolerate t_end being a multiple of dt up to rounding.
  return static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
}

template <std::size_t N, class Derivative, class Record>
void integrate(StateArray<N> x, Derivative&& f, Record&& record, const RunOptions& o) {
  const std::size_t n = step_count(o);
  record(0.0, x);
  CompensatedRk4<N> rk4(x);
  for (std::size_t k = 1; k <= n; ++k) {
    rk4.step(f, static_cast<double>(k - 1) * o.dt, o.dt);
    const double t = static_cast<double>(k) * o.dt;
    if (!finite_and_bounded(rk4.state())) throw NonFiniteState(k, t);
    if (k % o.record_every == 0 || k == n) record(t, rk4.state());
  }
}

SimTrace make_trace(ModelSelector which, double inductance, double inertia) {
  SimTrace tr;
  tr.model = which;
  tr.inductance = inductance;
  tr.inertia = inertia;
  return tr;
}

void push_common(SimTrace& tr, double t, double iq, double id, double theta, double omega,
                 double torque, double loss, double bemf, double vq, double vd, double e_in,
                 double e_loss, double e_mech) {
  tr.time.push_back(t);
  tr.iq.push_back(iq);
  tr.id.push_back(id);
  tr.theta_r.push_back(theta);
  tr.omega.push_back(omega);
  tr.torque.push_back(torque);
  tr.power_loss.push_back(loss);
  tr.back_emf_q.push_back(bemf);
  tr.voltage_q.push_back(vq);
  tr.voltage_d.push_back(vd);
  tr.energy_in.push_back(e_in);
  tr.energy_loss.push_back(e_loss);
  tr.energy_mech.push_back(e_mech);
}

// Shared by the brushed and q-axis models; `pole_pairs` = 0 marks the brushed
// motor, which has no d axis.
SimTrace run_single_current(const BrushedParams& p, int pole_pairs, ModelSelector which,
                            const Controller& controller, const LoadProfile& load,
                            const RunOptions& o) {
  SimTrace tr = make_trace(which, p.inductance, p.inertia);
  const auto& cmd = controller.command;

  if (controller.mode == Controller::Mode::Voltage) {
    // [i, theta_r, omega, E_in, E_loss, E_mech]
    auto f = [&](double t, const StateArray<6>& x) {
      const double v = cmd(t);
      const double tau = load(t);
      const auto d = dc_derivative(p, {x[0], x[1], x[2]}, v, tau);
      return StateArray<6>{d[0], d[1], d[2], v * x[0], p.resistance * x[0] * x[0],
                           tau * x[2] + p.damping * x[2] * x[2]};
    };
    auto rec = [&](double t, const StateArray<6>& x) {
      const double vd = -static_cast<double>(pole_pairs) * x[2] * p.inductance * x[0];
      push_common(tr, t, x[0], 0.0, x[1], x[2], p.kt * x[0], p.resistance * x[0] * x[0],
                  p.kb * x[2], cmd(t), vd, x[3], x[4], x[5]);
    };
    integrate<6>({o.initial.iq, o.initial.theta_r, o.initial.omega, 0.0, 0.0, 0.0}, f, rec, o);
  } else {
    const double i = cmd(0.0);
    // [theta_r, omega, E_in, E_loss, E_mech]
    auto f = [&](double t, const StateArray<5>& x) {
      const double tau = load(t);
      const double v = p.resistance * i + p.kb * x[1];
      return StateArray<5>{x[1], (p.kt * i - p.damping * x[1] - tau) / p.inertia, v * i,
                           p.resistance * i * i, tau * x[1] + p.damping * x[1] * x[1]};
    };
    auto rec = [&](double t, const StateArray<5>& x) {
      const double vd = -static_cast<double>(pole_pairs) * x[1] * p.inductance * i;
      push_common(tr, t, i, 0.0, x[0], x[1], p.kt * i, p.resistance * i * i, p.kb * x[1],
                  p.resistance * i + p.kb * x[1], vd, x[2], x[3], x[4]);
    };
    integrate<5>({o.initial.theta_r, o.initial.omega, 0.0, 0.0, 0.0}, f, rec, o);
  }
  return tr;
}

SimTrace run_three_phase(const QAxisMotorModel& m, const Controller& controller,
                         const LoadProfile& load, const RunOptions& o) {
  SimTrace tr = make_trace(ModelSelector::ThreePhase, m.l_effective, m.inertia);
  const double amp = m.phase_constant_amplitude();
  const double p = static_cast<double>(m.pole_pairs);

  auto record = [&](double t, const ThreePhaseVector& i, double theta_r, double omega,
                    const ThreePhaseVector& v, const StateArray<3>& energy) {
    const double theta = p * theta_r;
    const ThreePhaseVector kb = phase_profile(theta);
    const DQVector i_dq = dq_transform(i, theta);
    const DQVector v_dq = dq_transform(v, theta);
    const DQVector e_dq = dq_transform({amp * kb.a * omega, amp * kb.b * omega, amp * kb.c * omega},
                                       theta);
    push_common(tr, t, i_dq.q, i_dq.d, theta_r, omega, phase_torque(m, i, theta),
                m.r_phase * i.dot(i), e_dq.q, v_dq.q, v_dq.d, energy[0], energy[1], energy[2]);
    tr.phase_currents.push_back(i);
  };

  if (controller.mode == Controller::Mode::Voltage) {
    const PhaseVoltageLaw law = ideal_foc_voltage(m, controller.command);
    // [ia, ib, ic, theta_r, omega, E_in, E_loss, E_mech]
    auto f = [&](double t, const StateArray<8>& x) {
      const ThreePhaseState s{{x[0], x[1], x[2]}, x[3], x[4]};
      const ThreePhaseVector v = law(t, s);
      const double tau = load(t);
      const auto d = phase_derivative(m, {x[0], x[1], x[2], x[3], x[4]}, v, tau);
      return StateArray<8>{d[0], d[1], d[2], d[3], d[4], v.dot(s.i_abc),
                           m.r_phase * s.i_abc.dot(s.i_abc),
                           tau * x[4] + m.damping * x[4] * x[4]};
    };
    auto rec = [&](double t, const StateArray<8>& x) {
      const ThreePhaseState s{{x[0], x[1], x[2]}, x[3], x[4]};
      record(t, s.i_abc, x[3], x[4], law(t, s), {x[5], x[6], x[7]});
    };
    const ThreePhaseVector i0 = inverse_dq({0.0, o.initial.iq}, p * o.initial.theta_r);
    integrate<8>({i0.a, i0.b, i0.c, o.initial.theta_r, o.initial.omega, 0.0, 0.0, 0.0}, f, rec, o);
  } else {
    const double iq = controller.command(0.0);
    // Currents follow the rotor exactly; the drive supplies whatever voltage
    // that takes, v = R i + Le di/dt + e.
    auto phase_state = [&](double theta_r, double omega, ThreePhaseVector& i, ThreePhaseVector& v) {
      const double theta = p * theta_r;
      i = inverse_dq({0.0, iq}, theta);
      const ThreePhaseVector di = inverse_dq({-p * omega * iq, 0.0}, theta);  // d/dt at fixed iq
      const ThreePhaseVector kb = phase_profile(theta);
      v = {m.r_phase * i.a + m.l_effective * di.a + amp * kb.a * omega,
           m.r_phase * i.b + m.l_effective * di.b + amp * kb.b * omega,
           m.r_phase * i.c + m.l_effective * di.c + amp * kb.c * omega};
    };
    // [theta_r, omega, E_in, E_loss, E_mech]
    auto f = [&](double t, const StateArray<5>& x) {
      ThreePhaseVector i;
      ThreePhaseVector v;
      phase_state(x[0], x[1], i, v);
      const double tau = load(t);
      const double torque = phase_torque(m, i, p * x[0]);
      return StateArray<5>{x[1], (torque - m.damping * x[1] - tau) / m.inertia, v.dot(i),
                           m.r_phase * i.dot(i), tau * x[1] + m.damping * x[1] * x[1]};
    };
    auto rec = [&](double t, const StateArray<5>& x) {
      ThreePhaseVector i;
      ThreePhaseVector v;
      phase_state(x[0], x[1], i, v);
      record(t, i, x[0], x[1], v, {x[2], x[3], x[4]});
    };
    integrate<5>({o.initial.theta_r, o.initial.omega, 0.0, 0.0, 0.0}, f, rec, o);
  }
  return tr;
}

}  // namespace

LoadProfile LoadProfile::constant(double torque) {
  if (!std::isfinite(torque)) throw Error(ErrorCode::NonFiniteValue, "load torque must be finite");
  LoadProfile lp;
  lp.kind_ = Kind::Constant;
  lp.value_ = torque;
  return lp;
}

LoadProfile LoadProfile::step(double t_step, double before, double after) {
  if (!std::isfinite(t_step) || !std::isfinite(before) || !std::isfinite(after)) {
    throw Error(ErrorCode::NonFiniteValue, "load step must be finite");
  }
  LoadProfile lp;
  lp.kind_ = Kind::Step;
  lp.t_step_ = t_step;
  lp.value_ = before;
  lp.after_ = after;
  return lp;
}

LoadProfile LoadProfile::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "load table is empty");
  LoadProfile lp;
  lp.kind_ = Kind::Table;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto [t, tau] = points[k];
    if (!std::isfinite(t) || !std::isfinite(tau)) {
      throw Error(ErrorCode::NonFiniteValue, "load table entries must be finite");
    }
    if (k > 0 && !(t > points[k - 1].first)) {
      throw Error(ErrorCode::InvalidArgument, "load table times must be strictly increasing");
    }
    lp.times_.push_back(t);
    lp.torques_.push_back(tau);
  }
  return lp;
}

LoadProfile LoadProfile::parse_table(std::string_view text) {
  std::vector<std::pair<double, double>> points;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string line(text.substr(0, nl));
    text = (nl == std::string_view::npos) ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    if (trim(line).empty()) continue;
    std::istringstream is(line);
    std::string a;
    std::string b;
    std::string extra;
    is >> a >> b >> extra;
    const auto t = parse_double(a);
    const auto tau = parse_double(b);
    if (!t || !tau || !extra.empty()) {
      throw SyntaxError(number, std::string(trim(line)), "expected 'time torque'");
    }
    points.emplace_back(*t, *tau);
  }
  return table(std::move(points));
}

double LoadProfile::operator()(double t) const noexcept {
  switch (kind_) {
    case Kind::Constant:
      return value_;
    case Kind::Step:
      return t < t_step_ ? value_ : after_;
    case Kind::Table: {
      if (t <= times_.front()) return torques_.front();
      if (t >= times_.back()) return torques_.back();
      const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t k = static_cast<std::size_t>(hi - times_.begin());
      const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
      return torques_[k - 1] + w * (torques_[k] - torques_[k - 1]);
    }
  }
  return 0.0;
}

Controller Controller::voltage(double vq) {
  return {Mode::Voltage, [vq](double) { return vq; }};
}

Controller Controller::voltage(std::function<double(double)> vq) {
  return {Mode::Voltage, std::move(vq)};
}

Controller Controller::current(double iq) {
  return {Mode::Current, [iq](double) { return iq; }};
}

std::string_view to_string(ModelSelector m) noexcept {
  switch (m) {
    case ModelSelector::Brushed: return "brushed";
    case ModelSelector::QAxis: return "brushed-analogue";
    case ModelSelector::ThreePhase: return "three-phase";
  }
  return "?";
}

QAxisState step_brushed(const QAxisState& state, const BrushedParams& params, double v_applied,
                        double tau_load, double dt) {
  require_step(dt);
  if (!(params.inductance > 0.0) || !(params.inertia > 0.0)) {
    throw Error(ErrorCode::NonPositiveValue, "inductance and inertia must be positive");
  }
  const auto x = rk4_step(
      [&](double, const StateArray<3>& s) { return dc_derivative(params, s, v_applied, tau_load); },
      0.0, StateArray<3>{state.iq, state.theta_r, state.omega}, dt);
  if (!finite_and_bounded(x)) throw NonFiniteState(1, dt);
  return {x[0], x[1], x[2]};
}

QAxisState step_qaxis(const QAxisState& state, const QAxisMotorModel& model, double vq,
                      double tau_load, double dt) {
  return step_brushed(state, BrushedParams::from_model(model), vq, tau_load, dt);
}

ThreePhaseState step_threephase(const ThreePhaseState& state, const QAxisMotorModel& model,
                                const ThreePhaseVector& v_abc, double tau_load, double dt) {
  require_balanced(v_abc);
  return step_threephase(
      state, model, [&](double, const ThreePhaseState&) { return v_abc; },
      [&](double) { return tau_load; }, 0.0, dt);
}

ThreePhaseState step_threephase(const ThreePhaseState& state, const QAxisMotorModel& model,
                                const PhaseVoltageLaw& v_abc, const LoadLaw& tau_load, double t,
                                double dt) {
  require_step(dt);
  const auto x = rk4_step(
      [&](double ts, const StateArray<5>& s) {
        const ThreePhaseVector v = v_abc(ts, unpack(s));
        require_balanced(v);
        return phase_derivative(model, s, v, tau_load(ts));
      },
      t, pack(state), dt);
  if (!finite_and_bounded(x)) throw NonFiniteState(1, t + dt);
  return unpack(x);
}

PhaseVoltageLaw ideal_foc_voltage(const QAxisMotorModel& model, std::function<double(double)> vq) {
  return [model, vq = std::move(vq)](double t, const ThreePhaseState& s) {
    const double theta = model.pole_pairs * s.theta_r;
    const DQVector i = dq_transform(s.i_abc, theta);
    const double vd = model.r_phase * i.d - model.pole_pairs * s.omega * model.l_effective * i.q;
    return inverse_dq({vd, vq(t)}, theta);
  };
}

double phase_torque(const QAxisMotorModel& model, const ThreePhaseVector& i_abc,
                    double theta_magnetic) noexcept {
  return model.phase_constant_amplitude() * phase_profile(theta_magnetic).dot(i_abc);
}

SimTrace run(const QAxisMotorModel& model, const Controller& controller, const LoadProfile& load,
             ModelSelector which, const RunOptions& options) {
  model.validate();
  if (!controller.command) throw Error(ErrorCode::InvalidArgument, "controller has no command");
  switch (which) {
    case ModelSelector::Brushed:
      return run_single_current(BrushedParams::from_model(model), 0, ModelSelector::Brushed,
                                controller, load, options);
    case ModelSelector::QAxis:
      return run_single_current(BrushedParams::from_model(model), model.pole_pairs,
                                ModelSelector::QAxis, controller, load, options);
    case ModelSelector::ThreePhase:
      return run_three_phase(model, controller, load, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model selector");
}

SimTrace run(const QAxisMotorModel& model, const Controller& controller, const LoadProfile& load,
             double t_end, double dt, ModelSelector which) {
  RunOptions o;
  o.t_end = t_end;
  o.dt = dt;
  return run(model, controller, load, which, o);
}

SimTrace run_brushed(const BrushedParams& params, const Controller& controller,
                     const LoadProfile& load, const RunOptions& options) {
  if (!(params.inductance > 0.0) || !(params.inertia > 0.0) || !(params.resistance > 0.0)) {
    throw Error(ErrorCode::NonPositiveValue, "resistance, inductance and inertia must be positive");
  }
  if (!controller.command) throw Error(ErrorCode::InvalidArgument, "controller has no command");
  return run_single_current(params, 0, ModelSelector::Brushed, controller, load, options);
}

double EnergyBalance::relative_residual() const noexcept {
  const double scale = std::max({std::abs(electrical_in), std::abs(resistive_loss),
                                 std::abs(kinetic_change), std::abs(magnetic_change),
                                 std::abs(mechanical_out)});
  return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual);
}

EnergyBalance energy_balance(const SimTrace& tr) {
  if (tr.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty trace");
  const std::size_t last = tr.size() - 1;
  auto current_sq = [&](std::size_t k) {
    if (!tr.phase_currents.empty()) return tr.phase_currents[k].dot(tr.phase_currents[k]);
    return tr.iq[k] * tr.iq[k] + tr.id[k] * tr.id[k];
  };
  EnergyBalance e;
  e.electrical_in = tr.energy_in[last] - tr.energy_in[0];
  e.resistive_loss = tr.energy_loss[last] - tr.energy_loss[0];
  e.mechanical_out = tr.energy_mech[last] - tr.energy_mech[0];
  e.kinetic_change = 0.5 * tr.inertia * (tr.omega[last] * tr.omega[last] - tr.omega[0] * tr.omega[0]);
  e.magnetic_change = 0.5 * tr.inductance * (current_sq(last) - current_sq(0));
  e.residual = e.electrical_in - e.resistive_loss - e.kinetic_change - e.magnetic_change -
               e.mechanical_out;
  return e;
}

}  // namespace bldc
