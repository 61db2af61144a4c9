#include <cmath>
#include <random>

#include "bldc/analysis.hpp"
#include "bldc/transforms.hpp"
#include "doctest.h"

using namespace bldc;

namespace {

QAxisMotorModel kv100(WindingType w = WindingType::Delta) {
  QAxisMotorModel m;
  m.ktq = m.kbq = std::sqrt(1.5) / 10.4720;
  m.r_phase = 0.3;
  m.l_effective = 5e-5;
  m.inertia = 1e-4;
  m.pole_pairs = 21;
  m.winding = w;
  return m;
}

}  // namespace

TEST_CASE("resistive loss") {
  CHECK(resistive_power_loss(QAxisCurrent(10.0), PhaseResistance(0.1)) == doctest::Approx(10.0));
  CHECK(resistive_power_loss(QAxisCurrent(0.0), PhaseResistance(3.0)) == 0.0);
  const FrameTaggedQuantity iq(10.0, QuantityKind::Current, ReferenceFrame::QAxis);
  const FrameTaggedQuantity r_phase(0.1, QuantityKind::Resistance, ReferenceFrame::Phase);
  const FrameTaggedQuantity r_ll(0.2, QuantityKind::Resistance, ReferenceFrame::LineToLine);
  CHECK(resistive_power_loss(iq, r_phase) == doctest::Approx(10.0));
  CHECK_THROWS_AS(resistive_power_loss(iq, r_ll), Error);
  const FrameTaggedQuantity i_phase(10.0, QuantityKind::Current, ReferenceFrame::Phase);
  CHECK_THROWS_AS(resistive_power_loss(i_phase, r_phase), Error);
}

TEST_CASE("q-axis loss equals the summed phase loss") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int n = 0; n < 200; ++n) {
    const double iq = u(rng);
    const double theta = u(rng);
    const ThreePhaseVector i = inverse_dq({0.0, iq}, theta);
    CHECK(resistive_power_loss_phase(i.a, i.b, i.c, PhaseResistance(0.25)) ==
          doctest::Approx(resistive_power_loss(QAxisCurrent(iq), PhaseResistance(0.25))).epsilon(1e-12));
  }
}

TEST_CASE("terminal resistance misuse ratios") {
  CHECK(power_loss_error_if_terminal_resistance_misused(WindingType::Wye) == 2.0);
  CHECK(power_loss_error_if_terminal_resistance_misused(WindingType::Delta) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("torque") {
  CHECK(torque(QAxisTorqueConstant(0.11695), QAxisCurrent(10.0)) == doctest::Approx(1.1695));
  CHECK(torque(QAxisTorqueConstant(0.5), QAxisCurrent(0.0)) == 0.0);
  const FrameTaggedQuantity kt_phase(0.1, QuantityKind::TorqueConstant, ReferenceFrame::Phase);
  const FrameTaggedQuantity iq(1.0, QuantityKind::Current, ReferenceFrame::QAxis);
  CHECK_THROWS_AS(torque(kt_phase, iq), Error);
}

TEST_CASE("torque from line quantities agrees with the q-axis form for both windings") {
  CHECK(torque_from_line(0.0955, 12.0) == doctest::Approx(0.9925).epsilon(1e-4));
  CHECK(torque_from_line(0.1, 0.0) == 0.0);
  CHECK_THROWS_AS(torque_from_line(0.0, 1.0), Error);
  CHECK_THROWS_AS(torque_from_line(0.1, -1.0), Error);
  for (WindingType w : {WindingType::Wye, WindingType::Delta}) {
    const double kb_ll = 0.08;
    const double i_l = 5.0;
    const double ktq = convert(FrameTaggedQuantity(kb_ll, QuantityKind::BackEmfConstant, ReferenceFrame::LineToLine),
                               QuantityKind::TorqueConstant, ReferenceFrame::QAxis, w)
                           .value();
    const double iq =
        convert(FrameTaggedQuantity(i_l, QuantityKind::Current, ReferenceFrame::Line), ReferenceFrame::QAxis, w).value();
    CHECK(torque_from_line(kb_ll, i_l) == doctest::Approx(ktq * iq).epsilon(1e-14));
  }
}

TEST_CASE("Kv misuse ratio") {
  CHECK(torque_error_if_kv_misused_as_ktq() == doctest::Approx(0.81650).epsilon(1e-5));
  CHECK(torque_error_if_kv_misused_as_ktq() * std::sqrt(1.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(torque_error_if_kv_misused_as_ktq(WindingType::Wye) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("speed and bus voltage limits") {
  const QAxisMotorModel m = kv100();
  CHECK(max_no_load_velocity(m, 24.0) == doctest::Approx(251.3).epsilon(5e-4));
  CHECK(max_no_load_velocity(m, 0.0) == 0.0);
  CHECK_THROWS_AS(max_no_load_velocity(m, -1.0), Error);
  CHECK(required_bus_voltage(m, 0.0) == 0.0);
  CHECK(required_bus_voltage(m, 251.3) == doctest::Approx(24.0).epsilon(5e-4));
  CHECK_THROWS_AS(required_bus_voltage(m, -1.0), Error);
  for (WindingType w : {WindingType::Wye, WindingType::Delta}) {
    const QAxisMotorModel x = kv100(w);
    for (double v : {1.0, 12.0, 48.0}) {
      CHECK(required_bus_voltage(x, max_no_load_velocity(x, v)) == doctest::Approx(v).epsilon(1e-14));
    }
  }
  // Wye: the line-to-line amplitude is sqrt(2) Vq.
  CHECK(max_no_load_velocity(kv100(WindingType::Wye), 24.0) ==
        doctest::Approx(24.0 / std::sqrt(2.0) / kv100().kbq));
}

TEST_CASE("pitfall table ratios are parameter-free") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int n = 0; n < 50; ++n) {
    QAxisMotorModel m = kv100(n % 2 ? WindingType::Wye : WindingType::Delta);
    m.ktq = m.kbq = u(rng);
    m.r_phase = u(rng);
    const auto rows = pitfall_table(m, u(rng) * 10.0);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].winding == m.winding);
    for (const PitfallRow& r : rows) {
      const bool loss = r.pitfall.find("resistance") != std::string::npos;
      const double expected = loss ? power_loss_error_if_terminal_resistance_misused(r.winding)
                                   : torque_error_if_kv_misused_as_ktq(r.winding);
      CHECK(r.ratio == doctest::Approx(expected).epsilon(1e-12));
      CHECK(r.wrong / r.right == doctest::Approx(r.ratio).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(pitfall_table(kv100(), 0.0), Error);
}
