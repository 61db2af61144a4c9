#include <cmath>
#include <random>
#include <type_traits>

#include "bldc/analysis.hpp"
#include "bldc/frames.hpp"
#include "doctest.h"

using namespace bldc;
using enum ReferenceFrame;

namespace {

constexpr QuantityKind kKinds[] = {QuantityKind::Current,        QuantityKind::Voltage,
                                   QuantityKind::Resistance,     QuantityKind::Inductance,
                                   QuantityKind::TorqueConstant, QuantityKind::BackEmfConstant,
                                   QuantityKind::VelocityConstant};
constexpr ReferenceFrame kFrames[] = {Phase, Line, LineToLine, QAxis, SinglePhaseRMS};
constexpr WindingType kWindings[] = {WindingType::Wye, WindingType::Delta};

bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Line/terminal-to-phase and line/terminal-to-q-axis factors, written out
// independently of the library's hub table.
struct TableRow {
  QuantityKind kind;
  ReferenceFrame from;
  ReferenceFrame to;
  double wye;
  double delta;
};

const TableRow kLineTable[] = {
    {QuantityKind::Voltage, LineToLine, Phase, 1.0 / std::sqrt(3.0), 1.0},
    {QuantityKind::Current, Line, Phase, 1.0, 1.0 / std::sqrt(3.0)},
    {QuantityKind::Resistance, LineToLine, Phase, 0.5, 1.5},
    {QuantityKind::Inductance, LineToLine, QAxis, 1.5, 0.5},
    {QuantityKind::Voltage, LineToLine, QAxis, 1.0 / std::sqrt(2.0), std::sqrt(1.5)},
    {QuantityKind::Current, Line, QAxis, std::sqrt(1.5), std::sqrt(0.5)},
    {QuantityKind::BackEmfConstant, LineToLine, QAxis, 1.0 / std::sqrt(2.0), std::sqrt(1.5)},
};

}  // namespace

TEST_CASE("line and terminal quantities convert by the tabulated factors") {
  for (const TableRow& row : kLineTable) {
    CHECK(conversion_factor(row.kind, row.from, row.to, WindingType::Wye) ==
          doctest::Approx(row.wye).epsilon(1e-14));
    CHECK(conversion_factor(row.kind, row.from, row.to, WindingType::Delta) ==
          doctest::Approx(row.delta).epsilon(1e-14));
  }
}

TEST_CASE("q-axis current and torque constant scale with the phase amplitude by sqrt(3/2)") {
  for (WindingType w : kWindings) {
    CHECK(conversion_factor(QuantityKind::Current, Phase, QAxis, w) == doctest::Approx(std::sqrt(1.5)));
    CHECK(conversion_factor(QuantityKind::TorqueConstant, Phase, QAxis, w) ==
          doctest::Approx(std::sqrt(1.5)));
    CHECK(conversion_factor(QuantityKind::Current, Phase, SinglePhaseRMS, w) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("terminal resistance to phase resistance") {
  const FrameTaggedQuantity r_ll(0.2, QuantityKind::Resistance, LineToLine);
  const FrameTaggedQuantity wye = convert(r_ll, Phase, WindingType::Wye);
  CHECK(wye.value() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(wye.frame() == Phase);
  CHECK(convert(r_ll, Phase, WindingType::Delta).value() == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("zero phase current maps to zero q-axis current") {
  const FrameTaggedQuantity i(0.0, QuantityKind::Current, Phase);
  CHECK(convert(i, QAxis, WindingType::Delta).value() == 0.0);
}

TEST_CASE("line-to-line back-EMF constant to q-axis torque constant, delta") {
  const FrameTaggedQuantity kb(0.0955, QuantityKind::BackEmfConstant, LineToLine);
  const FrameTaggedQuantity kt = convert(kb, QuantityKind::TorqueConstant, QAxis, WindingType::Delta);
  CHECK(kt.kind() == QuantityKind::TorqueConstant);
  CHECK(kt.value() == doctest::Approx(0.0955 * std::sqrt(1.5)).epsilon(1e-14));
  CHECK(kt.value() == doctest::Approx(0.1170).epsilon(1e-3));
}

TEST_CASE("velocity constant is the reciprocal of the back-EMF constant in every frame") {
  for (WindingType w : kWindings) {
    for (ReferenceFrame f : {Phase, LineToLine, QAxis}) {
      const FrameTaggedQuantity kb(0.05, QuantityKind::BackEmfConstant, f);
      const FrameTaggedQuantity kv = convert(kb, QuantityKind::VelocityConstant, f, w);
      CHECK(kv.value() == doctest::Approx(20.0).epsilon(1e-14));
    }
    const FrameTaggedQuantity kv_ll(10.0, QuantityKind::VelocityConstant, LineToLine);
    const double kb_ll = convert(kv_ll, QuantityKind::BackEmfConstant, LineToLine, w).value();
    const double kt_q = convert(kv_ll, QuantityKind::TorqueConstant, QAxis, w).value();
    CHECK(kt_q == doctest::Approx(kb_ll * conversion_factor(QuantityKind::BackEmfConstant,
                                                             LineToLine, QAxis, w)));
  }
}

TEST_CASE("round trip through every supported frame pair is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(1e-3, 1e3);
  for (QuantityKind k : kKinds) {
    for (WindingType w : kWindings) {
      for (ReferenceFrame a : kFrames) {
        if (!frame_allowed(k, a)) continue;
        for (ReferenceFrame b : kFrames) {
          if (!frame_allowed(k, b)) continue;
          for (int n = 0; n < 20; ++n) {
            double v = mag(rng);
            if (!requires_positive(k) && (n % 2)) v = -v;
            const FrameTaggedQuantity q(v, k, a);
            const FrameTaggedQuantity back = convert(convert(q, b, w), a, w);
            CHECK(close(back.value(), v));
            CHECK(back.frame() == a);
          }
          CHECK(close(conversion_factor(k, a, b, w) * conversion_factor(k, b, a, w), 1.0));
        }
      }
    }
  }
}

TEST_CASE("conversion factors compose transitively") {
  for (QuantityKind k : kKinds) {
    for (WindingType w : kWindings) {
      for (ReferenceFrame a : kFrames) {
        for (ReferenceFrame b : kFrames) {
          for (ReferenceFrame c : kFrames) {
            if (!frame_allowed(k, a) || !frame_allowed(k, b) || !frame_allowed(k, c)) continue;
            CHECK(close(conversion_factor(k, a, c, w),
                        conversion_factor(k, a, b, w) * conversion_factor(k, b, c, w)));
          }
        }
      }
    }
  }
}

TEST_CASE("frames without a definition are rejected") {
  CHECK_FALSE(frame_allowed(QuantityKind::Current, LineToLine));
  CHECK_FALSE(frame_allowed(QuantityKind::Voltage, Line));
  CHECK_FALSE(frame_allowed(QuantityKind::Resistance, QAxis));
  CHECK_THROWS_AS(FrameTaggedQuantity(1.0, QuantityKind::Current, LineToLine), Error);
  const FrameTaggedQuantity i(1.0, QuantityKind::Current, Phase);
  for (WindingType w : kWindings) {
    try {
      (void)convert(i, LineToLine, w);
      FAIL("line-to-line current accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedConversion);
    }
    CHECK_THROWS_AS(conversion_factor(QuantityKind::Current, Phase, LineToLine, w), Error);
  }
}

TEST_CASE("constructor validation") {
  SUBCASE("non-positive parameters") {
    for (QuantityKind k : kKinds) {
      if (!requires_positive(k)) continue;
      try {
        FrameTaggedQuantity(0.0, k, Phase);
        FAIL("zero parameter accepted");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveValue);
      }
      CHECK_THROWS_AS(FrameTaggedQuantity(-1.0, k, Phase), Error);
    }
    CHECK_NOTHROW(FrameTaggedQuantity(-3.0, QuantityKind::Current, QAxis));
  }
  SUBCASE("non-finite values") {
    try {
      FrameTaggedQuantity(std::nan(""), QuantityKind::Voltage, Phase);
      FAIL("NaN accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteValue);
    }
    CHECK_THROWS_AS(FrameTaggedQuantity(INFINITY, QuantityKind::Resistance, Phase), Error);
  }
  SUBCASE("amplitude flags") {
    CHECK(FrameTaggedQuantity(1.0, QuantityKind::Current, Phase).amplitude());
    CHECK_FALSE(FrameTaggedQuantity(1.0, QuantityKind::Current, QAxis).amplitude());
    CHECK_THROWS_AS(FrameTaggedQuantity(1.0, QuantityKind::Current, QAxis, true), Error);
    CHECK_THROWS_AS(FrameTaggedQuantity(1.0, QuantityKind::Resistance, Phase, true), Error);
    CHECK_THROWS_AS(FrameTaggedQuantity(1.0, QuantityKind::TorqueConstant, Phase, false), Error);
  }
}

TEST_CASE("instantaneous samples only convert to their own frame") {
  const FrameTaggedQuantity sample(0.4, QuantityKind::Current, Phase, false);
  CHECK(convert(sample, Phase, WindingType::Wye).value() == 0.4);
  CHECK_THROWS_AS(convert(sample, QAxis, WindingType::Wye), Error);
}

TEST_CASE("pair_check accepts only phase resistance with q-axis or phase-amplitude current") {
  const FrameTaggedQuantity r_phase(0.1, QuantityKind::Resistance, Phase);
  const FrameTaggedQuantity r_ll(0.2, QuantityKind::Resistance, LineToLine);
  const FrameTaggedQuantity iq(10.0, QuantityKind::Current, QAxis);
  const FrameTaggedQuantity i_phase(10.0, QuantityKind::Current, Phase);
  const FrameTaggedQuantity i_line(10.0, QuantityKind::Current, Line);
  const FrameTaggedQuantity i_rms(10.0, QuantityKind::Current, SinglePhaseRMS);

  const ResistanceCurrentPair ok = pair_check(r_phase, iq);
  CHECK(ok.power() == doctest::Approx(10.0));
  CHECK(ok.current_frame() == QAxis);

  // Same physical current expressed as phase amplitude dissipates the same.
  const FrameTaggedQuantity i_amp = convert(iq, Phase, WindingType::Wye);
  CHECK(pair_check(r_phase, i_amp).power() == doctest::Approx(10.0).epsilon(1e-14));

  auto expect_mismatch = [](const FrameTaggedQuantity& r, const FrameTaggedQuantity& i,
                            const char* expected) {
    try {
      (void)pair_check(r, i);
      FAIL("pairing accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MismatchedFrames);
      CHECK(std::string(e.what()).find(expected) != std::string::npos);
    }
  };
  expect_mismatch(r_ll, iq, "phase");
  expect_mismatch(r_phase, i_line, "q-axis");
  expect_mismatch(r_phase, i_rms, "q-axis");
  expect_mismatch(r_phase, FrameTaggedQuantity(1.0, QuantityKind::Current, Phase, false), "amplitude");
  expect_mismatch(iq, r_phase, "resistance");
}

// Forbidden pairings do not compile.
template <typename I, typename R>
concept LossCallable = requires(I i, R r) { resistive_power_loss(i, r); };

template <QuantityKind K, ReferenceFrame F>
concept TagExists = requires { typename Tagged<K, F>; Tagged<K, F>::kind; };

static_assert(LossCallable<QAxisCurrent, PhaseResistance>);
static_assert(!LossCallable<QAxisCurrent, TerminalResistance>);
static_assert(!LossCallable<LineCurrentAmplitude, PhaseResistance>);
static_assert(!LossCallable<PhaseCurrentAmplitude, PhaseResistance>);
static_assert(!std::is_convertible_v<double, PhaseResistance>);
static_assert(!std::is_convertible_v<TerminalResistance, PhaseResistance>);
static_assert(TagExists<QuantityKind::Current, Line>);
static_assert(!TagExists<QuantityKind::Current, LineToLine>);
static_assert(!TagExists<QuantityKind::Voltage, Line>);

TEST_CASE("typed tags reject mismatched runtime quantities") {
  const FrameTaggedQuantity r_ll(0.2, QuantityKind::Resistance, LineToLine);
  CHECK_THROWS_AS(PhaseResistance{r_ll}, Error);
  CHECK(TerminalResistance{r_ll}.value() == 0.2);
  CHECK(PhaseResistance{convert(r_ll, Phase, WindingType::Wye)}.value() == doctest::Approx(0.1));
  CHECK_THROWS_AS(PhaseResistance{-1.0}, Error);
}

TEST_CASE("winding names") {
  CHECK(parse_winding("wye") == WindingType::Wye);
  CHECK(parse_winding("delta") == WindingType::Delta);
  CHECK(parse_winding("star") == WindingType::Wye);
  CHECK_FALSE(parse_winding("unknown").has_value());
}
