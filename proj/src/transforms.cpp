#include "bldc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bldc {

namespace {

constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;
const double kSqrt2Over3 = std::sqrt(2.0 / 3.0);

}  // namespace

double ThreePhaseVector::max_abs() const noexcept {
  return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

AlphaBeta clarke(const ThreePhaseVector& v) noexcept {
  const double half_sqrt3 = std::numbers::sqrt3 / 2.0;
  return {kSqrt2Over3 * (v.a - 0.5 * v.b - 0.5 * v.c), kSqrt2Over3 * (half_sqrt3 * (v.b - v.c))};
}

DQVector park(const AlphaBeta& ab, double theta) noexcept {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * ab.alpha + s * ab.beta, -s * ab.alpha + c * ab.beta};
}

DQVector dq_transform(const ThreePhaseVector& v, double theta) noexcept {
  const double ca = std::cos(theta);
  const double cb = std::cos(theta - kTwoThirdsPi);
  const double cc = std::cos(theta + kTwoThirdsPi);
  const double sa = std::sin(theta);
  const double sb = std::sin(theta - kTwoThirdsPi);
  const double sc = std::sin(theta + kTwoThirdsPi);
  return {kSqrt2Over3 * (ca * v.a + cb * v.b + cc * v.c),
          -kSqrt2Over3 * (sa * v.a + sb * v.b + sc * v.c)};
}

ThreePhaseVector inverse_dq(const DQVector& dq, double theta) noexcept {
  // Transpose of the composed matrix; its rows are orthonormal.
  auto column = [&](double shift) {
    return kSqrt2Over3 * (std::cos(theta + shift) * dq.d - std::sin(theta + shift) * dq.q);
  };
  return {column(0.0), column(-kTwoThirdsPi), column(kTwoThirdsPi)};
}

ThreePhaseVector phase_profile(double theta) noexcept {
  return {-std::sin(theta), -std::sin(theta - kTwoThirdsPi), -std::sin(theta + kTwoThirdsPi)};
}

ThreePhaseVector synth_balanced(double amplitude, double theta) noexcept {
  const ThreePhaseVector p = phase_profile(theta);
  return {amplitude * p.a, amplitude * p.b, amplitude * p.c};
}

}  // namespace bldc
