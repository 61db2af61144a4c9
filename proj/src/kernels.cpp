#include "bldc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace bldc::kernels {

namespace {

constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;

void require_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw Error(ErrorCode::InvalidArgument, "batch spans differ in length");
}

std::ptrdiff_t signed_size(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }

double trig_residual(double t) {
  const double a = std::sin(t);
  const double b = std::sin(t + kTwoThirdsPi);
  const double c = std::sin(t - kTwoThirdsPi);
  return std::abs(a * a + b * b + c * c - 1.5);
}

double power_gap(const ThreePhaseVector& v, const ThreePhaseVector& i, double theta) {
  const double p_abc = v.dot(i);
  const DQVector vdq = dq_transform(v, theta);
  const DQVector idq = dq_transform(i, theta);
  const double p_dq = vdq.d * idq.d + vdq.q * idq.q;
  const double scale = std::max(std::sqrt(v.dot(v) * i.dot(i)), 1e-300);
  return std::abs(p_abc - p_dq) / scale;
}

}  // namespace

void dq_transform_batch(std::span<const ThreePhaseVector> abc, std::span<const double> theta,
                        std::span<DQVector> out) {
  require_sizes(abc.size(), theta.size(), out.size());
  const std::ptrdiff_t n = signed_size(abc.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = dq_transform(abc[k], theta[k]);
}

void dq_transform_batch_serial(std::span<const ThreePhaseVector> abc,
                               std::span<const double> theta, std::span<DQVector> out) {
  require_sizes(abc.size(), theta.size(), out.size());
  for (std::size_t k = 0; k < abc.size(); ++k) out[k] = dq_transform(abc[k], theta[k]);
}

void inverse_dq_batch(std::span<const DQVector> dq, std::span<const double> theta,
                      std::span<ThreePhaseVector> out) {
  require_sizes(dq.size(), theta.size(), out.size());
  const std::ptrdiff_t n = signed_size(dq.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = inverse_dq(dq[k], theta[k]);
}

void inverse_dq_batch_serial(std::span<const DQVector> dq, std::span<const double> theta,
                             std::span<ThreePhaseVector> out) {
  require_sizes(dq.size(), theta.size(), out.size());
  for (std::size_t k = 0; k < dq.size(); ++k) out[k] = inverse_dq(dq[k], theta[k]);
}

double trig_identity_max_error(std::span<const double> theta) {
  const std::ptrdiff_t n = signed_size(theta.size());
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) worst = std::max(worst, trig_residual(theta[k]));
  return worst;
}

double trig_identity_max_error_serial(std::span<const double> theta) {
  double worst = 0.0;
  for (double t : theta) worst = std::max(worst, trig_residual(t));
  return worst;
}

double power_invariance_max_error(std::span<const ThreePhaseVector> v,
                                  std::span<const ThreePhaseVector> i,
                                  std::span<const double> theta) {
  require_sizes(v.size(), i.size(), theta.size());
  const std::ptrdiff_t n = signed_size(v.size());
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) worst = std::max(worst, power_gap(v[k], i[k], theta[k]));
  return worst;
}

double power_invariance_max_error_serial(std::span<const ThreePhaseVector> v,
                                         std::span<const ThreePhaseVector> i,
                                         std::span<const double> theta) {
  require_sizes(v.size(), i.size(), theta.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) worst = std::max(worst, power_gap(v[k], i[k], theta[k]));
  return worst;
}

std::vector<SimTrace> run_ensemble(std::span<const EnsembleCase> cases) {
  std::vector<SimTrace> out(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  const std::ptrdiff_t n = signed_size(cases.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      const EnsembleCase& c = cases[k];
      out[k] = run(c.model, c.controller, c.load, c.which, c.options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<SimTrace> run_ensemble_serial(std::span<const EnsembleCase> cases) {
  std::vector<SimTrace> out;
  out.reserve(cases.size());
  for (const EnsembleCase& c : cases) out.push_back(run(c.model, c.controller, c.load, c.which, c.options));
  return out;
}

}  // namespace bldc::kernels
